//! Large eigenvalue of `A^n B` for loxodromic diagonal `A`, against its
//! two-term approximation. The relative error falls like `|lambda|^(-4n)`.

use limitset::mobius::eigenvalue_asymptotic_mu_n;
use limitset::{MoebiusMap, C64};

fn main() -> limitset::Result<()> {
    let lambda = C64::new(1.5, 0.6);
    let b = MoebiusMap::new(C64::new(0.9, 0.2), C64::new(0.7, 0.0), C64::new(-0.3, 0.4), C64::new(1.1, -0.1))?;
    for n in 1..=10u32 {
        let t = (MoebiusMap::diag(lambda.powu(n)) * b).trace();
        let approx = eigenvalue_asymptotic_mu_n(lambda, b.a, b.d, n)?;
        // Both roots of x^2 - t x + 1; the matrix fixes the sign, so pick the one nearest.
        let r = (t * t - 4.0).sqrt();
        let exact = [(t + r) / 2.0, (t - r) / 2.0]
            .into_iter()
            .min_by(|x, y| (x - approx).norm().total_cmp(&(y - approx).norm()))
            .expect("two roots");
        let rel = (approx - exact).norm() / exact.norm();
        println!("n = {n:>2}: relative error {rel:.3e}, scaled {:.4}", rel * lambda.norm().powi(4 * n as i32));
    }
    Ok(())
}
