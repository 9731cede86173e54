use std::collections::BTreeSet;

use super::{Letter, Representation, Word};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassFilter {
    pub primitive_only: bool,
}

/// One representative per conjugacy class among cyclically reduced words of
/// length `1..=max_len` in `rank` generators.
///
/// Words are identified up to cyclic rotation and inversion. When a base
/// representation is supplied (a faithful image of a group with relations),
/// classes with matching `tr^2` are additionally merged if a conjugator of
/// length at most three relates them.
pub fn enumerate_conjugacy_classes(
    rank: usize,
    base: Option<&Representation>,
    max_len: usize,
    filter: ClassFilter,
) -> Vec<Word> {
    let mut classes: BTreeSet<(usize, Word)> = BTreeSet::new();
    let mut stack: Vec<Letter> = Vec::with_capacity(max_len);
    extend(rank, max_len, &mut stack, &mut |w: &[Letter]| {
        let first = w[0];
        let last = w[w.len() - 1];
        if w.len() > 1 && first == last.inverse() {
            return;
        }
        let word = Word::new(w.iter().copied());
        if word.cyclic_canonical() != word {
            return;
        }
        if filter.primitive_only && !word.is_primitive() {
            return;
        }
        classes.insert((word.len(), word));
    });
    let words: Vec<Word> = classes.into_iter().map(|(_, w)| w).collect();
    match base {
        Some(rho) => merge_by_trace(words, rho),
        None => words,
    }
}

fn extend(rank: usize, max_len: usize, stack: &mut Vec<Letter>, visit: &mut impl FnMut(&[Letter])) {
    if !stack.is_empty() {
        visit(stack);
    }
    if stack.len() == max_len {
        return;
    }
    for i in 0..2 * rank {
        let l = Letter::from_index(i);
        if stack.last() == Some(&l.inverse()) {
            continue;
        }
        stack.push(l);
        extend(rank, max_len, stack, visit);
        stack.pop();
    }
}

fn conjugators(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    extend(rank, max_len, &mut stack, &mut |w: &[Letter]| out.push(Word::new(w.iter().copied())));
    out
}

fn merge_by_trace(words: Vec<Word>, rho: &Representation) -> Vec<Word> {
    let mut keyed: Vec<(f64, usize)> = words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let t = rho.evaluate_word(w).map(|m| m.trace()).unwrap_or_default();
            ((t * t).norm(), i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let conj = conjugators(rho.rank(), 3);
    let mut dropped = vec![false; words.len()];
    for i in 0..keyed.len() {
        let (ti, wi) = keyed[i];
        if dropped[wi] {
            continue;
        }
        let mi = rho.evaluate_word(&words[wi]).expect("valid word");
        for &(tj, wj) in keyed.iter().skip(i + 1) {
            if (tj - ti).abs() > 1e-8 * ti.max(1.0) {
                break;
            }
            if dropped[wj] || words[wj].len() < words[wi].len() {
                continue;
            }
            let mj = rho.evaluate_word(&words[wj]).expect("valid word");
            let mj_inv = mj.inverse();
            let scale = 1e-8 * mj.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
            let conjugate = conj.iter().any(|u| {
                let k = rho.evaluate_word(u).expect("valid word");
                let c = mi.conjugate_by(&k);
                c.projective_distance(&mj) <= scale || c.projective_distance(&mj_inv) <= scale
            });
            if conjugate {
                dropped[wj] = true;
            }
        }
    }
    words.into_iter().zip(dropped).filter(|(_, d)| !d).map(|(w, _)| w).collect()
}
