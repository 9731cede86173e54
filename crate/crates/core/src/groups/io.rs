//! JSON documents describing groups.
//!
//! ```json
//! {"kind": "schottky",
//!  "circles": [{"center": [-3.0, 0.0], "radius": 1.0}, {"center": [3.0, 0.0], "radius": 1.0}],
//!  "generators": [[[[3.0, 0.0], [8.0, 0.0]], [[1.0, 0.0], [3.0, 0.0]]]]}
//! ```
//!
//! Numbers are written in shortest round-trip form, so a document survives
//! `write -> read` bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{MoebiusMap, C64};

use super::{build_regular_4g_gon_group, build_schottky, Circle, Representation, SchottkyGroup, SurfaceGroupPresentation};

pub type ComplexPair = [f64; 2];
pub type MatrixDoc = [[ComplexPair; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Surface,
    Schottky,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleDoc {
    pub center: ComplexPair,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDocument {
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circles: Option<Vec<CircleDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<MatrixDoc>>,
}

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

fn complex(p: ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix_doc(m: &MoebiusMap) -> MatrixDoc {
    [[pair(m.a), pair(m.b)], [pair(m.c), pair(m.d)]]
}

/// Reads a matrix verbatim; entries must already have determinant one.
pub fn matrix_from_doc(d: &MatrixDoc) -> Result<MoebiusMap> {
    let m = MoebiusMap { a: complex(d[0][0]), b: complex(d[0][1]), c: complex(d[1][0]), d: complex(d[1][1]) };
    if !m.is_finite() {
        return Err(Error::InvalidGroup("non-finite matrix entry".into()));
    }
    let det_err = (m.det() - 1.0).norm();
    if det_err > 1e-9 {
        return Err(Error::InvalidGroup(format!("determinant off by {det_err:e}")));
    }
    Ok(m)
}

/// A group ready for coding and dimension computations.
#[derive(Clone, Debug)]
pub enum Group {
    Surface { presentation: SurfaceGroupPresentation, rho: Representation },
    Schottky(SchottkyGroup),
}

impl Group {
    pub fn surface(genus: usize) -> Result<Group> {
        let (presentation, rho) = build_regular_4g_gon_group(genus)?;
        Ok(Group::Surface { presentation, rho })
    }

    pub fn rho(&self) -> &Representation {
        match self {
            Group::Surface { rho, .. } => rho,
            Group::Schottky(s) => &s.rho,
        }
    }

    /// Relator residual of a surface group, pairing residual of a Schottky group.
    pub fn residual(&self) -> f64 {
        match self {
            Group::Surface { presentation, rho } => presentation.relator_residual(rho),
            Group::Schottky(s) => s.pairing_residual(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Group::Surface { presentation, .. } => format!("surface-genus-{}", presentation.genus),
            Group::Schottky(s) => format!("schottky-{}-circles", s.circles.len()),
        }
    }

    pub fn to_document(&self) -> GroupDocument {
        let generators = Some(self.rho().generators().iter().map(matrix_doc).collect());
        match self {
            Group::Surface { presentation, .. } => GroupDocument {
                kind: GroupKind::Surface,
                genus: Some(presentation.genus),
                circles: None,
                generators,
            },
            Group::Schottky(s) => GroupDocument {
                kind: GroupKind::Schottky,
                genus: None,
                circles: Some(
                    s.circles.iter().map(|c| CircleDoc { center: pair(c.center), radius: c.radius }).collect(),
                ),
                generators,
            },
        }
    }

    /// Builds the group; stored generators override the constructed ones.
    pub fn from_document(doc: &GroupDocument) -> Result<Group> {
        let mut group = match doc.kind {
            GroupKind::Surface => {
                if doc.circles.is_some() {
                    return Err(Error::InvalidGroup("surface groups take no circles".into()));
                }
                let genus = doc.genus.ok_or_else(|| Error::InvalidGroup("surface group needs `genus`".into()))?;
                Group::surface(genus)?
            }
            GroupKind::Schottky => {
                if doc.genus.is_some() {
                    return Err(Error::InvalidGroup("schottky groups take no genus".into()));
                }
                let circles: Vec<Circle> = doc
                    .circles
                    .as_ref()
                    .ok_or_else(|| Error::InvalidGroup("schottky group needs `circles`".into()))?
                    .iter()
                    .map(|c| Circle::new(complex(c.center), c.radius))
                    .collect();
                Group::Schottky(build_schottky(&circles)?)
            }
        };
        if let Some(gens) = &doc.generators {
            let mats = gens.iter().map(matrix_from_doc).collect::<Result<Vec<_>>>()?;
            if mats.len() != group.rho().rank() {
                return Err(Error::InvalidGroup(format!(
                    "{} generators given, group has {}",
                    mats.len(),
                    group.rho().rank()
                )));
            }
            let rho = group.rho().with_generators(mats);
            match &mut group {
                Group::Surface { presentation, rho: r } => {
                    let residual = presentation.relator_residual(&rho);
                    if residual > 1e-9 {
                        return Err(Error::InvalidGroup(format!("relator residual {residual:e}")));
                    }
                    *r = rho;
                }
                Group::Schottky(s) => {
                    s.rho = rho;
                    let residual = s.pairing_residual();
                    if residual > 1e-9 {
                        return Err(Error::InvalidGroup(format!("pairing residual {residual:e}")));
                    }
                }
            }
        }
        Ok(group)
    }

    pub fn from_json(s: &str) -> Result<Group> {
        Group::from_document(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("documents serialize")
    }
}
