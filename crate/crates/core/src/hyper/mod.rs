//! Hyperplane families of the flag geometry and the campaigns that check
//! which embeddings they arise from.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flaggeom::Geometry;
use crate::flagset::FlagSet;
use crate::gf::{Automorphism, Elem, Field};
use crate::linalg::{dot, normalize_projective, projective_coefficients, pure_tensor, rank, MatrixVec};

mod main1;
mod quot;
mod scan;
mod vlemmas;

pub use main1::{solve_cross_twist, verify_cross_twist, verify_main1};
pub use quot::{is_polarized, verify_quot2};
pub use scan::{find_geometric_hyperplanes, verify_hyperscan};
pub use vlemmas::{verify_v0, verify_v_lemmas};

/// Sampling thresholds shared by the campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CampaignOptions {
    /// Sample size used when the candidate space is above `exhaustive_bound`.
    pub sample: usize,
    pub seed: u64,
    pub exhaustive_bound: u64,
}

pub const DEFAULT_SAMPLE: usize = 1000;
pub const DEFAULT_EXHAUSTIVE_BOUND: u64 = 1 << 22;

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions { sample: DEFAULT_SAMPLE, seed: 0, exhaustive_bound: DEFAULT_EXHAUSTIVE_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperplaneSpec {
    /// `{(p, H) : p ∈ A or a ∈ H}`; singular when `a ∈ A`.
    QuasiSingular { point: usize, hyperplane: usize },
    /// `{([x], [xi]) : xi M x^sigma = 0}`.
    MatrixForm { matrix: MatrixVec, sigma: Automorphism },
}

impl HyperplaneSpec {
    pub fn flags(&self, g: &Geometry) -> Result<FlagSet> {
        match self {
            HyperplaneSpec::QuasiSingular { point, hyperplane } => Ok(quasi_singular(g, *point, *hyperplane)),
            HyperplaneSpec::MatrixForm { matrix, sigma } => matrix_hyperplane(g, matrix, *sigma),
        }
    }

    /// Matrix forms are reduced to their canonical representative.
    pub fn canonical(self, f: &Field) -> Result<Self> {
        match self {
            HyperplaneSpec::MatrixForm { matrix, sigma } => {
                Ok(HyperplaneSpec::MatrixForm { matrix: canonical_matrix(f, &matrix, sigma)?, sigma })
            }
            qs => Ok(qs),
        }
    }

    pub fn to_json(&self, g: &Geometry) -> Value {
        let f = g.field();
        match self {
            HyperplaneSpec::QuasiSingular { point, hyperplane } => json!({
                "kind": "quasi_singular",
                "point": crate::linalg::vector_to_json(f, &g.points()[*point].rep.0),
                "hyperplane": crate::linalg::vector_to_json(f, &g.hyperplanes()[*hyperplane].rep.0),
            }),
            HyperplaneSpec::MatrixForm { matrix, sigma } => json!({
                "kind": "matrix",
                "matrix": matrix.to_json(f),
                "sigma": sigma.frobenius_power,
            }),
        }
    }
}

pub fn quasi_singular(g: &Geometry, point: usize, hyperplane: usize) -> FlagSet {
    FlagSet::from_fn(g.num_flags(), |i| {
        let fl = g.flag(i);
        g.incident(fl.point, hyperplane) || g.incident(point, fl.hyperplane)
    })
}

pub fn is_scalar(m: &MatrixVec) -> bool {
    let s = m.size();
    let d = m.get(0, 0);
    (0..s).all(|i| (0..s).all(|j| m.get(i, j) == if i == j { d } else { Elem::ZERO }))
}

/// Per-flag coefficients `c` with `xi N x^sigma = c . N` for flat `N`.
pub fn twisted_coefficients(g: &Geometry, sigma: Automorphism) -> Vec<Vec<Elem>> {
    let f = g.field();
    (0..g.num_flags())
        .map(|i| pure_tensor(f, &g.point_rep(i).twist(f, sigma), g.hyperplane_rep(i)).transpose().into_flat())
        .collect()
}

fn check_matrix(g: &Geometry, m: &MatrixVec, sigma: Automorphism) -> Result<()> {
    let size = g.n() + 1;
    if m.size() != size {
        return Err(Error::DimensionMismatch { expected: size, found: m.size() });
    }
    g.field().check_automorphism(sigma)?;
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    if sigma.is_identity() && is_scalar(m) {
        return Err(Error::ScalarMatrixWithIdentity);
    }
    Ok(())
}

pub fn matrix_hyperplane(g: &Geometry, m: &MatrixVec, sigma: Automorphism) -> Result<FlagSet> {
    check_matrix(g, m, sigma)?;
    let f = g.field();
    Ok(FlagSet::from_fn(g.num_flags(), |i| {
        let x = g.point_rep(i).twist(f, sigma);
        m.bilinear(f, g.hyperplane_rep(i), &x).is_zero()
    }))
}

/// Canonical representative of the class of `m`: for the identity, `m` is first
/// reduced modulo the scalar matrices by clearing entry `(0, 0)`; then the first
/// non-zero entry is scaled to 1.
pub fn canonical_matrix(f: &Field, m: &MatrixVec, sigma: Automorphism) -> Result<MatrixVec> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let mut m = m.clone();
    if sigma.is_identity() {
        if is_scalar(&m) {
            return Err(Error::ScalarMatrixWithIdentity);
        }
        let d = m.get(0, 0);
        m = m.sub(f, &MatrixVec::identity(m.size()).scale(f, d));
    }
    let mut flat = m.into_flat();
    normalize_projective(f, &mut flat);
    MatrixVec::from_flat(flat)
}

/// Canonical representatives of all matrix hyperplane specs for `sigma`, in
/// lexicographic order.
pub fn canonical_matrices(f: &Field, size: usize, sigma: Automorphism) -> impl Iterator<Item = MatrixVec> + '_ {
    let free = if sigma.is_identity() { size * size - 1 } else { size * size };
    projective_coefficients(f, free).map(move |c| {
        let mut flat = Vec::with_capacity(size * size);
        if sigma.is_identity() {
            flat.push(Elem::ZERO);
        }
        flat.extend(c);
        MatrixVec::from_flat(flat).expect("square")
    })
}

/// Number of canonical representatives produced by [`canonical_matrices`].
pub fn canonical_matrix_count(q: u64, size: usize, sigma: Automorphism) -> u128 {
    let free = if sigma.is_identity() { size * size - 1 } else { size * size };
    ((q as u128).pow(free as u32) - 1) / (q as u128 - 1)
}

/// Rank test for quasi-singularity of `H_{M, sigma}`: rank 1, or for the
/// identity rank 1 after adding some scalar matrix.
pub fn matrix_is_quasi_singular(f: &Field, m: &MatrixVec, sigma: Automorphism) -> bool {
    if sigma.is_identity() {
        let id = MatrixVec::identity(m.size());
        f.elements().any(|l| rank(f, &m.add(f, &id.scale(f, l))) == 1)
    } else {
        rank(f, m) == 1
    }
}

/// The unique `(a, A)` with `h = H_{a,A}`, found by scanning every pair.
pub fn recognize_quasi_singular(g: &Geometry, h: &FlagSet) -> Result<Option<(usize, usize)>> {
    if !g.is_geometric_hyperplane(h) {
        return Err(Error::NotAHyperplane);
    }
    let np = g.points().len();
    let mut found = None;
    for a in 0..np {
        for big_a in 0..np {
            if quasi_singular(g, a, big_a) == *h {
                if found.is_some() {
                    return Err(Error::Precondition("quasi-singular pair is not unique".into()));
                }
                found = Some((a, big_a));
            }
        }
    }
    Ok(found)
}

/// Lookup table from quasi-singular hyperplanes to their pairs.
#[derive(Debug, Clone)]
pub struct QuasiSingularIndex {
    map: HashMap<FlagSet, (usize, usize)>,
    collisions: usize,
}

impl QuasiSingularIndex {
    pub fn new(g: &Geometry) -> Self {
        let np = g.points().len();
        let mut map = HashMap::with_capacity(np * np);
        let mut collisions = 0;
        for a in 0..np {
            for big_a in 0..np {
                if map.insert(quasi_singular(g, a, big_a), (a, big_a)).is_some() {
                    collisions += 1;
                }
            }
        }
        QuasiSingularIndex { map, collisions }
    }

    pub fn get(&self, h: &FlagSet) -> Option<(usize, usize)> {
        self.map.get(h).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Pairs whose hyperplane coincided with an earlier pair's.
    pub fn collisions(&self) -> usize {
        self.collisions
    }
}

/// Value of `xi N x^sigma` for flag coefficients `c` (see [`twisted_coefficients`]).
#[inline]
pub(crate) fn eval_coeffs(f: &Field, c: &[Elem], n: &[Elem]) -> Elem {
    dot(f, c, n)
}

#[cfg(test)]
mod tests;
