//! The natural embedding of the flag geometry into matrices, its twistings by
//! field automorphisms, and quotients of those.
//!
//! The flag `([x], [xi])` goes to the projective point of `x^sigma ⊗ xi`. For
//! the identity the images are null-traced and span `M^0_{n+1}`; for any other
//! automorphism they span all of `M_{n+1}`.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flaggeom::Geometry;
use crate::flagset::FlagSet;
use crate::gf::{Automorphism, Elem};
use crate::linalg::{
    annihilator, dot, normalize_projective, null_traced, pure_tensor, span_basis, vector_to_json, Echelon,
    MatrixVec, SubspaceBasis,
};

#[derive(Debug)]
pub struct Embedding<'g> {
    geometry: &'g Geometry,
    sigma: Automorphism,
    ambient: SubspaceBasis,
    raw: Vec<Vec<Elem>>,
    kernel: Option<SubspaceBasis>,
    images: Vec<Vec<Elem>>,
    secants: OnceLock<SecantIndex>,
}

/// Every projective point on a secant (or image point) of the unreduced
/// embedding, mapped to the first flag pair spanning it.
#[derive(Debug)]
struct SecantIndex {
    points: HashMap<Vec<Elem>, (usize, usize)>,
}

pub fn embed_sigma<'g>(g: &'g Geometry, sigma: Automorphism) -> Result<Embedding<'g>> {
    let f = g.field();
    f.check_automorphism(sigma)?;
    let size = g.n() + 1;
    let ambient = if sigma.is_identity() { null_traced(f, size) } else { SubspaceBasis::full(size * size) };
    let raw: Vec<Vec<Elem>> = (0..g.num_flags())
        .map(|i| {
            let x = g.point_rep(i).twist(f, sigma);
            let mut m = pure_tensor(f, &x, g.hyperplane_rep(i)).into_flat();
            normalize_projective(f, &mut m);
            m
        })
        .collect();
    Ok(Embedding { geometry: g, sigma, ambient, images: raw.clone(), raw, kernel: None, secants: OnceLock::new() })
}

impl<'g> Embedding<'g> {
    pub fn geometry(&self) -> &'g Geometry {
        self.geometry
    }

    pub fn sigma(&self) -> Automorphism {
        self.sigma
    }

    pub fn ambient(&self) -> &SubspaceBasis {
        &self.ambient
    }

    pub fn kernel(&self) -> Option<&SubspaceBasis> {
        self.kernel.as_ref()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.as_ref().map_or(0, SubspaceBasis::dim)
    }

    /// Vector dimension of the target space (the ambient modulo the kernel).
    pub fn dim(&self) -> usize {
        self.ambient.dim() - self.kernel_dim()
    }

    /// Canonical image of flag `i`: reduced modulo the kernel and projectively normalized.
    pub fn image(&self, i: usize) -> &[Elem] {
        &self.images[i]
    }

    /// Canonical representative of `x^sigma ⊗ xi` before any quotient.
    pub fn raw_image(&self, i: usize) -> MatrixVec {
        MatrixVec::from_flat(self.raw[i].clone()).expect("square")
    }

    /// Span of the images of `flags` together with the kernel.
    pub fn span_of(&self, flags: &FlagSet) -> SubspaceBasis {
        let f = self.geometry.field();
        let mut ech = self.kernel.as_ref().map_or_else(|| Echelon::new(self.ambient.ambient_dim()), Echelon::from_basis);
        for i in flags.iter() {
            ech.insert(f, &self.images[i]);
        }
        ech.into_basis(f)
    }

    /// Vector dimension of the span of the whole image, modulo the kernel.
    pub fn image_span_dim(&self) -> usize {
        self.span_of(&self.geometry.all_flags()).dim() - self.kernel_dim()
    }

    /// Whether the hyperplane `h` arises from this embedding, with the span of
    /// its image (containing the kernel) as a witness.
    pub fn arises_from(&self, h: &FlagSet) -> Result<(bool, SubspaceBasis)> {
        if !self.geometry.is_geometric_hyperplane(h) {
            return Err(Error::NotAHyperplane);
        }
        let span = self.span_of(h);
        Ok((span.dim() + 1 == self.ambient.dim(), span))
    }

    /// [`Embedding::arises_from`] without the witness; stops as soon as the span fills the ambient.
    pub fn arises(&self, h: &FlagSet) -> Result<bool> {
        if !self.geometry.is_geometric_hyperplane(h) {
            return Err(Error::NotAHyperplane);
        }
        let f = self.geometry.field();
        let full = self.ambient.dim();
        let mut ech = self.kernel.as_ref().map_or_else(|| Echelon::new(self.ambient.ambient_dim()), Echelon::from_basis);
        for i in h.iter() {
            if ech.insert(f, &self.images[i]) && ech.dim() == full {
                return Ok(false);
            }
        }
        Ok(ech.dim() + 1 == full)
    }

    /// A linear functional on the flat matrix space vanishing on `span` but not
    /// on the ambient, when `span` is a hyperplane of the ambient.
    pub fn functional_for(&self, span: &SubspaceBasis) -> Option<Vec<Elem>> {
        if span.dim() + 1 != self.ambient.dim() || !span.is_subspace_of(self.geometry.field(), &self.ambient) {
            return None;
        }
        let f = self.geometry.field();
        annihilator(f, span)
            .rows()
            .iter()
            .find(|phi| self.ambient.rows().iter().any(|r| !dot(f, phi, r).is_zero()))
            .cloned()
    }

    /// The flags whose image lies in the kernel of the functional `phi`.
    pub fn preimage_hyperplane(&self, phi: &[Elem]) -> Result<FlagSet> {
        let f = self.geometry.field();
        let d = self.ambient.ambient_dim();
        if phi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: phi.len() });
        }
        if self.ambient.rows().iter().all(|r| dot(f, phi, r).is_zero()) {
            return Err(Error::ZeroFunctional);
        }
        if let Some(k) = &self.kernel {
            if k.rows().iter().any(|r| !dot(f, phi, r).is_zero()) {
                return Err(Error::FunctionalNotOnQuotient);
            }
        }
        Ok(FlagSet::from_fn(self.images.len(), |i| dot(f, phi, &self.images[i]).is_zero()))
    }

    fn secants(&self) -> &SecantIndex {
        self.secants.get_or_init(|| {
            let f = self.geometry.field();
            let mut points = HashMap::new();
            let n = self.raw.len();
            for p in 0..n {
                points.entry(self.raw[p].clone()).or_insert((p, p));
            }
            for p in 0..n {
                for q in p + 1..n {
                    for lambda in f.nonzero_elements() {
                        let mut v: Vec<Elem> =
                            self.raw[p].iter().zip(&self.raw[q]).map(|(&a, &b)| f.mul_add(a, lambda, b)).collect();
                        normalize_projective(f, &mut v);
                        points.entry(v).or_insert((p, q));
                    }
                }
            }
            SecantIndex { points }
        })
    }

    /// Checks that `k` meets no secant of the image; returns the combined kernel.
    fn validate_kernel(&self, k: &SubspaceBasis) -> Result<SubspaceBasis> {
        let f = self.geometry.field();
        if !k.is_subspace_of(f, &self.ambient) {
            return Err(Error::KernelNotInAmbient);
        }
        let combined = match &self.kernel {
            Some(k0) => k0.sum(f, k)?,
            None => k.clone(),
        };
        let secants = self.secants();
        for point in combined.projective_points(f) {
            if let Some(&(p, q)) = secants.points.get(&point) {
                return Err(Error::QuotientViolation(p, q));
            }
        }
        Ok(combined)
    }

    /// The quotient embedding `self / k`.
    pub fn quotient(&self, k: &SubspaceBasis) -> Result<Embedding<'g>> {
        let combined = self.validate_kernel(k)?;
        let f = self.geometry.field();
        let images = self
            .raw
            .iter()
            .map(|r| {
                let mut v = r.clone();
                combined.reduce(f, &mut v);
                normalize_projective(f, &mut v);
                v
            })
            .collect();
        Ok(Embedding {
            geometry: self.geometry,
            sigma: self.sigma,
            ambient: self.ambient.clone(),
            raw: self.raw.clone(),
            kernel: Some(combined),
            images,
            secants: OnceLock::new(),
        })
    }

    /// Rank criterion and direct secant test for a candidate kernel.
    pub fn kernel_verdict(&self, k: &SubspaceBasis) -> KernelVerdict {
        let f = self.geometry.field();
        let min_rank = k
            .projective_points(f)
            .into_iter()
            .map(|v| crate::linalg::rank(f, &MatrixVec::from_flat(v).expect("square")))
            .min();
        KernelVerdict {
            min_rank,
            rank_criterion: min_rank.is_none_or(|r| r >= 3),
            direct: self.validate_kernel(k).is_ok(),
        }
    }

    /// Whether `k` defines a quotient of this embedding, decided by the direct
    /// secant test. The rank criterion is reported by [`Embedding::kernel_verdict`].
    pub fn kernel_defines_quotient(&self, k: &SubspaceBasis) -> bool {
        self.validate_kernel(k).is_ok()
    }

    /// Whether `k` meets the secant through the images of flags `p` and `q`,
    /// by comparing dimensions of spans (an oracle for [`Embedding::quotient`]).
    pub fn secant_meets_kernel(&self, k: &SubspaceBasis, p: usize, q: usize) -> bool {
        let f = self.geometry.field();
        let d = self.ambient.ambient_dim();
        let pair = span_basis(f, d, [&self.raw[p], &self.raw[q]]).expect("same ambient");
        let all = pair.sum(f, k).expect("same ambient");
        all.dim() < pair.dim() + k.dim()
    }

    pub fn to_json(&self) -> Value {
        let f = self.geometry.field();
        let size = self.geometry.n() + 1;
        json!({
            "sigma": self.sigma.frobenius_power,
            "ambient_dim": self.ambient.dim(),
            "kernel": self.kernel.as_ref().map(|k| k.to_json(f)),
            "images": self.images.iter().map(|m| {
                m.chunks(size).map(|row| vector_to_json(f, row)).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelVerdict {
    /// Least rank of a non-zero matrix of the kernel (`None` for the zero subspace).
    pub min_rank: Option<usize>,
    /// Every non-zero matrix has rank at least 3.
    pub rank_criterion: bool,
    /// No secant of the image meets the kernel.
    pub direct: bool,
}
