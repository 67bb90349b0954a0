//! Exact linear algebra over a [`Field`].
//!
//! Vectors are columns and functionals are rows, so `xi(x)` is the
//! row-times-column product and `x ⊗ xi` is the column-times-row product.
//! Matrices of order `n + 1` are also handled as flat coordinate vectors of
//! length `(n + 1)^2` (row-major), which is how spans and quotients see them.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{Automorphism, Elem, Field};

/// A column vector of `V = V(n+1, F)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(pub Vec<Elem>);

/// A row vector of the dual space `V*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional(pub Vec<Elem>);

impl Vector {
    pub fn zero(len: usize) -> Self {
        Vector(vec![Elem::ZERO; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[i] = Elem::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Coordinatewise action `x -> x^sigma`.
    pub fn twist(&self, f: &Field, sigma: Automorphism) -> Vector {
        Vector(self.0.iter().map(|&c| f.apply(c, sigma)).collect())
    }
}

impl Functional {
    pub fn zero(len: usize) -> Self {
        Functional(vec![Elem::ZERO; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[i] = Elem::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn twist(&self, f: &Field, sigma: Automorphism) -> Functional {
        Functional(self.0.iter().map(|&c| f.apply(c, sigma)).collect())
    }

    /// The pairing `xi(x)`.
    pub fn eval(&self, f: &Field, x: &Vector) -> Elem {
        dot(f, &self.0, &x.0)
    }
}

/// A square matrix of order `n + 1`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixVec {
    size: usize,
    entries: Vec<Elem>,
}

impl MatrixVec {
    pub fn zero(size: usize) -> Self {
        MatrixVec { size, entries: vec![Elem::ZERO; size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    /// The matrix unit `E_{i,j}`.
    pub fn unit(size: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(size);
        m.set(i, j, Elem::ONE);
        m
    }

    /// Rebuilds a matrix from flat row-major coordinates.
    pub fn from_flat(entries: Vec<Elem>) -> Result<Self> {
        let size = (entries.len() as f64).sqrt().round() as usize;
        if size * size != entries.len() {
            return Err(Error::DimensionMismatch { expected: size * size, found: entries.len() });
        }
        Ok(MatrixVec { size, entries })
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for r in rows {
            if r.len() != size {
                return Err(Error::DimensionMismatch { expected: size, found: r.len() });
            }
            entries.extend_from_slice(r);
        }
        Ok(MatrixVec { size, entries })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.size + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.size + j] = v;
    }

    pub fn as_flat(&self) -> &[Elem] {
        &self.entries
    }

    pub fn into_flat(self) -> Vec<Elem> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, f: &Field, other: &MatrixVec) -> MatrixVec {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        MatrixVec { size: self.size, entries }
    }

    pub fn sub(&self, f: &Field, other: &MatrixVec) -> MatrixVec {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect();
        MatrixVec { size: self.size, entries }
    }

    pub fn scale(&self, f: &Field, s: Elem) -> MatrixVec {
        MatrixVec { size: self.size, entries: self.entries.iter().map(|&a| f.mul(a, s)).collect() }
    }

    pub fn mul(&self, f: &Field, other: &MatrixVec) -> MatrixVec {
        let n = self.size;
        let mut out = MatrixVec::zero(n);
        for i in 0..n {
            for j in 0..n {
                let v = f.sum((0..n).map(|t| f.mul(self.get(i, t), other.get(t, j))));
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn transpose(&self) -> MatrixVec {
        let n = self.size;
        let mut out = MatrixVec::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `M x` for a column vector `x`.
    pub fn apply(&self, f: &Field, x: &Vector) -> Vector {
        Vector((0..self.size).map(|i| dot(f, &self.entries[i * self.size..(i + 1) * self.size], &x.0)).collect())
    }

    /// The scalar `xi M x`.
    pub fn bilinear(&self, f: &Field, xi: &Functional, x: &Vector) -> Elem {
        let n = self.size;
        let mut acc = Elem::ZERO;
        for i in 0..n {
            if xi.0[i].is_zero() {
                continue;
            }
            let row = dot(f, &self.entries[i * n..(i + 1) * n], &x.0);
            acc = f.mul_add(acc, xi.0[i], row);
        }
        acc
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.size).map(|i| self.get(i, j)).collect())
    }

    pub fn to_json(&self, f: &Field) -> Value {
        Value::Array(
            (0..self.size)
                .map(|i| Value::Array((0..self.size).map(|j| f.to_json(self.get(i, j))).collect()))
                .collect(),
        )
    }
}

#[inline]
pub fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| f.mul_add(acc, x, y))
}

/// Scales `v` so that its first non-zero coordinate is 1; returns false for the zero vector.
pub fn normalize_projective(f: &Field, v: &mut [Elem]) -> bool {
    let Some(lead) = v.iter().copied().find(|c| !c.is_zero()) else {
        return false;
    };
    if lead != Elem::ONE {
        let inv = f.inv(lead).expect("non-zero");
        for c in v.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
    true
}

pub fn vector_to_json(f: &Field, v: &[Elem]) -> Value {
    Value::Array(v.iter().map(|&c| f.to_json(c)).collect())
}

/// The column-times-row product `x ⊗ xi`.
pub fn pure_tensor(f: &Field, x: &Vector, xi: &Functional) -> MatrixVec {
    let n = x.len();
    let mut entries = Vec::with_capacity(n * n);
    for &xi_i in &x.0 {
        for &xj in &xi.0 {
            entries.push(f.mul(xi_i, xj));
        }
    }
    MatrixVec { size: n, entries }
}

pub fn trace(f: &Field, m: &MatrixVec) -> Elem {
    f.sum((0..m.size).map(|i| m.get(i, i)))
}

/// The saturation form `trace(XY)`.
pub fn saturation_form(f: &Field, x: &MatrixVec, y: &MatrixVec) -> Result<Elem> {
    if x.size != y.size {
        return Err(Error::DimensionMismatch { expected: x.size, found: y.size });
    }
    Ok(saturation_flat(f, x.size, &x.entries, &y.entries))
}

/// `sum_{i,j} X_{ij} Y_{ji}` on flat coordinates.
pub fn saturation_flat(f: &Field, size: usize, x: &[Elem], y: &[Elem]) -> Elem {
    let mut acc = Elem::ZERO;
    for i in 0..size {
        for j in 0..size {
            let a = x[i * size + j];
            if !a.is_zero() {
                acc = f.mul_add(acc, a, y[j * size + i]);
            }
        }
    }
    acc
}

/// Coefficients `c` with `f(M, X) = sum_t c_t X_t` for flat `X`.
pub fn saturation_functional(m: &MatrixVec) -> Vec<Elem> {
    m.transpose().into_flat()
}

pub fn rank(f: &Field, m: &MatrixVec) -> usize {
    let mut ech = Echelon::new(m.size);
    for i in 0..m.size {
        ech.insert(f, &m.entries[i * m.size..(i + 1) * m.size]);
    }
    ech.dim()
}

/// Incrementally built row-echelon form. Rows are kept in insertion order with
/// normalized pivots; each row is zero on the pivots of the rows before it.
#[derive(Debug, Clone)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_basis(basis: &SubspaceBasis) -> Self {
        Echelon { ambient: basis.ambient_dim, rows: basis.rows.clone(), pivots: basis.pivots.clone() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Reduces `v` in place against every stored row.
    pub fn reduce(&self, f: &Field, v: &mut [Elem]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &r) in v[p..].iter_mut().zip(&row[p..]) {
                if !r.is_zero() {
                    *x = f.mul_add(*x, nc, r);
                }
            }
        }
    }

    pub fn contains(&self, f: &Field, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        w.iter().all(|c| c.is_zero())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, f: &Field, v: &[Elem]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = f.inv(w[p]).expect("non-zero pivot");
        for c in w[p..].iter_mut() {
            *c = f.mul(*c, inv);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    /// Canonical reduced row echelon basis of the span.
    pub fn into_basis(self, f: &Field) -> SubspaceBasis {
        let Echelon { ambient, mut rows, mut pivots } = self;
        // back-substitution: clear every pivot column above and below
        let n = rows.len();
        for i in 0..n {
            let p = pivots[i];
            let pivot_row = rows[i].clone();
            for (j, row) in rows.iter_mut().enumerate() {
                if j == i || row[p].is_zero() {
                    continue;
                }
                let nc = f.neg(row[p]);
                for (x, &r) in row.iter_mut().zip(&pivot_row) {
                    *x = f.mul_add(*x, nc, r);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| pivots[i]);
        let sorted_rows = order.iter().map(|&i| std::mem::take(&mut rows[i])).collect();
        pivots.sort_unstable();
        SubspaceBasis { ambient_dim: ambient, rows: sorted_rows, pivots }
    }
}

/// A subspace given by its canonical reduced row echelon basis, so that two
/// bases are equal exactly when the subspaces are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim)
            .map(|i| {
                let mut r = vec![Elem::ZERO; ambient_dim];
                r[i] = Elem::ONE;
                r
            })
            .collect();
        SubspaceBasis { ambient_dim, rows, pivots: (0..ambient_dim).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v` modulo this subspace.
    pub fn reduce(&self, f: &Field, v: &mut [Elem]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &r) in v.iter_mut().zip(row) {
                *x = f.mul_add(*x, nc, r);
            }
        }
    }

    pub fn contains(&self, f: &Field, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        w.iter().all(|c| c.is_zero())
    }

    pub fn is_subspace_of(&self, f: &Field, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim && self.rows.iter().all(|r| other.contains(f, r))
    }

    pub fn sum(&self, f: &Field, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        span_basis(f, self.ambient_dim, self.rows.iter().chain(other.rows.iter()))
    }

    /// Intersection by the Zassenhaus algorithm.
    pub fn intersect(&self, f: &Field, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        let d = self.ambient_dim;
        if other.ambient_dim != d {
            return Err(Error::AmbientMismatch { expected: d, found: other.ambient_dim });
        }
        let mut ech = Echelon::new(2 * d);
        for r in &self.rows {
            let mut v = r.clone();
            v.extend_from_slice(r);
            ech.insert(f, &v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(Elem::ZERO, d));
            ech.insert(f, &v);
        }
        let inner: Vec<Vec<Elem>> = ech
            .rows
            .iter()
            .zip(&ech.pivots)
            .filter(|(_, &p)| p >= d)
            .map(|(r, _)| r[d..].to_vec())
            .collect();
        span_basis(f, d, inner.iter())
    }

    /// The subspace `{X in self : sum_t phi_t X_t = 0}`.
    pub fn kernel_of(&self, f: &Field, phi: &[Elem]) -> Result<SubspaceBasis> {
        if phi.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: phi.len() });
        }
        let values: Vec<Elem> = self.rows.iter().map(|r| dot(f, phi, r)).collect();
        let Some(j) = values.iter().position(|c| !c.is_zero()) else {
            return Ok(self.clone());
        };
        let inv = f.inv(values[j]).expect("non-zero");
        let gens: Vec<Vec<Elem>> = (0..self.rows.len())
            .filter(|&i| i != j)
            .map(|i| {
                let c = f.neg(f.mul(values[i], inv));
                self.rows[i].iter().zip(&self.rows[j]).map(|(&a, &b)| f.mul_add(a, c, b)).collect()
            })
            .collect();
        span_basis(f, self.ambient_dim, gens.iter())
    }

    /// Linear combination of the basis rows with the given coefficients.
    pub fn combine(&self, f: &Field, coeffs: &[Elem]) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; self.ambient_dim];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (x, &r) in out.iter_mut().zip(row) {
                *x = f.mul_add(*x, c, r);
            }
        }
        out
    }

    /// Canonical representatives of all projective points of the subspace,
    /// ordered by their coefficient tuples.
    pub fn projective_points(&self, f: &Field) -> Vec<Vec<Elem>> {
        let d = self.dim();
        projective_coefficients(f, d).map(|c| self.combine(f, &c)).collect()
    }

    pub fn to_json(&self, f: &Field) -> Value {
        Value::Array(self.rows.iter().map(|r| vector_to_json(f, r)).collect())
    }
}

/// All non-zero coefficient tuples of length `d` whose first non-zero entry is 1,
/// in lexicographic order of packed indices.
pub fn projective_coefficients(f: &Field, d: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let q = f.order();
    let total = (q as u128).pow(d as u32);
    (0..total).filter_map(move |mut idx| {
        let mut v = vec![Elem::ZERO; d];
        for slot in v.iter_mut().rev() {
            *slot = f.elem((idx % q as u128) as usize).expect("in range");
            idx /= q as u128;
        }
        (v.iter().find(|c| !c.is_zero()) == Some(&Elem::ONE)).then_some(v)
    })
}

/// Canonical basis of the span of `vectors` inside `F^ambient_dim`.
pub fn span_basis<I, V>(f: &Field, ambient_dim: usize, vectors: I) -> Result<SubspaceBasis>
where
    I: IntoIterator<Item = V>,
    V: AsRef<[Elem]>,
{
    let mut ech = Echelon::new(ambient_dim);
    for v in vectors {
        let v = v.as_ref();
        if v.len() != ambient_dim {
            return Err(Error::AmbientMismatch { expected: ambient_dim, found: v.len() });
        }
        if ech.dim() < ambient_dim {
            ech.insert(f, v);
        }
    }
    Ok(ech.into_basis(f))
}

/// All coefficient vectors `phi` with `phi . r = 0` for every row `r` of `basis`.
pub fn annihilator(f: &Field, basis: &SubspaceBasis) -> SubspaceBasis {
    let d = basis.ambient_dim();
    let free = (0..d).filter(|c| !basis.pivots().contains(c));
    let gens: Vec<Vec<Elem>> = free
        .map(|j| {
            let mut v = vec![Elem::ZERO; d];
            v[j] = Elem::ONE;
            for (row, &p) in basis.rows().iter().zip(basis.pivots()) {
                v[p] = f.neg(row[j]);
            }
            v
        })
        .collect();
    span_basis(f, d, gens.iter()).expect("consistent dimensions")
}

/// The null-traced matrices `M^0_{n+1}` as a subspace of the flat matrix space.
pub fn null_traced(f: &Field, size: usize) -> SubspaceBasis {
    let mut gens = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i != j {
                gens.push(MatrixVec::unit(size, i, j).into_flat());
            }
        }
    }
    for i in 0..size - 1 {
        let mut m = MatrixVec::unit(size, i, i);
        m.set(i + 1, i + 1, f.neg(Elem::ONE));
        gens.push(m.into_flat());
    }
    span_basis(f, size * size, gens.iter()).expect("consistent dimensions")
}

/// `{X in ambient : f(M, X) = 0}` for the saturation form `f`.
pub fn perp(f: &Field, m: &MatrixVec, ambient: &SubspaceBasis) -> Result<SubspaceBasis> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    if ambient.ambient_dim() != m.size * m.size {
        return Err(Error::DimensionMismatch { expected: m.size * m.size, found: ambient.ambient_dim() });
    }
    ambient.kernel_of(f, &saturation_functional(m))
}

/// Writes `M` as a sum of `rank(M)` matrices of rank 1 using the
/// factorization `M = M[:, pivots] * rref(M)`.
pub fn sum_of_rank_ones(f: &Field, m: &MatrixVec) -> Result<Vec<MatrixVec>> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let n = m.size;
    let rows: Vec<&[Elem]> = (0..n).map(|i| &m.entries[i * n..(i + 1) * n]).collect();
    let rref = span_basis(f, n, rows)?;
    Ok(rref
        .rows()
        .iter()
        .zip(rref.pivots())
        .map(|(r, &p)| pure_tensor(f, &m.column(p), &Functional(r.clone())))
        .collect())
}
