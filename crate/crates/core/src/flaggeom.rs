//! The point-hyperplane flag geometry of PG(n, q).
//!
//! Points of the geometry are incident pairs `(p, H)`. Lines come in two
//! families: the flags `(p, H)` with `p` running over a projective line inside
//! a fixed `H`, and the flags `(p, H)` with `p` fixed and `H` running over the
//! hyperplanes through a fixed sub-hyperplane `L ∋ p`. Everything is indexed
//! in lexicographic order of canonical representatives, so indices (and
//! therefore bitsets and reports) are reproducible.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flagset::FlagSet;
use crate::gf::{Elem, Field};
use crate::linalg::{dot, normalize_projective, projective_coefficients, span_basis, vector_to_json, Functional, SubspaceBasis, Vector};

/// Default bound on the number of flags of a geometry.
pub const DEFAULT_MAX_FLAGS: u64 = 200_000;

const NO_FLAG: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjPoint {
    pub rep: Vector,
    pub index: usize,
}

/// The hyperplane `[Ker(xi)]`, named by its canonical functional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjHyperplane {
    pub rep: Functional,
    pub index: usize,
}

/// An incident point-hyperplane pair, referring to the geometry's point and
/// hyperplane tables by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flag {
    pub point: usize,
    pub hyperplane: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineKind {
    /// Flags `(p, H)` with `p` on the projective line `line` (a 2-space of V) inside `H`.
    PencilOnLine { line: SubspaceBasis, hyperplane: usize },
    /// Flags `(p, H)` with `H ⊇ L`, where `L` is the common kernel of the
    /// 2-space of functionals `dual_line`.
    PencilOnSubHyperplane { dual_line: SubspaceBasis, point: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomLine {
    pub kind: LineKind,
    /// Sorted flag indices.
    pub members: Vec<usize>,
}

/// Base of a maximal singular subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularBase {
    Point(usize),
    Hyperplane(usize),
}

#[derive(Debug, Clone)]
pub struct Geometry {
    field: Field,
    n: usize,
    points: Vec<ProjPoint>,
    hyperplanes: Vec<ProjHyperplane>,
    flags: Vec<Flag>,
    lines: Vec<GeomLine>,
    flag_lines: Vec<Vec<usize>>,
    flag_lookup: Vec<u32>,
    point_keys: HashMap<u64, usize>,
    hyperplane_keys: HashMap<u64, usize>,
}

fn pack(f: &Field, v: &[Elem]) -> u64 {
    v.iter().fold(0u64, |acc, c| acc * f.order() as u64 + c.index() as u64)
}

pub fn build_geometry(n: usize, field: &Field) -> Result<Geometry> {
    build_geometry_with_bound(n, field, DEFAULT_MAX_FLAGS)
}

pub fn build_geometry_with_bound(n: usize, field: &Field, max_flags: u64) -> Result<Geometry> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let q = field.order() as u64;
    let npoints = (0..=n as u32).map(|i| q.pow(i)).sum::<u64>();
    let through = (0..n as u32).map(|i| q.pow(i)).sum::<u64>();
    let nflags = npoints.saturating_mul(through);
    if nflags > max_flags {
        return Err(Error::TooLarge { flags: nflags, bound: max_flags });
    }
    let f = field.clone();
    let reps: Vec<Vec<Elem>> = projective_coefficients(&f, n + 1).collect();
    let points: Vec<ProjPoint> =
        reps.iter().enumerate().map(|(index, r)| ProjPoint { rep: Vector(r.clone()), index }).collect();
    let hyperplanes: Vec<ProjHyperplane> =
        reps.iter().enumerate().map(|(index, r)| ProjHyperplane { rep: Functional(r.clone()), index }).collect();
    let point_keys = reps.iter().enumerate().map(|(i, r)| (pack(&f, r), i)).collect();
    let hyperplane_keys = reps.iter().enumerate().map(|(i, r)| (pack(&f, r), i)).collect();

    let np = points.len();
    let mut flags = Vec::new();
    let mut flag_lookup = vec![NO_FLAG; np * np];
    for p in &points {
        for h in &hyperplanes {
            if dot(&f, &h.rep.0, &p.rep.0).is_zero() {
                flag_lookup[p.index * np + h.index] = flags.len() as u32;
                flags.push(Flag { point: p.index, hyperplane: h.index, index: flags.len() });
            }
        }
    }

    let mut g = Geometry {
        field: f,
        n,
        points,
        hyperplanes,
        flags,
        lines: Vec::new(),
        flag_lines: Vec::new(),
        flag_lookup,
        point_keys,
        hyperplane_keys,
    };
    g.lines = g.enumerate_lines();
    let mut flag_lines = vec![Vec::new(); g.flags.len()];
    for (li, line) in g.lines.iter().enumerate() {
        for &m in &line.members {
            flag_lines[m].push(li);
        }
    }
    g.flag_lines = flag_lines;
    Ok(g)
}

impl Geometry {
    fn enumerate_lines(&self) -> Vec<GeomLine> {
        let f = &self.field;
        let dim = self.n + 1;
        let mut lines = Vec::new();
        // family 1: a projective line inside each hyperplane
        for h in &self.hyperplanes {
            let on: Vec<usize> = (0..self.points.len()).filter(|&p| self.flag_at(p, h.index).is_some()).collect();
            let mut seen = BTreeSet::new();
            for (i, &p) in on.iter().enumerate() {
                for &p2 in &on[i + 1..] {
                    let span = span_basis(f, dim, [&self.points[p].rep.0, &self.points[p2].rep.0]).expect("same ambient");
                    let members: Vec<usize> = span
                        .projective_points(f)
                        .iter()
                        .map(|r| self.flag_at(self.point_of(r).expect("point"), h.index).expect("incident"))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    if seen.insert(members.clone()) {
                        lines.push(GeomLine { kind: LineKind::PencilOnLine { line: span, hyperplane: h.index }, members });
                    }
                }
            }
        }
        // family 2: a pencil of hyperplanes through a sub-hyperplane, at each point
        for p in &self.points {
            let through: Vec<usize> =
                (0..self.hyperplanes.len()).filter(|&h| self.flag_at(p.index, h).is_some()).collect();
            let mut seen = BTreeSet::new();
            for (i, &h) in through.iter().enumerate() {
                for &h2 in &through[i + 1..] {
                    let span = span_basis(f, dim, [&self.hyperplanes[h].rep.0, &self.hyperplanes[h2].rep.0])
                        .expect("same ambient");
                    let members: Vec<usize> = span
                        .projective_points(f)
                        .iter()
                        .map(|r| self.flag_at(p.index, self.hyperplane_of(r).expect("hyperplane")).expect("incident"))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    if seen.insert(members.clone()) {
                        lines.push(GeomLine {
                            kind: LineKind::PencilOnSubHyperplane { dual_line: span, point: p.index },
                            members,
                        });
                    }
                }
            }
        }
        lines
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn hyperplanes(&self) -> &[ProjHyperplane] {
        &self.hyperplanes
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn num_flags(&self) -> usize {
        self.flags.len()
    }

    pub fn flag(&self, i: usize) -> &Flag {
        &self.flags[i]
    }

    pub fn lines(&self) -> &[GeomLine] {
        &self.lines
    }

    /// Indices of the lines through flag `i`.
    pub fn lines_through(&self, i: usize) -> &[usize] {
        &self.flag_lines[i]
    }

    pub fn point_rep(&self, flag: usize) -> &Vector {
        &self.points[self.flags[flag].point].rep
    }

    pub fn hyperplane_rep(&self, flag: usize) -> &Functional {
        &self.hyperplanes[self.flags[flag].hyperplane].rep
    }

    /// Index of the flag `(p, H)`, if `p ∈ H`.
    #[inline]
    pub fn flag_at(&self, point: usize, hyperplane: usize) -> Option<usize> {
        let v = self.flag_lookup[point * self.points.len() + hyperplane];
        (v != NO_FLAG).then_some(v as usize)
    }

    #[inline]
    pub fn incident(&self, point: usize, hyperplane: usize) -> bool {
        self.flag_at(point, hyperplane).is_some()
    }

    /// Index of the projective point spanned by a non-zero vector.
    pub fn point_of(&self, v: &[Elem]) -> Option<usize> {
        let mut w = v.to_vec();
        if w.len() != self.n + 1 || !normalize_projective(&self.field, &mut w) {
            return None;
        }
        self.point_keys.get(&pack(&self.field, &w)).copied()
    }

    pub fn hyperplane_of(&self, xi: &[Elem]) -> Option<usize> {
        let mut w = xi.to_vec();
        if w.len() != self.n + 1 || !normalize_projective(&self.field, &mut w) {
            return None;
        }
        self.hyperplane_keys.get(&pack(&self.field, &w)).copied()
    }

    pub fn empty_set(&self) -> FlagSet {
        FlagSet::new(self.flags.len())
    }

    pub fn all_flags(&self) -> FlagSet {
        FlagSet::full(self.flags.len())
    }

    pub fn collinear(&self, a: usize, b: usize) -> bool {
        let (fa, fb) = (self.flags[a], self.flags[b]);
        a != b && (fa.point == fb.point || fa.hyperplane == fb.hyperplane)
    }

    /// Distance in the collinearity graph, by the incidence rule.
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        let (fa, fb) = (self.flags[a], self.flags[b]);
        if a == b {
            0
        } else if fa.point == fb.point || fa.hyperplane == fb.hyperplane {
            1
        } else if self.incident(fa.point, fb.hyperplane) || self.incident(fb.point, fa.hyperplane) {
            2
        } else {
            3
        }
    }

    /// Breadth-first distances from `source` along the lines of the geometry.
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.flags.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &l in &self.flag_lines[x] {
                for &y in &self.lines[l].members {
                    if dist[y] == u32::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        dist
    }

    /// Diameter of the collinearity graph, by breadth-first search from every flag.
    pub fn diameter(&self) -> u32 {
        (0..self.flags.len()).map(|s| self.bfs_distances(s).into_iter().max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// `M_a = {(a, H) : a ∈ H}` or `M_A = {(p, A) : p ∈ A}`.
    pub fn maximal_singular(&self, base: SingularBase) -> FlagSet {
        let np = self.points.len();
        match base {
            SingularBase::Point(a) => FlagSet::from_indices(self.flags.len(), (0..np).filter_map(|h| self.flag_at(a, h))),
            SingularBase::Hyperplane(h) => {
                FlagSet::from_indices(self.flags.len(), (0..np).filter_map(|p| self.flag_at(p, h)))
            }
        }
    }

    /// Smallest subspace containing `s`: repeatedly adds every line meeting the set in two flags.
    pub fn subspace_closure(&self, s: &FlagSet) -> FlagSet {
        let mut out = s.clone();
        let mut done = vec![false; self.lines.len()];
        let mut work: Vec<usize> = s.iter().collect();
        while let Some(x) = work.pop() {
            for &l in &self.flag_lines[x] {
                if done[l] {
                    continue;
                }
                let members = &self.lines[l].members;
                if members.iter().filter(|&&m| out.contains(m)).count() >= 2 {
                    done[l] = true;
                    for &m in members {
                        if out.insert(m) {
                            work.push(m);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_subspace(&self, s: &FlagSet) -> bool {
        self.lines.iter().all(|l| {
            let c = l.members.iter().filter(|&&m| s.contains(m)).count();
            c <= 1 || c == l.members.len()
        })
    }

    /// Proper subset met by every line in one flag or entirely.
    pub fn is_geometric_hyperplane(&self, s: &FlagSet) -> bool {
        if s.universe() != self.flags.len() || s.is_full() {
            return false;
        }
        self.lines.iter().all(|l| {
            let c = l.members.iter().filter(|&&m| s.contains(m)).count();
            c == 1 || c == l.members.len()
        })
    }

    /// `k` is a proper subset of `s` met by every line inside `s` in one flag or entirely.
    pub fn is_hyperplane_within(&self, k: &FlagSet, s: &FlagSet) -> bool {
        if !k.is_subset(s) || k == s {
            return false;
        }
        self.lines.iter().filter(|l| l.members.iter().all(|&m| s.contains(m))).all(|l| {
            let c = l.members.iter().filter(|&&m| k.contains(m)).count();
            c == 1 || c == l.members.len()
        })
    }

    /// Whether `s` is a maximal proper subspace of the subspace `ambient`:
    /// adjoining any flag of `ambient` outside `s` generates all of `ambient`.
    pub fn is_maximal_subspace(&self, s: &FlagSet, ambient: &FlagSet) -> Result<bool> {
        for set in [s, ambient] {
            if set.universe() != self.flags.len() {
                return Err(Error::FlagSetMismatch { expected: self.flags.len(), found: set.universe() });
            }
            if !self.is_subspace(set) {
                return Err(Error::NotASubspace);
            }
        }
        if !s.is_subset(ambient) || s == ambient {
            return Ok(false);
        }
        Ok(ambient.difference(s).iter().all(|x| {
            let mut t = s.clone();
            t.insert(x);
            self.subspace_closure(&t) == *ambient
        }))
    }

    /// The first pair `(i, j)`, `i < j` in index order, at distance 3.
    pub fn first_distance3_pair(&self) -> Result<(usize, usize)> {
        for i in 0..self.flags.len() {
            for j in i + 1..self.flags.len() {
                if self.distance(i, j) == 3 {
                    return Ok((i, j));
                }
            }
        }
        Err(Error::NoDistance3Pair)
    }

    pub fn flag_to_json(&self, i: usize) -> Value {
        json!({
            "point": vector_to_json(&self.field, &self.point_rep(i).0),
            "hyperplane": vector_to_json(&self.field, &self.hyperplane_rep(i).0),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.params(),
            "n": self.n,
            "flags": (0..self.flags.len()).map(|i| self.flag_to_json(i)).collect::<Vec<_>>(),
            "lines": self.lines.iter().map(|l| l.members.clone()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn geom(p: u32, k: u32, n: usize) -> Geometry {
        build_geometry(n, &make_field(p, k, None).unwrap()).unwrap()
    }

    fn find_flag(g: &Geometry, x: &[i64], xi: &[i64]) -> usize {
        let f = g.field();
        let x: Vec<Elem> = x.iter().map(|&c| f.from_int(c)).collect();
        let xi: Vec<Elem> = xi.iter().map(|&c| f.from_int(c)).collect();
        g.flag_at(g.point_of(&x).unwrap(), g.hyperplane_of(&xi).unwrap()).unwrap()
    }

    #[test]
    fn counts() {
        let g = geom(2, 1, 2);
        assert_eq!(g.num_flags(), 21);
        assert_eq!(g.lines().len(), 14);
        assert!(g.lines().iter().all(|l| l.members.len() == 3));
        assert_eq!(geom(2, 2, 2).num_flags(), 105);
        assert_eq!(geom(2, 1, 3).num_flags(), 105);
    }

    #[test]
    fn small_dimension_and_bound() {
        let f = make_field(2, 1, None).unwrap();
        assert_eq!(build_geometry(1, &f).unwrap_err(), Error::DimensionTooSmall(1));
        assert!(matches!(build_geometry_with_bound(2, &f, 20), Err(Error::TooLarge { flags: 21, .. })));
    }

    #[test]
    fn both_families_through_every_flag() {
        for g in [geom(2, 1, 2), geom(3, 1, 2), geom(2, 1, 3)] {
            for i in 0..g.num_flags() {
                let kinds: Vec<bool> = g
                    .lines_through(i)
                    .iter()
                    .map(|&l| matches!(g.lines()[l].kind, LineKind::PencilOnLine { .. }))
                    .collect();
                assert!(kinds.contains(&true) && kinds.contains(&false));
            }
            let q = g.field().order();
            assert!(g.lines().iter().all(|l| l.members.len() == q + 1));
        }
    }

    #[test]
    fn unique_line_through_collinear_pairs() {
        let g = geom(3, 1, 2);
        for a in 0..g.num_flags() {
            for b in a + 1..g.num_flags() {
                let common = g.lines_through(a).iter().filter(|l| g.lines_through(b).contains(l)).count();
                assert_eq!(common, usize::from(g.collinear(a, b)));
            }
        }
    }

    #[test]
    fn distance_examples() {
        let g = geom(2, 1, 2);
        let a = find_flag(&g, &[1, 0, 0], &[0, 0, 1]);
        let b = find_flag(&g, &[0, 1, 0], &[1, 0, 0]);
        assert!(!g.collinear(a, b));
        assert_eq!(g.distance(a, b), 2);
        assert_eq!(g.distance(a, a), 0);
        let c = find_flag(&g, &[1, 0, 0], &[0, 1, 0]);
        assert_eq!(g.distance(a, c), 1);
        let (i, j) = g.first_distance3_pair().unwrap();
        assert_eq!(g.bfs_distances(i)[j], 3);
    }

    #[test]
    fn rule_distance_matches_bfs() {
        for g in [geom(2, 1, 2), geom(3, 1, 2), geom(2, 2, 2), geom(2, 1, 3)] {
            for s in 0..g.num_flags() {
                let bfs = g.bfs_distances(s);
                for t in 0..g.num_flags() {
                    assert_eq!(g.distance(s, t), bfs[t]);
                }
            }
            assert_eq!(g.diameter(), 3);
        }
    }

    #[test]
    fn maximal_singular_subspaces() {
        let g = geom(2, 1, 2);
        let f = g.field();
        let a = g.point_of(&[Elem::ONE, Elem::ZERO, Elem::ZERO]).unwrap();
        let ma = g.maximal_singular(SingularBase::Point(a));
        assert_eq!(ma.count(), 3);
        assert_eq!(g.maximal_singular(SingularBase::Hyperplane(g.hyperplane_of(&[Elem::ONE, Elem::ZERO, Elem::ZERO]).unwrap())).count(), 3);
        let mut all = Vec::new();
        for p in 0..g.points().len() {
            all.push((0, g.maximal_singular(SingularBase::Point(p))));
            all.push((1, g.maximal_singular(SingularBase::Hyperplane(p))));
        }
        for (fam, m) in &all {
            let members: Vec<usize> = m.iter().collect();
            assert!(members.iter().all(|&x| members.iter().all(|&y| x == y || g.collinear(x, y))));
            for x in m.complement().iter() {
                assert!(members.iter().filter(|&&y| g.collinear(x, y)).count() <= 1);
            }
            for (fam2, m2) in &all {
                if m != m2 {
                    let meet = m.intersection(m2).count();
                    if fam == fam2 {
                        assert_eq!(meet, 0);
                    } else {
                        assert!(meet <= 1);
                    }
                }
            }
        }
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn closure_examples() {
        let g = geom(2, 1, 2);
        let line = &g.lines()[0];
        let two = FlagSet::from_indices(21, line.members[..2].iter().copied());
        assert_eq!(g.subspace_closure(&two), FlagSet::from_indices(21, line.members.iter().copied()));
        assert!(g.subspace_closure(&g.empty_set()).is_empty());
        let full = g.all_flags();
        let line_set = FlagSet::from_indices(21, line.members.iter().copied());
        assert_eq!(g.is_maximal_subspace(&line_set, &full), Ok(false));
        assert_eq!(g.is_maximal_subspace(&two, &full), Err(Error::NotASubspace));
        assert!(!g.is_geometric_hyperplane(&full));
        let a = g.maximal_singular(SingularBase::Point(0));
        assert!(!g.is_geometric_hyperplane(&a));
    }

    #[test]
    fn dump_shape() {
        let g = geom(2, 1, 2);
        let v = g.to_json();
        assert_eq!(v["flags"].as_array().unwrap().len(), 21);
        assert_eq!(v["lines"].as_array().unwrap().len(), 14);
        assert_eq!(v["flags"][0]["point"], json!([[0], [0], [1]]));
    }
}
