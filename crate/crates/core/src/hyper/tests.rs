use std::collections::HashSet;

use super::*;
use crate::embed::embed_sigma;
use crate::flaggeom::build_geometry;
use crate::gf::make_field;
use crate::linalg::{Functional, SubspaceBasis, Vector};

fn geom(p: u32, k: u32) -> Geometry {
    build_geometry(2, &make_field(p, k, None).unwrap()).unwrap()
}

#[test]
fn quasi_singular_sizes_over_gf2() {
    let g = geom(2, 1);
    for a in 0..g.points().len() {
        for h in 0..g.hyperplanes().len() {
            let expected = if g.incident(a, h) { 13 } else { 15 };
            assert_eq!(quasi_singular(&g, a, h).count(), expected);
        }
    }
}

#[test]
fn singular_quasi_singular_is_the_ball_of_radius_two() {
    let g = geom(3, 1);
    for fl in g.flags() {
        let ball = FlagSet::from_fn(g.num_flags(), |j| g.distance(fl.index, j) <= 2);
        assert_eq!(quasi_singular(&g, fl.point, fl.hyperplane), ball);
    }
}

#[test]
fn quasi_singular_pairs_are_hyperplanes_and_distinct() {
    let g = geom(2, 2);
    let index = QuasiSingularIndex::new(&g);
    assert_eq!(index.collisions(), 0);
    assert_eq!(index.len(), 21 * 21);
    for (a, h) in [(0, 0), (3, 7), (20, 1)] {
        assert!(g.is_geometric_hyperplane(&quasi_singular(&g, a, h)));
    }
}

#[test]
fn rank_one_matrix_gives_quasi_singular() {
    // H_{a ⊗ alpha, sigma} = H_{a, [alpha^(sigma^-1)]}
    let g = geom(2, 2);
    let f = g.field();
    for sigma in f.automorphisms() {
        for a in g.points() {
            for alpha in g.hyperplanes() {
                let m = pure_tensor(f, &a.rep, &alpha.rep);
                let h = matrix_hyperplane(&g, &m, sigma).unwrap();
                let back = g.hyperplane_of(&alpha.rep.twist(f, sigma.inverse(f.k())).0).unwrap();
                assert_eq!(h, quasi_singular(&g, a.index, back));
            }
        }
    }
}

#[test]
fn scalar_shift_keeps_identity_hyperplane() {
    let g = geom(3, 1);
    let f = g.field();
    let id = MatrixVec::identity(3);
    for m in canonical_matrices(f, 3, Automorphism::IDENTITY).step_by(97) {
        let h = matrix_hyperplane(&g, &m, Automorphism::IDENTITY).unwrap();
        for l in f.nonzero_elements() {
            assert_eq!(matrix_hyperplane(&g, &m.add(f, &id.scale(f, l)), Automorphism::IDENTITY).unwrap(), h);
            assert_eq!(matrix_hyperplane(&g, &m.scale(f, l), Automorphism::IDENTITY).unwrap(), h);
        }
    }
}

#[test]
fn invalid_matrix_specs_are_rejected() {
    let g = geom(2, 2);
    let f = g.field();
    let frob = Automorphism::frobenius(1);
    assert!(matches!(matrix_hyperplane(&g, &MatrixVec::zero(3), frob), Err(Error::ZeroMatrix)));
    assert!(matches!(
        matrix_hyperplane(&g, &MatrixVec::identity(3), Automorphism::IDENTITY),
        Err(Error::ScalarMatrixWithIdentity)
    ));
    assert!(matrix_hyperplane(&g, &MatrixVec::identity(3), frob).is_ok());
    assert!(matches!(matrix_hyperplane(&g, &MatrixVec::identity(2), frob), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(
        matrix_hyperplane(&g, &MatrixVec::identity(3), Automorphism::frobenius(2)),
        Err(Error::BadAutomorphism { .. })
    ));
    assert!(canonical_matrix(f, &MatrixVec::zero(3), frob).is_err());
}

#[test]
fn canonical_enumeration_is_faithful_over_gf2() {
    // distinct canonical matrices give distinct hyperplanes, and the rank test
    // agrees with recognition by scanning every pair
    let g = geom(2, 1);
    let f = g.field();
    let index = QuasiSingularIndex::new(&g);
    let all: Vec<MatrixVec> = canonical_matrices(f, 3, Automorphism::IDENTITY).collect();
    assert_eq!(all.len() as u128, canonical_matrix_count(2, 3, Automorphism::IDENTITY));
    let mut seen = HashSet::new();
    let mut qs = 0;
    for m in &all {
        assert_eq!(&canonical_matrix(f, m, Automorphism::IDENTITY).unwrap(), m);
        let h = matrix_hyperplane(&g, m, Automorphism::IDENTITY).unwrap();
        assert!(g.is_geometric_hyperplane(&h));
        let recognized = recognize_quasi_singular(&g, &h).unwrap();
        assert_eq!(recognized, index.get(&h));
        assert_eq!(matrix_is_quasi_singular(f, m, Automorphism::IDENTITY), recognized.is_some());
        qs += usize::from(recognized.is_some());
        assert!(seen.insert(h));
    }
    // every pair (a, A) is hit once: 7 points times 7 hyperplanes
    assert_eq!(qs, 49);
}

#[test]
fn twisted_coefficients_evaluate_the_form() {
    let g = geom(2, 2);
    let f = g.field();
    let sigma = Automorphism::frobenius(1);
    let coeffs = twisted_coefficients(&g, sigma);
    let m = MatrixVec::from_rows(&[&[0, 1, 2], &[3, 0, 1], &[2, 2, 0]].map(|r| r.iter().map(|&i| f.elem(i).unwrap()).collect::<Vec<_>>())).unwrap();
    for i in 0..g.num_flags() {
        let x = g.point_rep(i).twist(f, sigma);
        assert_eq!(eval_coeffs(f, &coeffs[i], m.as_flat()), m.bilinear(f, g.hyperplane_rep(i), &x));
    }
}

#[test]
fn cross_twist_solution_for_pure_tensor() {
    let g = geom(2, 2);
    let f = g.field();
    let frob = Automorphism::frobenius(1);
    let a = Vector(vec![f.elem(1).unwrap(), f.elem(2).unwrap(), Elem::ZERO]);
    let alpha = Functional(vec![Elem::ZERO, f.elem(1).unwrap(), f.elem(3).unwrap()]);
    let m = pure_tensor(f, &a, &alpha);
    for (rho, sigma) in [(frob, Automorphism::IDENTITY), (Automorphism::IDENTITY, frob)] {
        let n = solve_cross_twist(&g, &m, rho, sigma).unwrap().expect("quasi-singular target");
        assert_eq!(rank(f, &n), 1);
        assert_eq!(matrix_hyperplane(&g, &n, sigma).unwrap(), matrix_hyperplane(&g, &m, rho).unwrap());
        // oracle: a ⊗ (alpha^(rho^-1))^sigma, up to scalars
        let expected = pure_tensor(f, &a, &alpha.twist(f, rho.inverse(2)).twist(f, sigma));
        assert_eq!(canonical_matrix(f, &n, frob).unwrap(), canonical_matrix(f, &expected, frob).unwrap());
    }
}

#[test]
fn cross_twist_has_no_solution_for_rank_two() {
    let g = geom(2, 2);
    let f = g.field();
    let frob = Automorphism::frobenius(1);
    let mut m = MatrixVec::zero(3);
    m.set(0, 1, Elem::ONE);
    m.set(1, 0, Elem::ONE);
    assert!(!matrix_is_quasi_singular(f, &m, frob));
    assert_eq!(solve_cross_twist(&g, &m, frob, Automorphism::IDENTITY).unwrap(), None);
    assert_eq!(solve_cross_twist(&g, &m, Automorphism::IDENTITY, frob).unwrap(), None);
    assert!(matches!(solve_cross_twist(&g, &m, frob, frob), Err(Error::Precondition(_))));
}

#[test]
fn hyperplane_scan_census_over_gf2() {
    let g = geom(2, 1);
    let found = find_geometric_hyperplanes(&g);
    assert_eq!(found.len(), 255);
    assert!(found.iter().all(|h| g.is_geometric_hyperplane(h)));
    // oracle: all 2^21 subsets
    let brute = (1u32..(1 << 21) - 1)
        .filter(|bits| g.is_geometric_hyperplane(&FlagSet::from_fn(21, |i| bits >> i & 1 == 1)))
        .count();
    assert_eq!(brute, 255);
    let report = verify_hyperscan(&g).unwrap();
    assert_eq!(report.count("maximal_and_arising"), 213);
    assert_eq!(report.failures.iter().filter(|f| f.check == "hyperplane_is_maximal_subspace").count(), 42);
}

#[test]
fn hyperplanes_are_maximal_over_gf3_and_gf4() {
    for (p, k) in [(3, 1), (2, 2)] {
        let g = geom(p, k);
        let all = g.all_flags();
        let e = embed_sigma(&g, Automorphism::IDENTITY).unwrap();
        let mut seen = HashSet::new();
        for phi in SubspaceBasis::full(9).projective_points(g.field()) {
            let Ok(h) = e.preimage_hyperplane(&phi) else { continue };
            if seen.insert(h.clone()) {
                assert!(g.is_maximal_subspace(&h, &all).unwrap());
            }
        }
        // one hyperplane per point of the dual of an 8-dimensional space
        let q = g.field().order();
        assert_eq!(seen.len(), (q.pow(8) - 1) / (q - 1));
    }
}

#[test]
fn quot2_over_gf3_matches_prediction() {
    // p = 3 divides n + 1 = 3
    let g = geom(3, 1);
    let report = verify_quot2(&g, &CampaignOptions { sample: 50, ..Default::default() }).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.count("polarized_sigma_0"), 1);
    assert_eq!(report.count("rank_criterion_converse_exceptions"), 0);
}

#[test]
fn quot2_over_gf4_has_no_polarized_kernel() {
    let g = geom(2, 2);
    let report = verify_quot2(&g, &CampaignOptions { sample: 50, ..Default::default() }).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.count("polarized_sigma_0") + report.count("polarized_sigma_1"), 0);
    // null-traced rank-2 matrices whose 2x2 core is a non-zero scalar lie on no secant
    assert!(report.count("rank_criterion_converse_exceptions") > 0);
}

#[test]
fn rank_two_kernel_off_secants_in_characteristic_two() {
    let g = geom(2, 2);
    let e = embed_sigma(&g, Automorphism::IDENTITY).unwrap();
    let f = g.field();
    let mut m = MatrixVec::zero(3);
    m.set(1, 1, Elem::ONE);
    m.set(2, 2, Elem::ONE);
    let k = crate::linalg::span_basis(f, 9, [m.as_flat()]).unwrap();
    let verdict = e.kernel_verdict(&k);
    assert_eq!(verdict.min_rank, Some(2));
    assert!(!verdict.rank_criterion);
    assert!(verdict.direct);
    for p in 0..g.num_flags() {
        for q in p..g.num_flags() {
            assert!(!e.secant_meets_kernel(&k, p, q));
        }
    }
}

#[test]
fn rank_two_kernel_on_a_secant_in_odd_characteristic() {
    let g = geom(3, 1);
    let e = embed_sigma(&g, Automorphism::IDENTITY).unwrap();
    let f = g.field();
    let mut m = MatrixVec::zero(3);
    m.set(0, 0, Elem::ONE);
    m.set(1, 1, f.neg(Elem::ONE));
    let k = crate::linalg::span_basis(f, 9, [m.as_flat()]).unwrap();
    let verdict = e.kernel_verdict(&k);
    assert!(!verdict.rank_criterion);
    assert!(!verdict.direct);
    assert!(matches!(e.quotient(&k), Err(Error::QuotientViolation(..))));
}

#[test]
fn v0_over_gf2() {
    let g = geom(2, 1);
    let report = verify_v0(&g, 5, 7).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.count("v0_pairs"), 6);
}
