//! Exit criteria. Each test prints one `criterion N: PASS|FAIL` line.

use std::time::{Duration, Instant};

use fglab::embed::embed_sigma;
use fglab::flaggeom::{build_geometry, Geometry};
use fglab::gf::{make_field, Automorphism};
use fglab::hyper::{verify_cross_twist, verify_hyperscan, verify_main1, verify_quot2, verify_v_lemmas, CampaignOptions};
use fglab::report::Report;
use fglab::semipoly::{check_class_invariants, verify_identity_principle, SemiPolyConfig};

const SEED: u64 = 20_240_601;
const CROSS_TWIST_SAMPLE: usize = 200;
const EXTRA_DISTANCE3_PAIRS: usize = 5;
const IDENTITY_CASES: usize = 10_000;

fn plane(p: u32, k: u32) -> Geometry {
    build_geometry(2, &make_field(p, k, None).unwrap()).unwrap()
}

fn verdict(n: u32, ok: bool, elapsed: Duration, bound: Duration, detail: &str) {
    let within = elapsed < bound;
    let pass = ok && within;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        bound.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(within, "criterion {n} exceeded its time bound");
}

fn failure_summary(r: &Report) -> String {
    let checks: std::collections::BTreeSet<&str> = r.failures.iter().map(|f| f.check.as_str()).collect();
    format!("{} checks, {} failures {:?}", r.checked_count, r.failures.len(), checks)
}

#[test]
fn criterion_1_geometry_sanity() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, k, flags) in [(2, 1, 21), (3, 1, 52), (2, 2, 105)] {
        let g = plane(p, k);
        let q = g.field().order();
        ok &= g.num_flags() == flags;
        ok &= g.lines().iter().all(|l| l.members.len() == q + 1);
        for a in 0..g.num_flags() {
            let bfs = g.bfs_distances(a);
            ok &= (0..g.num_flags()).all(|b| g.distance(a, b) == bfs[b]);
        }
        ok &= g.diameter() == 3;
        detail.push(format!("q={q}: {} flags", g.num_flags()));
    }
    verdict(1, ok, start.elapsed(), Duration::from_secs(10), &detail.join(", "));
}

#[test]
fn criterion_2_embedding_dimensions() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, k) in [(2, 2), (2, 3)] {
        let g = plane(p, k);
        for sigma in g.field().automorphisms() {
            let dim = embed_sigma(&g, sigma).unwrap().image_span_dim();
            let expected = if sigma.is_identity() { 8 } else { 9 };
            ok &= dim == expected;
            detail.push(format!("GF({}) {sigma}: {dim}", g.field().order()));
        }
    }
    verdict(2, ok, start.elapsed(), Duration::from_secs(5), &detail.join(", "));
}

fn main1_gf4() -> Report {
    let g = plane(2, 2);
    verify_main1(&g, &CampaignOptions { seed: SEED, ..Default::default() }).unwrap()
}

#[test]
fn criterion_3_twisted_hyperplane_campaign() {
    let start = Instant::now();
    let r = main1_gf4();
    let exhaustive = ["matrix_mode_id", "matrix_mode_frob"].iter().all(|k| r.parameters[*k] == "exhaustive");
    let ok = r.passed()
        && exhaustive
        && r.count("quasi_singular_specs") == 441
        && r.count("quasi_singular_arisings") == 882
        && r.count("non_quasi_singular_multi_twist") == 0;
    let detail = format!(
        "{} quasi-singular specs, {} matrix specs, {}",
        r.count("quasi_singular_specs"),
        r.count("matrix_specs"),
        failure_summary(&r)
    );
    verdict(3, ok, start.elapsed(), Duration::from_secs(600), &detail);
}

#[test]
fn criterion_4_cross_twist_rank_one() {
    let start = Instant::now();
    let g = plane(2, 2);
    let r = verify_cross_twist(&g, &CampaignOptions { sample: CROSS_TWIST_SAMPLE, seed: SEED, ..Default::default() })
        .unwrap();
    let ok = r.passed() && r.count("cross_twist_problems") == 2 * CROSS_TWIST_SAMPLE as u64;
    let detail = format!("{} solutions found, {}", r.count("solutions_found"), failure_summary(&r));
    verdict(4, ok, start.elapsed(), Duration::from_secs(900), &detail);
}

#[test]
fn criterion_5_v_lemmas() {
    let start = Instant::now();
    let g = plane(2, 2);
    let (id, frob) = (Automorphism::IDENTITY, Automorphism::frobenius(1));
    let mut ok = true;
    let mut detail = Vec::new();
    for (sigma, rho) in [(frob, id), (id, frob)] {
        let r = verify_v_lemmas(&g, sigma, rho, EXTRA_DISTANCE3_PAIRS, SEED).unwrap();
        ok &= r.passed() && r.count("v0_pairs") == 1 + EXTRA_DISTANCE3_PAIRS as u64;
        ok &= r.count("v2_constructions") == r.count("v1_matrix_choices");
        detail.push(format!("({sigma},{rho}): {}", failure_summary(&r)));
    }
    verdict(5, ok, start.elapsed(), Duration::from_secs(120), &detail.join("; "));
}

#[test]
fn criterion_6_polarized_quotients() {
    let start = Instant::now();
    let opts = CampaignOptions { sample: 200, seed: SEED, ..Default::default() };
    let gf3 = verify_quot2(&plane(3, 1), &opts).unwrap();
    let gf2 = verify_quot2(&plane(2, 1), &opts).unwrap();
    let gf4 = verify_quot2(&plane(2, 2), &opts).unwrap();
    let ok = gf3.passed()
        && gf3.count("polarized_sigma_0") == 1
        && gf2.passed()
        && gf2.count("polarized_sigma_0") == 0
        && gf4.passed()
        && gf4.count("polarized_sigma_1") == 0;
    let detail = format!(
        "GF(3) id: {}, GF(2) id: {}, GF(4) frob: {}; {} / {} / {}",
        gf3.count("polarized_sigma_0"),
        gf2.count("polarized_sigma_0"),
        gf4.count("polarized_sigma_1"),
        failure_summary(&gf3),
        failure_summary(&gf2),
        failure_summary(&gf4)
    );
    verdict(6, ok, start.elapsed(), Duration::from_secs(300), &detail);
}

#[test]
fn criterion_7_hyperplane_maximality() {
    let start = Instant::now();
    let r = verify_hyperscan(&plane(2, 1)).unwrap();
    let detail = format!(
        "{} hyperplanes, {} maximal and arising, {}",
        r.count("hyperplanes"),
        r.count("maximal_and_arising"),
        failure_summary(&r)
    );
    verdict(7, r.passed() && r.count("hyperplanes") > 0, start.elapsed(), Duration::from_secs(600), &detail);
}

#[test]
fn criterion_8_identity_principle() {
    let start = Instant::now();
    let fields = [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2)].map(|(p, k)| make_field(p, k, None).unwrap());
    let cfg = SemiPolyConfig { max_unknowns: 2, max_monomials: 5 };
    let witnesses = verify_identity_principle(&fields, IDENTITY_CASES, &cfg, SEED).unwrap();
    let invariants = check_class_invariants(&fields).unwrap();
    let ok = witnesses.passed()
        && witnesses.count("polynomials") == IDENTITY_CASES as u64
        && witnesses.checked_count == IDENTITY_CASES as u64
        && invariants.passed();
    let detail =
        format!("witness campaign: {}; invariant suite: {}", failure_summary(&witnesses), failure_summary(&invariants));
    verdict(8, ok, start.elapsed(), Duration::from_secs(300), &detail);
}

#[test]
fn criterion_9_determinism() {
    let start = Instant::now();
    let first = main1_gf4().to_json_string();
    let second = main1_gf4().to_json_string();
    let ok = first == second && !first.contains("elapsed");
    verdict(9, ok, start.elapsed(), Duration::from_secs(1200), &format!("{} bytes", first.len()));
}
