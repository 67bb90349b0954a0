use std::collections::BTreeMap;

use serde_json::json;

use crate::embed::embed_sigma;
use crate::error::Result;
use crate::flaggeom::Geometry;
use crate::flagset::FlagSet;
use crate::gf::Automorphism;
use crate::report::Report;

const UNKNOWN: u8 = 2;

/// Assigns `flag := value` and propagates the line rule (one member or all).
/// Returns false on a contradiction.
fn assign(g: &Geometry, state: &mut [u8], flag: usize, value: u8) -> bool {
    let mut queue = vec![(flag, value)];
    while let Some((x, v)) = queue.pop() {
        match state[x] {
            UNKNOWN => state[x] = v,
            s if s == v => continue,
            _ => return false,
        }
        for &li in g.lines_through(x) {
            let members = &g.lines()[li].members;
            let (mut inside, mut outside) = (0, 0);
            for &m in members {
                match state[m] {
                    1 => inside += 1,
                    0 => outside += 1,
                    _ => {}
                }
            }
            let unknown = members.len() - inside - outside;
            let forced = match (inside, outside) {
                (i, o) if i >= 2 && o >= 1 => return false,
                (i, _) if i >= 2 => Some(1),
                (1, o) if o >= 1 => Some(0),
                (0, _) if unknown == 0 => return false,
                (0, _) if unknown == 1 => Some(1),
                _ => None,
            };
            if let Some(fv) = forced {
                queue.extend(members.iter().filter(|&&m| state[m] == UNKNOWN).map(|&m| (m, fv)));
            }
        }
    }
    true
}

fn search(g: &Geometry, state: Vec<u8>, out: &mut Vec<FlagSet>) {
    let Some(next) = state.iter().position(|&s| s == UNKNOWN) else {
        let h = FlagSet::from_fn(state.len(), |i| state[i] == 1);
        if !h.is_full() {
            out.push(h);
        }
        return;
    };
    for value in [1, 0] {
        let mut branch = state.clone();
        if assign(g, &mut branch, next, value) {
            search(g, branch, out);
        }
    }
}

/// Every geometric hyperplane, by backtracking with line propagation, in
/// lexicographic order of membership vectors (members first).
pub fn find_geometric_hyperplanes(g: &Geometry) -> Vec<FlagSet> {
    let mut out = Vec::new();
    search(g, vec![UNKNOWN; g.num_flags()], &mut out);
    out
}

/// Every geometric hyperplane is a maximal subspace and arises from the natural embedding.
pub fn verify_hyperscan(g: &Geometry) -> Result<Report> {
    let f = g.field();
    let e = embed_sigma(g, Automorphism::IDENTITY)?;
    let all = g.all_flags();
    let mut report = Report::new("hyperplane-maximality", 0);
    report.param("field", json!(f.params())).param("n", g.n() as u64);
    let found = find_geometric_hyperplanes(g);
    let mut census: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for h in &found {
        report.bump("hyperplanes", 1);
        let obj = || json!({"size": h.count(), "flags": h});
        report.check("scan_result_is_hyperplane", g.is_geometric_hyperplane(h), obj, || {
            "search returned a non-hyperplane".into()
        });
        let maximal = g.is_maximal_subspace(h, &all)?;
        let (arises, span) = e.arises_from(h)?;
        report.check("hyperplane_is_maximal_subspace", maximal, obj, || "not a maximal subspace".into());
        report.check("hyperplane_arises_from_natural_embedding", arises, obj, || {
            format!("image spans dimension {} of {}", span.dim(), e.ambient().dim())
        });
        let entry = census.entry(h.count()).or_default();
        entry.0 += 1;
        if maximal && arises {
            entry.1 += 1;
            report.bump("maximal_and_arising", 1);
        }
    }
    report.witnesses.push(json!({
        "census": census.iter().map(|(s, (t, ok))| json!({"size": s, "total": t, "maximal_and_arising": ok})).collect::<Vec<_>>()
    }));
    Ok(report)
}
