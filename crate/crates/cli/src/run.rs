use fglab::embed::{embed_sigma, Embedding};
use fglab::flaggeom::{build_geometry, Geometry};
use fglab::gf::{make_field, Automorphism, Field};
use fglab::hyper::{
    is_polarized, quasi_singular, verify_cross_twist, verify_hyperscan, verify_main1,
    verify_quot2, verify_v0, verify_v_lemmas, CampaignOptions,
};
use fglab::linalg::{span_basis, MatrixVec};
use fglab::report::Report;
use fglab::semipoly::{identity_witness, parse_semipoly};
use fglab::Error;
use serde_json::json;

use crate::config::{Command, ConfigError, RunConfig};

/// Largest geometry accepted by `hyperscan`.
const HYPERSCAN_MAX_FLAGS: usize = 128;

fn config_error(e: Error) -> ConfigError {
    let debug = format!("{e:?}");
    let end = debug.find(|c: char| !c.is_alphanumeric()).unwrap_or(debug.len());
    ConfigError::new(&debug[..end], e.to_string())
}

fn field_of(cfg: &RunConfig) -> Result<Field, ConfigError> {
    make_field(cfg.field.p, cfg.field.k, cfg.field.modulus.as_deref()).map_err(config_error)
}

/// Runs the configured campaign. Invalid input of any kind is a [`ConfigError`].
pub fn run(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let field = field_of(cfg)?;
    let opts = CampaignOptions { sample: cfg.sample, seed: cfg.seed, ..Default::default() };
    if let Command::Identity { expr } = &cfg.command {
        return identity(&field, expr, cfg.seed);
    }
    let g = build_geometry(cfg.n, &field).map_err(config_error)?;
    let report = match &cfg.command {
        Command::Geometry { dump } => geometry(&g, *dump, cfg.seed),
        Command::Main1 => verify_main1(&g, &opts),
        Command::Main3 => verify_cross_twist(&g, &opts),
        Command::Vlemmas { sigma, rho, pairs } => {
            if field.k() == 1 {
                verify_v0(&g, *pairs, cfg.seed)
            } else {
                verify_v_lemmas(&g, Automorphism::frobenius(*sigma), Automorphism::frobenius(*rho), *pairs, cfg.seed)
            }
        }
        Command::Quot2 => verify_quot2(&g, &opts),
        Command::Polarized { embedding } => {
            let (sigma, by_identity) = parse_embedding(embedding)?;
            polarized(&g, embedding, sigma, by_identity, cfg.seed)
        }
        Command::Hyperscan => {
            if g.num_flags() > HYPERSCAN_MAX_FLAGS {
                return Err(ConfigError::new(
                    "TooLarge",
                    format!("hyperscan accepts at most {HYPERSCAN_MAX_FLAGS} flags, the geometry has {}", g.num_flags()),
                ));
            }
            verify_hyperscan(&g)
        }
        Command::Identity { .. } => unreachable!("handled above"),
    };
    report.map_err(config_error)
}

fn geometry(g: &Geometry, dump: bool, seed: u64) -> fglab::Result<Report> {
    let mut r = Report::new("geometry", seed);
    r.param("field", json!(g.field().params())).param("n", g.n() as u64);
    r.bump("points", g.points().len() as u64);
    r.bump("hyperplanes", g.hyperplanes().len() as u64);
    r.bump("flags", g.num_flags() as u64);
    r.bump("lines", g.lines().len() as u64);
    let diameter = g.diameter();
    r.bump("diameter", u64::from(diameter));
    for a in 0..g.num_flags() {
        let bfs = g.bfs_distances(a);
        let ok = (0..g.num_flags()).all(|b| g.distance(a, b) == bfs[b]);
        r.check("distance_rule_matches_search", ok, || g.flag_to_json(a), || "rule and search disagree".into());
    }
    r.check("diameter_is_three", diameter == 3, || json!(diameter), || format!("diameter {diameter}"));
    if dump {
        r.witnesses.push(g.to_json());
    }
    Ok(r)
}

/// `natural`, `twist:J`, optionally followed by `/I`.
fn parse_embedding(spec: &str) -> Result<(Automorphism, bool), ConfigError> {
    let bad = || ConfigError::new("BadEmbedding", format!("cannot parse embedding '{spec}'"));
    let (base, quotient) = match spec.split_once('/') {
        Some((b, "I")) => (b, true),
        Some(_) => return Err(bad()),
        None => (spec, false),
    };
    let sigma = match base {
        "natural" => Automorphism::IDENTITY,
        _ => {
            let j = base.strip_prefix("twist:").and_then(|j| j.parse().ok()).ok_or_else(bad)?;
            Automorphism::frobenius(j)
        }
    };
    Ok((sigma, quotient))
}

fn polarized(g: &Geometry, spec: &str, sigma: Automorphism, by_identity: bool, seed: u64) -> fglab::Result<Report> {
    let f = g.field();
    let base = embed_sigma(g, sigma)?;
    let size = g.n() + 1;
    let e: Embedding<'_> = if by_identity {
        let identity = MatrixVec::identity(size);
        base.quotient(&span_basis(f, size * size, [identity.as_flat()])?)?
    } else {
        base
    };
    let mut r = Report::new("quot2", seed);
    r.param("field", json!(f.params())).param("n", g.n() as u64).param("embedding", spec);
    let singular_arising = g
        .flags()
        .iter()
        .map(|fl| e.arises(&quasi_singular(g, fl.point, fl.hyperplane)))
        .collect::<fglab::Result<Vec<bool>>>()?;
    r.bump("singular_hyperplanes", singular_arising.len() as u64);
    r.bump("singular_arising", singular_arising.iter().filter(|&&b| b).count() as u64);
    let found = is_polarized(&e)?;
    // twistings are polarized; a one-dimensional quotient is polarized only for <I> under the identity
    let expected = !by_identity || sigma.is_identity();
    r.param("polarized", found);
    r.check("polarization_as_predicted", found == expected, || json!(spec), || {
        format!("expected polarized={expected}, found {found}")
    });
    Ok(r)
}

fn identity(f: &Field, expr: &str, seed: u64) -> Result<Report, ConfigError> {
    let (poly, names) = parse_semipoly(f, expr).map_err(config_error)?;
    let mut r = Report::new("identity-principle", seed);
    r.param("field", json!(f.params())).param("polynomial", poly.to_json(f, &names));
    let witness = identity_witness(f, &poly);
    match witness {
        Ok(Some(point)) => {
            r.check("non_null_has_witness", true, || json!(null), String::new);
            r.witnesses.push(json!({
                "point": names.iter().zip(&point).map(|(n, &c)| (n.clone(), f.to_json(c))).collect::<serde_json::Map<_, _>>(),
                "value": f.to_json(poly.eval(f, &point).map_err(config_error)?),
            }));
        }
        Ok(None) => r.notes.push("null semi-polynomial: no witness exists".into()),
        Err(Error::IdentityViolation) => r.fail("non_null_has_witness", json!(expr), "vanishes on every point".into()),
        Err(e) => return Err(config_error(e)),
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fglab::hyper::find_geometric_hyperplanes;

    #[test]
    fn embedding_names() {
        assert_eq!(parse_embedding("natural").unwrap(), (Automorphism::IDENTITY, false));
        assert_eq!(parse_embedding("twist:1/I").unwrap(), (Automorphism::frobenius(1), true));
        assert_eq!(parse_embedding("natural/I").unwrap(), (Automorphism::IDENTITY, true));
        for bad in ["twist", "twist:x", "natural/J", "other"] {
            assert_eq!(parse_embedding(bad).unwrap_err().kind, "BadEmbedding");
        }
    }

    #[test]
    fn error_kinds_name_the_variant() {
        assert_eq!(config_error(Error::NonPrime(4)).kind, "NonPrime");
        assert_eq!(config_error(Error::ZeroMatrix).kind, "ZeroMatrix");
        assert_eq!(config_error(Error::BadAutomorphism { power: 3, degree: 2 }).kind, "BadAutomorphism");
    }

    #[test]
    fn scan_guard_allows_the_binary_plane() {
        let g = build_geometry(2, &make_field(2, 1, None).unwrap()).unwrap();
        assert!(g.num_flags() <= HYPERSCAN_MAX_FLAGS);
        assert_eq!(find_geometric_hyperplanes(&g).len(), 255);
    }
}
