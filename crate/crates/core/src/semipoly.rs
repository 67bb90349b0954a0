//! Semi-polynomials over a finite field.
//!
//! An exponent is a formal sum `γ = Σ k_j·frob^j` with `k_j ≥ 0`, acting by
//! `t^γ = Π (t^{k_j})^{frob^j}` with `t^0 = 1`. Two exponents are congruent when
//! they induce the same function on the field, so a class is stored as its value
//! table together with a representative of least weight `Σ k_j`.

use std::collections::HashSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Automorphism, Elem, Field, FieldParams};
use crate::report::Report;
use crate::rng::SplitMix64;

/// Bound on `q^m` for [`identity_witness`].
pub const DEFAULT_SEARCH_BOUND: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentClass {
    field: FieldParams,
    /// `table[i]` is `t^γ` for the element of index `i`.
    table: Vec<Elem>,
    /// Multiplicity of `frob^j` in a least-weight representative.
    rep: Vec<u32>,
    weight: u32,
}

fn table_of(f: &Field, mult: &[u32]) -> Vec<Elem> {
    f.elements()
        .map(|t| {
            mult.iter().enumerate().fold(Elem::ONE, |acc, (j, &k)| {
                let tk = if k == 0 { Elem::ONE } else { f.pow(t, u64::from(k)) };
                f.mul(acc, f.apply(tk, Automorphism::frobenius(j as u32)))
            })
        })
        .collect()
}

/// Breadth-first search by weight from the empty sum; every class is reached below weight `q`.
fn least_representative(f: &Field, target: &[Elem]) -> (Vec<u32>, u32) {
    let k = f.k() as usize;
    let frob_tables: Vec<Vec<Elem>> = (0..k).map(|j| f.elements().map(|t| f.apply(t, Automorphism::frobenius(j as u32))).collect()).collect();
    let mut level = vec![(vec![Elem::ONE; f.order()], vec![0u32; k])];
    let mut seen: HashSet<Vec<Elem>> = level.iter().map(|(t, _)| t.clone()).collect();
    for weight in 0..f.order() as u32 {
        if let Some((_, rep)) = level.iter().find(|(t, _)| t == target) {
            return (rep.clone(), weight);
        }
        let mut next = Vec::new();
        for (table, rep) in &level {
            for (j, ft) in frob_tables.iter().enumerate() {
                let grown: Vec<Elem> = table.iter().zip(ft).map(|(&a, &b)| f.mul(a, b)).collect();
                if seen.insert(grown.clone()) {
                    let mut r = rep.clone();
                    r[j] += 1;
                    next.push((grown, r));
                }
            }
        }
        level = next;
    }
    unreachable!("every exponent class has a representative of weight below q")
}

impl ExponentClass {
    fn from_table(f: &Field, table: Vec<Elem>) -> Self {
        let (rep, weight) = least_representative(f, &table);
        ExponentClass { field: f.params(), table, rep, weight }
    }

    /// The class of the empty sum: constantly 1, also at 0.
    pub fn zero(f: &Field) -> Self {
        ExponentClass::from_table(f, vec![Elem::ONE; f.order()])
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Multiplicities of a least-weight representative, indexed by Frobenius power.
    pub fn representative(&self) -> &[u32] {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == Elem::ONE)
    }

    pub fn value(&self, t: Elem) -> Elem {
        self.table[t.index()]
    }

    fn check_field(&self, f: &Field) -> Result<()> {
        if self.field != f.params() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }
}

/// The class of `Σ multiplicity·automorphism`; repeated automorphisms accumulate.
pub fn class_of(f: &Field, terms: &[(Automorphism, i64)]) -> Result<ExponentClass> {
    let mut mult = vec![0u32; f.k() as usize];
    for &(sigma, k) in terms {
        f.check_automorphism(sigma)?;
        if k < 0 {
            return Err(Error::NegativeMultiplicity(k));
        }
        let slot = &mut mult[sigma.frobenius_power as usize];
        *slot = u32::try_from(k).ok().and_then(|k| slot.checked_add(k)).ok_or_else(|| {
            Error::Precondition(format!("multiplicity {k} is too large"))
        })?;
    }
    Ok(ExponentClass::from_table(f, table_of(f, &mult)))
}

pub fn class_add(f: &Field, x: &ExponentClass, y: &ExponentClass) -> Result<ExponentClass> {
    x.check_field(f)?;
    y.check_field(f)?;
    let table = x.table.iter().zip(&y.table).map(|(&a, &b)| f.mul(a, b)).collect();
    Ok(ExponentClass::from_table(f, table))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiMonomial {
    pub coeff: Elem,
    pub exponents: Vec<ExponentClass>,
}

impl SemiMonomial {
    /// Sum of the exponent weights; `None` stands for the degree of the null monomial.
    pub fn degree(&self) -> Option<u32> {
        (!self.coeff.is_zero()).then(|| self.exponents.iter().map(ExponentClass::weight).sum())
    }

    fn eval(&self, f: &Field, point: &[Elem]) -> Elem {
        self.exponents.iter().zip(point).fold(self.coeff, |acc, (x, &t)| f.mul(acc, x.value(t)))
    }
}

/// A sum of monomials of pairwise distinct types with non-zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiPolynomial {
    arity: usize,
    monomials: Vec<SemiMonomial>,
}

impl SemiPolynomial {
    /// Merges monomials of equal type and drops zero coefficients; order of first appearance is kept.
    pub fn new(f: &Field, arity: usize, monomials: Vec<SemiMonomial>) -> Result<Self> {
        let mut merged: Vec<SemiMonomial> = Vec::new();
        for m in monomials {
            if m.exponents.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: m.exponents.len() });
            }
            for x in &m.exponents {
                x.check_field(f)?;
            }
            match merged.iter_mut().find(|e| e.exponents == m.exponents) {
                Some(e) => e.coeff = f.add(e.coeff, m.coeff),
                None => merged.push(m),
            }
        }
        merged.retain(|m| !m.coeff.is_zero());
        Ok(SemiPolynomial { arity, monomials: merged })
    }

    pub fn null(arity: usize) -> Self {
        SemiPolynomial { arity, monomials: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> &[SemiMonomial] {
        &self.monomials
    }

    pub fn is_null(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.monomials.iter().filter_map(SemiMonomial::degree).max()
    }

    pub fn eval(&self, f: &Field, point: &[Elem]) -> Result<Elem> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: point.len() });
        }
        Ok(f.sum(self.monomials.iter().map(|m| m.eval(f, point))))
    }

    /// Renders in the input grammar with least-weight exponents.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_null() {
            return "0".into();
        }
        self.monomials
            .iter()
            .map(|m| {
                let factors: Vec<String> = m
                    .exponents
                    .iter()
                    .zip(names)
                    .map(|(x, name)| {
                        let powers: Vec<String> = x
                            .rep
                            .iter()
                            .enumerate()
                            .flat_map(|(j, &k)| std::iter::repeat_n(j.to_string(), k as usize))
                            .collect();
                        format!("{name}{{{}}}", powers.join(","))
                    })
                    .collect();
                format!("{}*{}", m.coeff.index(), factors.join("*"))
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn to_json(&self, f: &Field, names: &[String]) -> Value {
        json!({
            "unknowns": names,
            "expression": self.render(names),
            "degree": self.degree(),
            "monomials": self.monomials.iter().map(|m| json!({
                "coeff": f.to_json(m.coeff),
                "exponents": m.exponents.iter().map(|x| json!({"representative": x.rep, "weight": x.weight})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for SemiPolynomial {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.arity).map(|i| format!("t{i}")).collect();
        fm.write_str(&self.render(&names))
    }
}

pub fn identity_witness(f: &Field, poly: &SemiPolynomial) -> Result<Option<Vec<Elem>>> {
    identity_witness_with_bound(f, poly, DEFAULT_SEARCH_BOUND)
}

/// First point of `F^m` in lexicographic order where `poly` is non-zero.
/// A non-null polynomial without such a point is reported as [`Error::IdentityViolation`].
pub fn identity_witness_with_bound(f: &Field, poly: &SemiPolynomial, bound: u128) -> Result<Option<Vec<Elem>>> {
    let q = f.order() as u128;
    let size = q.checked_pow(poly.arity as u32).unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::SearchSpaceTooLarge { size, bound });
    }
    if poly.is_null() {
        return Ok(None);
    }
    let m = poly.arity;
    let mut digits = vec![0usize; m];
    for _ in 0..size {
        let point: Vec<Elem> = digits.iter().map(|&d| f.elem(d).expect("in range")).collect();
        if !poly.eval(f, &point)?.is_zero() {
            return Ok(Some(point));
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < f.order() {
                break;
            }
            *d = 0;
        }
    }
    Err(Error::IdentityViolation)
}

/// Unknown names in order of first appearance, alongside the parsed polynomial.
pub type Parsed = (SemiPolynomial, Vec<String>);

/// Parses `poly := term ('+' term)*`, `term := [coeff '*'] factor ('*' factor)*`,
/// `factor := ident '{' [int (',' int)*] '}'`. A coefficient is an element index,
/// the integers in braces are Frobenius powers (repeats add up), and `0` alone is
/// the null polynomial.
pub fn parse_semipoly(f: &Field, text: &str) -> Result<Parsed> {
    Parser { f, src: text.as_bytes(), pos: 0, names: Vec::new() }.poly()
}

struct Parser<'a> {
    f: &'a Field,
    src: &'a [u8],
    pos: usize,
    names: Vec<String>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                self.pos += 1;
            }
        }
        if start == self.pos {
            return self.err("expected an unknown");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn poly(mut self) -> Result<Parsed> {
        if self.peek() == Some(b'0') {
            let save = self.pos;
            self.pos += 1;
            if self.peek().is_none() {
                return Ok((SemiPolynomial::null(0), Vec::new()));
            }
            self.pos = save;
        }
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.term()?);
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        let f = self.f;
        let zero = ExponentClass::zero(f);
        let arity = self.names.len();
        let monomials = terms
            .into_iter()
            .map(|(coeff, factors)| {
                let mut mult = vec![vec![0u32; f.k() as usize]; arity];
                for (var, powers) in factors {
                    for p in powers {
                        mult[var][p as usize] += 1;
                    }
                }
                let exponents = mult
                    .iter()
                    .map(|m| if m.iter().all(|&k| k == 0) { zero.clone() } else { ExponentClass::from_table(f, table_of(f, m)) })
                    .collect();
                SemiMonomial { coeff, exponents }
            })
            .collect();
        Ok((SemiPolynomial::new(f, arity, monomials)?, self.names))
    }

    #[allow(clippy::type_complexity)]
    fn term(&mut self) -> Result<(Elem, Vec<(usize, Vec<u32>)>)> {
        let mut coeff = Elem::ONE;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let at = self.pos;
            let c = self.int()?;
            coeff = match usize::try_from(c).ok().and_then(|c| self.f.elem(c)) {
                Some(e) => e,
                None => {
                    self.pos = at;
                    return self.err(format!("coefficient {c} is not an element index below {}", self.f.order()));
                }
            };
            self.expect(b'*')?;
        }
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok((coeff, factors))
    }

    fn factor(&mut self) -> Result<(usize, Vec<u32>)> {
        let name = self.ident()?;
        let var = match self.names.iter().position(|n| *n == name) {
            Some(i) => i,
            None => {
                self.names.push(name);
                self.names.len() - 1
            }
        };
        self.expect(b'{')?;
        let mut powers = Vec::new();
        if self.peek() != Some(b'}') {
            loop {
                let at = self.pos;
                let j = self.int()?;
                if j >= u64::from(self.f.k()) {
                    self.pos = at;
                    return self.err(format!("Frobenius power {j} must be below {}", self.f.k()));
                }
                powers.push(j as u32);
                if self.peek() == Some(b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(b'}')?;
        Ok((var, powers))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiPolyConfig {
    pub max_unknowns: usize,
    pub max_monomials: usize,
}

impl Default for SemiPolyConfig {
    fn default() -> Self {
        SemiPolyConfig { max_unknowns: 2, max_monomials: 5 }
    }
}

/// A seeded non-null semi-polynomial with up to the configured unknowns and
/// monomials; multiplicities are drawn below `q`.
pub fn random_non_null(f: &Field, cfg: &SemiPolyConfig, rng: &mut SplitMix64) -> SemiPolynomial {
    let q = f.order() as u64;
    loop {
        let arity = 1 + rng.index(cfg.max_unknowns);
        let count = 1 + rng.index(cfg.max_monomials);
        let monomials = (0..count)
            .map(|_| {
                let coeff = f.elem(1 + rng.index(f.order() - 1)).expect("in range");
                let exponents = (0..arity)
                    .map(|_| {
                        let mult: Vec<u32> = (0..f.k()).map(|_| rng.below(q) as u32).collect();
                        ExponentClass::from_table(f, table_of(f, &mult))
                    })
                    .collect();
                SemiMonomial { coeff, exponents }
            })
            .collect();
        let poly = SemiPolynomial::new(f, arity, monomials).expect("consistent arity");
        if !poly.is_null() {
            return poly;
        }
    }
}

/// Seeded identity-witness campaign cycling over `fields`.
pub fn verify_identity_principle(fields: &[Field], cases: usize, cfg: &SemiPolyConfig, seed: u64) -> Result<Report> {
    let mut report = Report::new("identity-principle", seed);
    report
        .param("fields", fields.iter().map(|f| json!(f.params())).collect::<Vec<_>>())
        .param("cases", cases as u64)
        .param("max_unknowns", cfg.max_unknowns as u64)
        .param("max_monomials", cfg.max_monomials as u64);
    let mut rng = SplitMix64::new(seed);
    for case in 0..cases {
        let f = &fields[case % fields.len()];
        let poly = random_non_null(f, cfg, &mut rng);
        let outcome = identity_witness(f, &poly);
        let ok = match &outcome {
            Ok(Some(w)) => !poly.eval(f, w)?.is_zero(),
            _ => false,
        };
        report.bump("polynomials", 1);
        report.check(
            "non_null_has_witness",
            ok,
            || json!({"field": f.params(), "polynomial": poly.to_string()}),
            || format!("{outcome:?}"),
        );
    }
    Ok(report)
}

/// Exponent sums with every multiplicity in `0..=q`.
fn small_exponents(f: &Field) -> Vec<Vec<u32>> {
    let k = f.k() as usize;
    let top = f.order() as u32;
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..=top).map(move |m| [v.clone(), vec![m]].concat())).collect();
    }
    out
}

/// Congruence, monoid laws and weight bounds on exhaustive small exponent sets.
pub fn check_class_invariants(fields: &[Field]) -> Result<Report> {
    let mut report = Report::new("exponent-monoid", 0);
    report.param("fields", fields.iter().map(|f| json!(f.params())).collect::<Vec<_>>());
    for f in fields {
        let q = f.order() as u32;
        let fp = || json!(f.params());
        let exps = small_exponents(f);
        let tables: Vec<Vec<Elem>> = exps.iter().map(|m| table_of(f, m)).collect();
        let classes: Vec<ExponentClass> = tables.iter().map(|t| ExponentClass::from_table(f, t.clone())).collect();
        let distinct: Vec<&ExponentClass> = {
            let mut seen = HashSet::new();
            classes.iter().filter(|c| seen.insert(c.table.clone())).collect()
        };
        report.bump("exponent_sums", exps.len() as u64);
        report.bump("classes", distinct.len() as u64);

        for (m, c) in exps.iter().zip(&classes) {
            report.check("weight_below_order", c.weight < q, || json!({"field": fp(), "exponent": m}), || {
                format!("weight {}", c.weight)
            });
            let w: u32 = m.iter().sum();
            report.check("weight_at_most_representative", c.weight <= w, || json!({"field": fp(), "exponent": m}), || {
                format!("class weight {} exceeds {w}", c.weight)
            });
            report.check("representative_in_class", table_of(f, &c.rep) == c.table, || json!({"field": fp(), "exponent": m}), || {
                "least-weight representative has another table".into()
            });
        }

        // congruence: compare each sum to the first of its class, against every shift
        for (i, m) in exps.iter().enumerate() {
            let first = tables.iter().position(|t| *t == tables[i]).expect("present");
            if first == i {
                continue;
            }
            for d in &exps {
                let a: Vec<u32> = m.iter().zip(d).map(|(x, y)| x + y).collect();
                let b: Vec<u32> = exps[first].iter().zip(d).map(|(x, y)| x + y).collect();
                report.check("congruence_preserved_by_sums", table_of(f, &a) == table_of(f, &b), || {
                    json!({"field": fp(), "left": m, "right": exps[first], "shift": d})
                }, || "congruent sums diverge after a shift".into());
            }
        }

        let zero = ExponentClass::zero(f);
        for x in &distinct {
            report.check("zero_is_identity", class_add(f, x, &zero)? == **x, || json!({"field": fp(), "class": x.rep}), || {
                "adding the empty sum changed the class".into()
            });
            for y in &distinct {
                let xy = class_add(f, x, y)?;
                report.check("addition_commutes", xy == class_add(f, y, x)?, || json!({"field": fp()}), || {
                    format!("{:?} + {:?}", x.rep, y.rep)
                });
                for z in &distinct {
                    report.check(
                        "addition_associates",
                        class_add(f, &xy, z)? == class_add(f, x, &class_add(f, y, z)?)?,
                        || json!({"field": fp()}),
                        || format!("{:?}, {:?}, {:?}", x.rep, y.rep, z.rep),
                    );
                }
            }
        }

        // weight of k·id never exceeds k, and drops below k for some k >= q
        let mut strict = false;
        for k in 0..2 * q {
            let c = class_of(f, &[(Automorphism::IDENTITY, i64::from(k))])?;
            report.check("multiple_of_identity_weight", c.weight <= k, || json!({"field": fp(), "k": k}), || {
                format!("weight {}", c.weight)
            });
            strict |= k >= q && c.weight < k;
        }
        report.check("multiple_of_identity_weight_drops", strict, || json!({"field": fp()}), || {
            "no k >= q with weight below k".into()
        });
    }
    Ok(report)
}
