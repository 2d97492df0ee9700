//! Subcommand implementations. Each returns a JSON document, its table
//! rendering and whether every check it ran passed.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use colorweyl::fock::{enumerate_states, FockMonomial, FockVector};
use colorweyl::gram::{check_positive, gram_matrix, inner, numeric_entries, permutation_sum};
use colorweyl::oracle::{compare_symbolic, verify_relations, DEFAULT_DIMENSION_BOUND};
use colorweyl::sample;
use colorweyl::statistics::{eval_factor, factorize};
use colorweyl::superize::{check_word_embedding, superization_report, Superization};
use colorweyl::weyl::rewrite::ConfluenceChecker;
use colorweyl::weyl::{normal_form, Generator, WeylElement, WordExpr};
use colorweyl::{CommutationFactor, PhaseScalar};
use itertools::Itertools;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, Session};
use crate::parse::{parse_words, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(String),
}

fn engine<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Engine(e.to_string())
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: String,
    pub passed: bool,
}

fn neg_one() -> PhaseScalar {
    PhaseScalar::from_integer(-1)
}

// "lhs - p rhs" with the sign folded into ±1 coefficients
fn combo(lhs: &str, p: &PhaseScalar, rhs: &str) -> String {
    if p.is_one() {
        format!("{lhs} - {rhs}")
    } else if (-p).is_one() {
        format!("{lhs} + {rhs}")
    } else {
        format!("{lhs} - ({p}) {rhs}")
    }
}

fn word(ws: &[Generator]) -> WordExpr {
    WordExpr::word(ws.to_vec(), PhaseScalar::one())
}

fn relation_holds(c: &Arc<CommutationFactor>, x: &WordExpr) -> Result<bool, CliError> {
    Ok(x.normal_form(c).map_err(engine)?.is_zero())
}

/// The defining relations instantiated for the session factor, each checked
/// by normal ordering.
pub fn relations(s: &Session) -> Result<Report, CliError> {
    use Generator::{Annihilate as A, Create as C};
    let c = &s.factor;
    let n = c.dim();
    let mut rows: Vec<(&str, String, WordExpr)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = c.entry(j, i);
            let text = combo(&format!("T*{} T{}", i + 1, j + 1), p, &format!("T{} T*{}", j + 1, i + 1));
            let delta = if i == j { "1" } else { "0" };
            let mut x =
                word(&[A(i), C(j)]).add(&word(&[C(j), A(i)]).scale(&-p.clone()).map_err(engine)?).map_err(engine)?;
            if i == j {
                x = x.add(&WordExpr::word(vec![], neg_one())).map_err(engine)?;
            }
            rows.push(("exchange", format!("{text} = {delta}"), x));
        }
    }
    for (family, make) in [("creators", C as fn(usize) -> Generator), ("annihilators", A as fn(usize) -> Generator)] {
        for i in 0..n {
            for j in i + 1..n {
                let p = c.entry(i, j);
                let (gi, gj) = (make(i), make(j));
                let text = combo(&format!("{gi} {gj}"), p, &format!("{gj} {gi}"));
                let x = word(&[gi, gj]).add(&word(&[gj, gi]).scale(&-p.clone()).map_err(engine)?).map_err(engine)?;
                rows.push((family, format!("{text} = 0"), x));
            }
        }
    }
    for i in (0..n).filter(|&i| c.is_nilpotent(i)) {
        for g in [C(i), A(i)] {
            rows.push(("nilpotent", format!("{g} {g} = 0"), word(&[g, g])));
        }
    }
    let mut out = Vec::new();
    let mut table = String::new();
    for (family, text, x) in rows {
        let holds = relation_holds(c, &x)?;
        let _ = writeln!(table, "{text}");
        out.push(json!({"family": family, "relation": text, "holds": holds}));
    }
    let passed = out.iter().all(|r| r["holds"] == true);
    Ok(Report { json: json!({"N": n, "relations": out, "passed": passed}), table, passed })
}

pub fn normalize(s: &Session, text: &str) -> Result<Report, CliError> {
    let words = parse_words(text, s.factor.dim())?;
    let x = words.normal_form(&s.factor).map_err(engine)?;
    let nf = x.to_string();
    Ok(Report {
        json: json!({"input": text, "normal_form": nf, "degree": x.degree()}),
        table: format!("{nf}\n"),
        passed: true,
    })
}

pub fn parse_state(text: &str, c: &CommutationFactor) -> Result<FockMonomial, CliError> {
    let occ: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("invalid occupation `{t}` in --state"))))
        .collect::<Result<_, _>>()?;
    if occ.len() != c.dim() {
        return Err(CliError::Usage(format!("--state has {} entries, expected N = {}", occ.len(), c.dim())));
    }
    if let Some(i) = (0..c.dim()).find(|&i| c.is_nilpotent(i) && occ[i] > 1) {
        return Err(CliError::Usage(format!("mode {} is nilpotent; occupation {} is not allowed", i + 1, occ[i])));
    }
    Ok(FockMonomial(occ))
}

#[derive(Serialize)]
struct FockTerm {
    occupation: FockMonomial,
    coefficient: PhaseScalar,
}

pub fn act(s: &Session, text: &str, state: Option<&str>) -> Result<Report, CliError> {
    let c = &s.factor;
    let x = parse_words(text, c.dim())?.normal_form(c).map_err(engine)?;
    let m = match state {
        Some(t) => parse_state(t, c)?,
        None => FockMonomial::vacuum(c.dim()),
    };
    let f = FockVector::basis(c, m.clone()).act(&x).map_err(engine)?;
    let terms: Vec<FockTerm> =
        f.terms().map(|(m, x)| FockTerm { occupation: m.clone(), coefficient: x.clone() }).collect();
    let json = json!({"expression": x.to_string(), "state": m, "result": f.to_string(), "terms": terms});
    Ok(Report { json, table: format!("{f}\n"), passed: true })
}

/// Reads `2`, `3/2` or `2*Phi0` as a multiple of the flux quantum.
pub fn parse_field(text: &str) -> Result<BigRational, CliError> {
    let t = text.trim();
    let t = t.strip_suffix("*Phi0").or_else(|| t.strip_suffix("Phi0")).unwrap_or(t).trim();
    let bad = || CliError::Usage(format!("invalid field `{text}`; expected a rational multiple of Phi0"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den == 0.into() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn states(s: &Session, field: &BigRational, include_vacuum: bool) -> Result<Report, CliError> {
    let rows: Vec<_> = enumerate_states(&s.factor, field, s.config.cap)
        .into_iter()
        .filter(|r| include_vacuum || r.monomial.degree() > 0)
        .collect();
    let mut table = String::from("occupation\tm\tn\tnu_prime\tb_eff\tcolumn_rep_zero\n");
    let json_rows = serde_json::to_value(&rows).map_err(engine)?;
    for r in json_rows.as_array().expect("array") {
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r["occupation"],
            r["m"],
            r["n"],
            r["nu_prime"].as_str().unwrap_or(""),
            r["b_eff"].as_str().unwrap_or(""),
            r["column_rep_zero"]
        );
    }
    let b = if field.is_integer() { field.numer().to_string() } else { format!("{}/{}", field.numer(), field.denom()) };
    Ok(Report { json: json!({"B": format!("{b}*Phi0"), "states": json_rows}), table, passed: true })
}

pub fn gram(s: &Session, degree: u32, csv_path: Option<&Path>) -> Result<Report, CliError> {
    let g = gram_matrix(degree, &s.factor, s.config.cap).map_err(engine)?;
    let r = g.check_positive(s.config.precision).map_err(engine)?;
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).map_err(engine)?;
        for row in numeric_entries(&g.entries, s.config.precision) {
            w.write_record(row.iter().map(|(re, im)| format!("{re}{im:+}i"))).map_err(engine)?;
        }
        w.flush().map_err(engine)?;
    }
    let mut table = format!("degree {degree}, basis {}\n", g.basis.len());
    for (m, row) in g.basis.iter().zip(&g.entries) {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(table, "{m}\t{}", cells.join("\t"));
    }
    let _ = writeln!(table, "verdict: {}", serde_json::to_value(r.verdict).map_err(engine)?.as_str().unwrap_or(""));
    let passed = r.verdict != colorweyl::gram::Verdict::Indefinite;
    Ok(Report { json: json!({"gram": g, "positivity": r}), table, passed })
}

pub fn superize(s: &Session) -> Result<Report, CliError> {
    let r = superization_report(&s.factor).map_err(engine)?;
    let mut table = String::new();
    for (name, m) in [("c'", &r.c_prime), ("b", &r.b)] {
        let _ = writeln!(table, "{name}:");
        for row in m {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(table, "  {}", cells.join("\t"));
        }
    }
    for v in r.relations.iter().chain(&r.comultiplication) {
        let _ = writeln!(table, "{} {}", if v.holds { "PASS" } else { "FAIL" }, v.relation);
    }
    let passed = r.passed;
    Ok(Report { json: serde_json::to_value(&r).map_err(engine)?, table, passed })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Random homogeneous triples and random grade pairs.
    pub samples: usize,
    /// Random words for the confluence suite.
    pub words: usize,
    pub max_degree: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 100, words: 500, max_degree: 3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

const MAX_LISTED_FAILURES: usize = 5;

struct Acc {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
    failed: usize,
}

impl Acc {
    fn new(name: &'static str) -> Self {
        Acc { name, checks: 0, failures: Vec::new(), failed: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn finish(self) -> Suite {
        Suite { name: self.name, passed: self.failed == 0, checks: self.checks, failures: self.failures }
    }
}

fn lemma_suite(c: &Arc<CommutationFactor>, cap: u32) -> Result<Suite, CliError> {
    let mut acc = Acc::new("relation_lemma");
    let r = verify_relations(c, cap).map_err(engine)?;
    for chk in &r.checks {
        acc.check(chk.holds, || chk.relation.clone());
    }
    Ok(acc.finish())
}

fn jacobi_suite(c: &Arc<CommutationFactor>, o: &VerifyOptions, seed: u64, cap: u32) -> Result<Suite, CliError> {
    let mut acc = Acc::new("jacobi");
    let gens = Generator::all(c.dim());
    let g = |x: Generator| WeylElement::generator(c, x).map_err(engine);
    for &x in &gens {
        for &y in &gens {
            for &z in &gens {
                let j = WeylElement::check_jacobi(&g(x)?, &g(y)?, &g(z)?).map_err(engine)?;
                acc.check(j.holds, || format!("({x}, {y}, {z})"));
            }
        }
    }
    let mut rng = sample::rng(seed);
    let degree = o.max_degree.max(1) as usize;
    for _ in 0..o.samples {
        let xs: Vec<WordExpr> = (0..3).map(|_| sample::random_homogeneous(&mut rng, c.dim(), degree)).collect();
        let nfs: Vec<WeylElement> = xs.iter().map(|x| x.normal_form(c)).collect::<Result<_, _>>().map_err(engine)?;
        let j = WeylElement::check_jacobi(&nfs[0], &nfs[1], &nfs[2]).map_err(engine)?;
        let label = || format!("({}, {}, {})", xs[0], xs[1], xs[2]);
        acc.check(j.holds, label);
        // each bracket term, normal-ordered against the matrices of its words
        let (x, y, z) = (&xs[0], &xs[1], &xs[2]);
        let terms = [
            x.bracket(&y.bracket(z, c).map_err(engine)?, c).map_err(engine)?,
            x.bracket(y, c).map_err(engine)?.bracket(z, c).map_err(engine)?,
            y.bracket(&x.bracket(z, c).map_err(engine)?, c).map_err(engine)?,
        ];
        for t in &terms {
            let cmp = compare_symbolic(c, t, cap, DEFAULT_DIMENSION_BOUND).map_err(engine)?;
            acc.check(cmp.equal, label);
        }
    }
    Ok(acc.finish())
}

fn confluence_suite(c: &Arc<CommutationFactor>, o: &VerifyOptions, seed: u64, cap: u32) -> Result<Suite, CliError> {
    let mut acc = Acc::new("confluence");
    let mut rng = sample::rng(seed.wrapping_add(1));
    let mut checker = ConfluenceChecker::new(c);
    for _ in 0..o.words {
        let w = sample::random_word(&mut rng, c.dim(), 6);
        let text = || colorweyl::weyl::format_word(&w);
        let unique = checker.check(&w).map_err(engine)?;
        let nf = normal_form(c, &w).map_err(engine)?;
        acc.check(unique.as_ref().is_ok_and(|u| *u == nf), text);
        let cmp = compare_symbolic(c, &word(&w), cap, DEFAULT_DIMENSION_BOUND).map_err(engine)?;
        acc.check(cmp.equal, text);
    }
    Ok(acc.finish())
}

fn inner_suite(c: &Arc<CommutationFactor>, max_len: usize) -> Result<Suite, CliError> {
    let mut acc = Acc::new("inner_product");
    let n = c.dim();
    for len in 0..=max_len.min(n) {
        let words: Vec<Vec<usize>> = (0..n).permutations(len).collect();
        for sigma in &words {
            for tau in &words {
                let f = FockVector::from_word(c, sigma).map_err(engine)?;
                let g = FockVector::from_word(c, tau).map_err(engine)?;
                let lhs = inner(&f, &g).map_err(engine)?;
                let rhs = permutation_sum(sigma, tau, c).map_err(engine)?;
                acc.check(lhs == rhs, || format!("{sigma:?} vs {tau:?}: {lhs} ≠ {rhs}"));
            }
        }
    }
    Ok(acc.finish())
}

fn positivity_suite(c: &Arc<CommutationFactor>, o: &VerifyOptions, precision: usize) -> Result<Suite, CliError> {
    let mut acc = Acc::new("positivity");
    for d in 0..=o.max_degree {
        let g = gram_matrix(d, c, d.max(1)).map_err(engine)?;
        let r = check_positive(&g.entries, precision).map_err(engine)?;
        acc.check(r.verdict != colorweyl::gram::Verdict::Indefinite, || format!("degree {d}: indefinite"));
    }
    Ok(acc.finish())
}

fn superization_suite(c: &Arc<CommutationFactor>, o: &VerifyOptions, seed: u64) -> Result<Suite, CliError> {
    let mut acc = Acc::new("superization");
    let r = superization_report(c).map_err(engine)?;
    for v in r.relations.iter().chain(&r.comultiplication) {
        acc.check(v.holds, || v.relation.clone());
    }
    let sup = Superization::new(c).map_err(engine)?;
    let mut rng = sample::rng(seed.wrapping_add(2));
    for _ in 0..o.samples.min(50) {
        let w = sample::random_word(&mut rng, c.dim(), 4);
        let v = check_word_embedding(&sup, &w).map_err(engine)?;
        acc.check(v.holds, || v.relation.clone());
    }
    Ok(acc.finish())
}

fn factorization_suite(c: &Arc<CommutationFactor>, o: &VerifyOptions, seed: u64) -> Result<Suite, CliError> {
    let mut acc = Acc::new("factorization");
    let (cp, b) = factorize(c).map_err(engine)?;
    let sup = Superization::new(c).map_err(engine)?;
    let mut rng = sample::rng(seed.wrapping_add(3));
    for _ in 0..o.samples {
        let (x, y) = (sample::random_grade(&mut rng, c.dim(), 3), sample::random_grade(&mut rng, c.dim(), 3));
        let (x, y) = (x.with_modulus(c.reduced_modulus()), y.with_modulus(c.reduced_modulus()));
        let lhs = eval_factor(c, &x, &y).map_err(engine)?;
        let split = eval_factor(&cp, &x, &y)
            .map_err(engine)?
            .checked_mul(&eval_factor(&b, &x, &y).map_err(engine)?)
            .map_err(engine)?;
        let crossed = sup.crossing_phase(&x, &y).map_err(engine)?;
        acc.check(lhs == split && lhs == crossed, || format!("c({x}, {y})"));
    }
    Ok(acc.finish())
}

/// Runs every verification suite on the session factor.
pub fn verify(s: &Session, o: &VerifyOptions) -> Result<Report, CliError> {
    let c = &s.factor;
    let seed = s.config.seed;
    let cap = s.config.cap;
    let suites = vec![
        lemma_suite(c, cap)?,
        jacobi_suite(c, o, seed, cap)?,
        confluence_suite(c, o, seed, cap)?,
        inner_suite(c, o.max_degree as usize)?,
        positivity_suite(c, o, s.config.precision)?,
        superization_suite(c, o, seed)?,
        factorization_suite(c, o, seed)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    let mut table = String::new();
    for suite in &suites {
        let _ =
            writeln!(table, "{} {} ({} checks)", if suite.passed { "PASS" } else { "FAIL" }, suite.name, suite.checks);
        for f in &suite.failures {
            let _ = writeln!(table, "    {f}");
        }
    }
    let json = json!({
        "factor": s.config.factor,
        "seed": seed,
        "cap": cap,
        "suites": suites,
        "passed": passed,
    });
    Ok(Report { json, table, passed })
}
