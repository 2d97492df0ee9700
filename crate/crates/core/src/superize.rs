//! Superization: `c = c′·b` splits `W_{Γ,c}` into the sign-graded algebra
//! `s(W) = W_{Γ,c′}` and the twisted group algebra `C_{Γ,b}(N)`.
//!
//! `C_{Γ,b}(N)` has a basis `E_α`, `α ∈ Γ`, with
//! `E_α E_β = φ(α,β) E_{α+β}` and `φ(α,β) = Π_{i<j} b_ij^{α^i β^j}`, so that
//! `E_α E_β = b(α,β) E_β E_α`. The original generators are recovered inside
//! `s(W) ⊗ C_{Γ,b}(N)` on matched grades as `Θ^i = x^i ⊗ E_{σ_i}` and
//! `Θ*_i = x*_i ⊗ E_{−σ_i}`, multiplied leg by leg.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};
use crate::statistics::{eval_factor, factorize, reduce_group, unit_pow, CommutationFactor, FactorError, GradeVector};
use crate::weyl::rewrite::{redexes, rewrite_at};
use crate::weyl::{accumulate, format_word, Generator, WeylElement, WeylError, WeylMonomial, WordExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuperizeError {
    #[error("operands are governed by different commutation factors")]
    FactorMismatch,
    #[error("grade {0} does not belong to the grading group")]
    ForeignGrade(String),
    #[error("mode {mode} is out of range for N = {dim}")]
    UnknownMode { mode: usize, dim: usize },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The sign part `c′` of `c`; `s(W)` is the Weyl algebra of `c′`.
pub fn superize_factor(c: &CommutationFactor) -> Result<CommutationFactor, FactorError> {
    Ok(factorize(c)?.0)
}

fn same(a: &Arc<CommutationFactor>, b: &Arc<CommutationFactor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `φ(α,β) = Π_{i<j} b_ij^{α^i β^j}`.
pub fn cochain(b: &CommutationFactor, x: &GradeVector, y: &GradeVector) -> Result<PhaseScalar, ScalarError> {
    let (x, y) = (x.coords(), y.coords());
    let mut acc = PhaseScalar::one();
    for i in 0..b.dim() {
        for j in i + 1..b.dim() {
            let e = x[i] * y[j];
            if e != 0 {
                acc = acc.checked_mul(&unit_pow(b.entry(i, j), e)?)?;
            }
        }
    }
    Ok(acc)
}

/// An element `Σ x_α E_α` of `C_{Γ,b}(N)`.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedGroupElement {
    factor: Arc<CommutationFactor>,
    terms: BTreeMap<GradeVector, PhaseScalar>,
}

impl TwistedGroupElement {
    pub fn zero(b: &Arc<CommutationFactor>) -> Self {
        TwistedGroupElement { factor: Arc::clone(b), terms: BTreeMap::new() }
    }

    pub fn one(b: &Arc<CommutationFactor>) -> Self {
        Self::basis(b, b.zero_grade()).expect("zero grade")
    }

    /// `E_α`.
    pub fn basis(b: &Arc<CommutationFactor>, g: GradeVector) -> Result<Self, SuperizeError> {
        if g.dim() != b.dim() || g.modulus() != b.reduced_modulus() {
            return Err(SuperizeError::ForeignGrade(g.to_string()));
        }
        let mut out = Self::zero(b);
        out.terms.insert(g, PhaseScalar::one());
        Ok(out)
    }

    /// `e^i = E_{σ_i}`.
    pub fn e(b: &Arc<CommutationFactor>, i: usize) -> Result<Self, SuperizeError> {
        check_mode(b, i)?;
        Self::basis(b, b.sigma(i))
    }

    /// `e*_i = E_{−σ_i}`, the inverse of `e^i`.
    pub fn e_star(b: &Arc<CommutationFactor>, i: usize) -> Result<Self, SuperizeError> {
        check_mode(b, i)?;
        Self::basis(b, -&b.sigma(i))
    }

    pub fn factor(&self) -> &Arc<CommutationFactor> {
        &self.factor
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GradeVector, &PhaseScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &GradeVector) -> PhaseScalar {
        self.terms.get(g).cloned().unwrap_or_else(PhaseScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SuperizeError> {
        if !same(&self.factor, &other.factor) {
            return Err(SuperizeError::FactorMismatch);
        }
        let mut out = self.clone();
        for (g, x) in &other.terms {
            accumulate(&mut out.terms, g.clone(), x.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, SuperizeError> {
        let mut out = Self::zero(&self.factor);
        for (g, x) in &self.terms {
            accumulate(&mut out.terms, g.clone(), x.checked_mul(s)?)?;
        }
        Ok(out)
    }

    pub fn twisted_multiply(&self, other: &Self) -> Result<Self, SuperizeError> {
        if !same(&self.factor, &other.factor) {
            return Err(SuperizeError::FactorMismatch);
        }
        let mut out = Self::zero(&self.factor);
        for (g, x) in &self.terms {
            for (h, y) in &other.terms {
                let phase = cochain(&self.factor, g, h)?;
                accumulate(&mut out.terms, g + h, x.checked_mul(y)?.checked_mul(&phase)?)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TwistedGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<(String, &PhaseScalar)> = self.terms.iter().map(|(g, x)| (grade_label(g), x)).collect();
        crate::weyl::fmt_linear(f, labels.iter().map(|(l, x)| (l, *x, false)))
    }
}

impl fmt::Debug for TwistedGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedGroupElement({self})")
    }
}

fn grade_label(g: &GradeVector) -> String {
    let coords: Vec<String> = g.coords().iter().map(i64::to_string).collect();
    format!("E({})", coords.join(","))
}

fn check_mode(c: &CommutationFactor, i: usize) -> Result<(), SuperizeError> {
    if i >= c.dim() {
        return Err(SuperizeError::UnknownMode { mode: i + 1, dim: c.dim() });
    }
    Ok(())
}

/// The three factors of a superization, shared by all crossed elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superization {
    pub c: Arc<CommutationFactor>,
    pub c_prime: Arc<CommutationFactor>,
    pub b: Arc<CommutationFactor>,
}

impl Superization {
    pub fn new(c: &Arc<CommutationFactor>) -> Result<Arc<Self>, FactorError> {
        let (cp, b) = factorize(c)?;
        Ok(Arc::new(Superization { c: Arc::clone(c), c_prime: Arc::new(cp), b: Arc::new(b) }))
    }

    /// The phase of `E_α E_β = r·E_β E_α` read off from the twisted product,
    /// times `c′(α,β)`; equals `c(α,β)` when the factorization is sound.
    pub fn crossing_phase(&self, x: &GradeVector, y: &GradeVector) -> Result<PhaseScalar, SuperizeError> {
        let ex = TwistedGroupElement::basis(&self.b, x.clone())?;
        let ey = TwistedGroupElement::basis(&self.b, y.clone())?;
        let sum = x + y;
        let r =
            ex.twisted_multiply(&ey)?.coefficient(&sum).checked_div(&ey.twisted_multiply(&ex)?.coefficient(&sum))?;
        Ok(eval_factor(&self.c_prime, x, y)?.checked_mul(&r)?)
    }
}

/// `Σ s · x ⊗ E_α` with `|x| = α` in every term.
#[derive(Clone, PartialEq, Eq)]
pub struct CrossedElement {
    sup: Arc<Superization>,
    terms: BTreeMap<(WeylMonomial, GradeVector), PhaseScalar>,
}

impl CrossedElement {
    pub fn zero(sup: &Arc<Superization>) -> Self {
        CrossedElement { sup: Arc::clone(sup), terms: BTreeMap::new() }
    }

    pub fn one(sup: &Arc<Superization>) -> Self {
        let mut out = Self::zero(sup);
        out.terms.insert((WeylMonomial::unit(sup.c.dim()), sup.b.zero_grade()), PhaseScalar::one());
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &GradeVector, &PhaseScalar)> {
        self.terms.iter().map(|((m, g), x)| (m, g, x))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term pairs legs of the same grade.
    pub fn grades_match(&self) -> bool {
        self.terms.keys().all(|(m, g)| &m.grade(&self.sup.c_prime) == g)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SuperizeError> {
        if self.sup != other.sup {
            return Err(SuperizeError::FactorMismatch);
        }
        let mut out = self.clone();
        for (k, x) in &other.terms {
            accumulate(&mut out.terms, k.clone(), x.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, SuperizeError> {
        let mut out = Self::zero(&self.sup);
        for (k, x) in &self.terms {
            accumulate(&mut out.terms, k.clone(), x.checked_mul(s)?)?;
        }
        Ok(out)
    }

    /// `(x ⊗ E_α)(y ⊗ E_β) = xy ⊗ E_α E_β`.
    pub fn multiply(&self, other: &Self) -> Result<Self, SuperizeError> {
        if self.sup != other.sup {
            return Err(SuperizeError::FactorMismatch);
        }
        let cp = &self.sup.c_prime;
        let b = &self.sup.b;
        let mut out = Self::zero(&self.sup);
        for ((m, g), x) in &self.terms {
            let left = WeylElement::monomial(cp, m.clone(), x.clone());
            for ((n, h), y) in &other.terms {
                let phase = cochain(b, g, h)?.checked_mul(y)?;
                let xy = left.multiply(&WeylElement::monomial(cp, n.clone(), phase))?;
                let gh = g + h;
                for (k, z) in xy.terms() {
                    accumulate(&mut out.terms, (k.clone(), gh.clone()), z.clone())?;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for CrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<(String, &PhaseScalar)> =
            self.terms.iter().map(|((m, g), x)| (format!("({m})⊗{}", grade_label(g)), x)).collect();
        crate::weyl::fmt_linear(f, labels.iter().map(|(l, x)| (l, *x, false)))
    }
}

impl fmt::Debug for CrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CrossedElement({self})")
    }
}

/// `x^i ⊗ e^i` or `x*_i ⊗ e*_i`.
pub fn crossed_embed(sup: &Arc<Superization>, g: Generator) -> Result<CrossedElement, SuperizeError> {
    let dim = sup.c.dim();
    check_mode(&sup.c, g.mode())?;
    let i = g.mode();
    let mut creators = vec![0; dim];
    let mut annihilators = vec![0; dim];
    let grade = if g.is_creator() {
        creators[i] = 1;
        sup.b.sigma(i)
    } else {
        annihilators[i] = 1;
        -&sup.b.sigma(i)
    };
    let mut out = CrossedElement::zero(sup);
    out.terms.insert((WeylMonomial::new(creators, annihilators), grade), PhaseScalar::one());
    Ok(out)
}

/// The product of the embedded letters of `word`.
pub fn embed_word(sup: &Arc<Superization>, word: &[Generator]) -> Result<CrossedElement, SuperizeError> {
    let mut acc = CrossedElement::one(sup);
    for &g in word {
        acc = acc.multiply(&crossed_embed(sup, g)?)?;
    }
    Ok(acc)
}

pub fn embed_expr(sup: &Arc<Superization>, x: &WordExpr) -> Result<CrossedElement, SuperizeError> {
    let mut acc = CrossedElement::zero(sup);
    for (w, s) in x.terms() {
        acc = acc.checked_add(&embed_word(sup, w)?.scale(s)?)?;
    }
    Ok(acc)
}

/// Image of an element of `W_{Γ,c}` through its normal-ordered monomials.
pub fn embed_element(sup: &Arc<Superization>, x: &WeylElement) -> Result<CrossedElement, SuperizeError> {
    if !same(x.factor(), &sup.c) {
        return Err(SuperizeError::FactorMismatch);
    }
    embed_expr(sup, &WordExpr::from(x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationVerdict {
    pub relation: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<String>,
}

fn verdict(relation: String, diff: String, holds: bool) -> RelationVerdict {
    RelationVerdict { relation, holds, difference: (!holds).then_some(diff) }
}

/// Checks every defining relation of `W_{Γ,c}` on the embedded generators.
pub fn check_crossed_relations(sup: &Arc<Superization>) -> Result<Vec<RelationVerdict>, SuperizeError> {
    let gens = Generator::all(sup.c.dim());
    let mut out = Vec::new();
    for &x in &gens {
        for &y in &gens {
            let w = [x, y];
            if redexes(&sup.c, &w).is_empty() {
                continue;
            }
            let rhs = rewrite_at(&sup.c, &w, 0)
                .into_iter()
                .try_fold(WordExpr::zero(), |acc, (s, v)| acc.add(&WordExpr::word(v, s)))?;
            let diff =
                embed_word(sup, &w)?.checked_add(&embed_expr(sup, &rhs)?.scale(&PhaseScalar::from_integer(-1))?)?;
            let relation = format!("{} = {}", format_word(&w), rhs);
            out.push(verdict(relation, diff.to_string(), diff.is_zero()));
        }
    }
    Ok(out)
}

/// `embed(word) = embed(normal_form(word))`.
pub fn check_word_embedding(sup: &Arc<Superization>, word: &[Generator]) -> Result<RelationVerdict, SuperizeError> {
    let nf = crate::weyl::normal_form(&sup.c, word)?;
    let lhs = embed_word(sup, word)?;
    let diff = lhs.checked_add(&embed_element(sup, &nf)?.scale(&PhaseScalar::from_integer(-1))?)?;
    let holds = diff.is_zero() && lhs.grades_match();
    Ok(verdict(format!("{} = {}", format_word(word), nf), diff.to_string(), holds))
}

/// `Σ s · E_α ⊗ E_β` in `C_{Γ,b} ⊗ C_{Γ,b}` with the braided product
/// `(g ⊗ h)(k ⊗ l) = b(|h|,|k|) gk ⊗ hl`.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedTensor {
    factor: Arc<CommutationFactor>,
    terms: BTreeMap<(GradeVector, GradeVector), PhaseScalar>,
}

impl TwistedTensor {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Δ(e^i) = e^i ⊗ 1 + 1 ⊗ e^i`.
    pub fn delta(b: &Arc<CommutationFactor>, i: usize) -> Result<Self, SuperizeError> {
        check_mode(b, i)?;
        let mut terms = BTreeMap::new();
        terms.insert((b.sigma(i), b.zero_grade()), PhaseScalar::one());
        terms.insert((b.zero_grade(), b.sigma(i)), PhaseScalar::one());
        Ok(TwistedTensor { factor: Arc::clone(b), terms })
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, SuperizeError> {
        if !same(&self.factor, &other.factor) {
            return Err(SuperizeError::FactorMismatch);
        }
        let b = &self.factor;
        let mut terms = BTreeMap::new();
        for ((g, h), x) in &self.terms {
            for ((k, l), y) in &other.terms {
                let s = eval_factor(b, h, k)?
                    .checked_mul(&cochain(b, g, k)?)?
                    .checked_mul(&cochain(b, h, l)?)?
                    .checked_mul(&x.checked_mul(y)?)?;
                accumulate(&mut terms, (g + k, h + l), s)?;
            }
        }
        Ok(TwistedTensor { factor: Arc::clone(b), terms })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SuperizeError> {
        let mut out = self.clone();
        for (k, x) in &other.terms {
            accumulate(&mut out.terms, k.clone(), -x.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, SuperizeError> {
        let mut terms = BTreeMap::new();
        for (k, x) in &self.terms {
            accumulate(&mut terms, k.clone(), x.checked_mul(s)?)?;
        }
        Ok(TwistedTensor { factor: Arc::clone(&self.factor), terms })
    }
}

impl fmt::Display for TwistedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<(String, &PhaseScalar)> =
            self.terms.iter().map(|((g, h), x)| (format!("{}⊗{}", grade_label(g), grade_label(h)), x)).collect();
        crate::weyl::fmt_linear(f, labels.iter().map(|(l, x)| (l, *x, false)))
    }
}

/// `Δ(e^i)Δ(e^j) = b_ij Δ(e^j)Δ(e^i)` for all pairs.
pub fn check_comultiplication(b: &Arc<CommutationFactor>) -> Result<Vec<RelationVerdict>, SuperizeError> {
    let n = b.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (di, dj) = (TwistedTensor::delta(b, i)?, TwistedTensor::delta(b, j)?);
            let diff = di.multiply(&dj)?.checked_sub(&dj.multiply(&di)?.scale(b.entry(i, j))?)?;
            let relation = format!("Δ(e{a})Δ(e{b}) = b_{a}{b} Δ(e{b})Δ(e{a})", a = i + 1, b = j + 1);
            out.push(verdict(relation, diff.to_string(), diff.is_zero()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordReport {
    pub n: usize,
    pub checks: Vec<RelationVerdict>,
    pub passed: bool,
}

/// `C_{Γ,b}(N)` on `Z_2^N` with `b_ij = −1` is the Clifford algebra:
/// `e_i² = 1` and `e_ie_j + e_je_i = 2δ_ij`.
pub fn clifford_check(n: usize) -> Result<CliffordReport, SuperizeError> {
    let b = CommutationFactor::from_upper(&vec![1; n], |_, _| PhaseScalar::from_integer(-1))?;
    let b = Arc::new(reduce_group(&b, 2)?);
    let one = TwistedGroupElement::one(&b);
    let mut checks = Vec::new();
    for i in 0..n {
        let ei = TwistedGroupElement::e(&b, i)?;
        let inv = TwistedGroupElement::e_star(&b, i)?;
        let sq = ei.twisted_multiply(&ei)?;
        checks.push(verdict(format!("e{0} e{0} = 1", i + 1), sq.to_string(), sq == one && inv == ei));
        for j in i + 1..n {
            let ej = TwistedGroupElement::e(&b, j)?;
            let anti = ei.twisted_multiply(&ej)?.checked_add(&ej.twisted_multiply(&ei)?)?;
            checks.push(verdict(format!("e{} e{} + e{1} e{0} = 0", i + 1, j + 1), anti.to_string(), anti.is_zero()));
        }
    }
    let passed = checks.iter().all(|c| c.holds);
    Ok(CliffordReport { n, checks, passed })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperizationReport {
    pub c_prime: Vec<Vec<PhaseScalar>>,
    pub b: Vec<Vec<PhaseScalar>>,
    pub relations: Vec<RelationVerdict>,
    pub comultiplication: Vec<RelationVerdict>,
    pub passed: bool,
}

pub fn superization_report(c: &Arc<CommutationFactor>) -> Result<SuperizationReport, SuperizeError> {
    let sup = Superization::new(c)?;
    let relations = check_crossed_relations(&sup)?;
    let comultiplication = check_comultiplication(&sup.b)?;
    let passed = relations.iter().chain(&comultiplication).all(|v| v.holds);
    Ok(SuperizationReport {
        c_prime: sup.c_prime.matrix().to_vec(),
        b: sup.b.matrix().to_vec(),
        relations,
        comultiplication,
        passed,
    })
}
