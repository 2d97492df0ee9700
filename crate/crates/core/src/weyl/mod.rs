//! The quantum Weyl algebra `W_{Γ,c}(N)`.
//!
//! Elements are sums of normal-ordered monomials: creators `Θ^i` in ascending
//! mode order on the left, annihilators `Θ*_j` in descending mode order on the
//! right. Products are normal-ordered by pushing one generator at a time into
//! a canonical monomial, which is a fixed strategy of the rewrite system in
//! [`rewrite`]; that module applies the rules literally and checks that every
//! strategy reaches the same normal form.

pub mod rewrite;

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};
use crate::statistics::{eval_factor, unit_pow, CommutationFactor, FactorError, GradeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("operands are governed by different commutation factors")]
    FactorMismatch,
    #[error("mode {mode} is out of range for N = {dim}")]
    UnknownMode { mode: usize, dim: usize },
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("the zero element has no grade")]
    ZeroElement,
    #[error("monomial violates nilpotency of mode {mode}")]
    Nilpotent { mode: usize },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A letter of the alphabet `{Θ^i, Θ*_i}`; modes are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Create(usize),
    Annihilate(usize),
}

impl Generator {
    pub fn mode(self) -> usize {
        match self {
            Generator::Create(i) | Generator::Annihilate(i) => i,
        }
    }

    pub fn is_creator(self) -> bool {
        matches!(self, Generator::Create(_))
    }

    pub fn star(self) -> Self {
        match self {
            Generator::Create(i) => Generator::Annihilate(i),
            Generator::Annihilate(i) => Generator::Create(i),
        }
    }

    /// `|Θ^i| = σ_i`, `|Θ*_i| = −σ_i`.
    pub fn grade(self, c: &CommutationFactor) -> GradeVector {
        let s = c.sigma(self.mode());
        if self.is_creator() {
            s
        } else {
            -&s
        }
    }

    /// Every generator for `n` modes: creators first, then annihilators.
    pub fn all(n: usize) -> Vec<Generator> {
        (0..n).map(Generator::Create).chain((0..n).map(Generator::Annihilate)).collect()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Create(i) => write!(f, "T{}", i + 1),
            Generator::Annihilate(i) => write!(f, "T*{}", i + 1),
        }
    }
}

pub type Word = Vec<Generator>;

pub fn word_grade(c: &CommutationFactor, word: &[Generator]) -> GradeVector {
    word.iter().fold(c.zero_grade(), |g, x| &g + &x.grade(c))
}

pub fn format_word(word: &[Generator]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(Generator::to_string).collect::<Vec<_>>().join(" ")
}

fn check_word(c: &CommutationFactor, word: &[Generator]) -> Result<(), WeylError> {
    match word.iter().find(|g| g.mode() >= c.dim()) {
        Some(g) => Err(WeylError::UnknownMode { mode: g.mode() + 1, dim: c.dim() }),
        None => Ok(()),
    }
}

/// A normal-ordered monomial `Π_i (Θ^i)^{a_i} · Π_{j desc} (Θ*_j)^{b_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylMonomial {
    creators: Vec<u32>,
    annihilators: Vec<u32>,
}

impl WeylMonomial {
    pub fn unit(dim: usize) -> Self {
        WeylMonomial { creators: vec![0; dim], annihilators: vec![0; dim] }
    }

    pub fn new(creators: Vec<u32>, annihilators: Vec<u32>) -> Self {
        assert_eq!(creators.len(), annihilators.len());
        WeylMonomial { creators, annihilators }
    }

    pub fn creators(&self) -> &[u32] {
        &self.creators
    }

    pub fn annihilators(&self) -> &[u32] {
        &self.annihilators
    }

    pub fn dim(&self) -> usize {
        self.creators.len()
    }

    pub fn degree(&self) -> u32 {
        self.creators.iter().sum::<u32>() + self.annihilators.iter().sum::<u32>()
    }

    pub fn is_unit(&self) -> bool {
        self.degree() == 0
    }

    pub fn respects(&self, c: &CommutationFactor) -> bool {
        (0..self.dim()).all(|i| !c.is_nilpotent(i) || (self.creators[i] <= 1 && self.annihilators[i] <= 1))
    }

    /// The canonical word of this monomial.
    pub fn to_word(&self) -> Word {
        let mut w = Vec::with_capacity(self.degree() as usize);
        for (i, &a) in self.creators.iter().enumerate() {
            w.extend(std::iter::repeat_n(Generator::Create(i), a as usize));
        }
        for (j, &b) in self.annihilators.iter().enumerate().rev() {
            w.extend(std::iter::repeat_n(Generator::Annihilate(j), b as usize));
        }
        w
    }

    /// Reads a word that is already in canonical order.
    pub fn from_canonical_word(dim: usize, word: &[Generator]) -> Option<Self> {
        let mut m = Self::unit(dim);
        let mut seen_ann = false;
        let mut last_c = 0;
        let mut last_a = usize::MAX;
        for &g in word {
            match g {
                Generator::Create(i) => {
                    if seen_ann || i < last_c {
                        return None;
                    }
                    last_c = i;
                    m.creators[i] += 1;
                }
                Generator::Annihilate(j) => {
                    if seen_ann && j > last_a {
                        return None;
                    }
                    seen_ann = true;
                    last_a = j;
                    m.annihilators[j] += 1;
                }
            }
        }
        Some(m)
    }

    pub fn grade(&self, c: &CommutationFactor) -> GradeVector {
        let coords = self.creators.iter().zip(&self.annihilators).map(|(&a, &b)| a as i64 - b as i64).collect();
        GradeVector::new(coords, c.reduced_modulus())
    }

    /// `star` of a canonical monomial is canonical with phase 1.
    pub fn star(&self) -> Self {
        WeylMonomial { creators: self.annihilators.clone(), annihilators: self.creators.clone() }
    }

    fn key(&self) -> (u32, Reverse<&[u32]>, Reverse<&[u32]>) {
        (self.degree(), Reverse(&self.creators[..]), Reverse(&self.annihilators[..]))
    }
}

impl Ord for WeylMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for WeylMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WeylMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(&self.to_word()))
    }
}

fn same_factor(a: &Arc<CommutationFactor>, b: &Arc<CommutationFactor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn accumulate<K: Ord>(
    map: &mut BTreeMap<K, PhaseScalar>,
    key: K,
    value: PhaseScalar,
) -> Result<(), ScalarError> {
    if value.is_zero() {
        return Ok(());
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().checked_add(&value)?;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
    Ok(())
}

/// A finite linear combination of normal-ordered monomials.
#[derive(Clone)]
pub struct WeylElement {
    factor: Arc<CommutationFactor>,
    terms: BTreeMap<WeylMonomial, PhaseScalar>,
}

impl WeylElement {
    pub fn zero(factor: &Arc<CommutationFactor>) -> Self {
        WeylElement { factor: Arc::clone(factor), terms: BTreeMap::new() }
    }

    pub fn one(factor: &Arc<CommutationFactor>) -> Self {
        Self::monomial(factor, WeylMonomial::unit(factor.dim()), PhaseScalar::one())
    }

    pub fn scalar(factor: &Arc<CommutationFactor>, value: PhaseScalar) -> Self {
        Self::monomial(factor, WeylMonomial::unit(factor.dim()), value)
    }

    pub fn generator(factor: &Arc<CommutationFactor>, g: Generator) -> Result<Self, WeylError> {
        normal_form(factor, &[g])
    }

    /// `coef · m`; `m` must respect nilpotency.
    pub fn monomial(factor: &Arc<CommutationFactor>, m: WeylMonomial, coef: PhaseScalar) -> Self {
        assert!(m.respects(factor), "monomial violates nilpotency");
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(m, coef);
        }
        WeylElement { factor: Arc::clone(factor), terms }
    }

    pub fn factor(&self) -> &Arc<CommutationFactor> {
        &self.factor
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &PhaseScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &WeylMonomial) -> PhaseScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(WeylMonomial::degree).max().unwrap_or(0)
    }

    fn check(&self, other: &Self) -> Result<(), WeylError> {
        if same_factor(&self.factor, &other.factor) {
            Ok(())
        } else {
            Err(WeylError::FactorMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, x) in &other.terms {
            accumulate(&mut out.terms, m.clone(), x.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, WeylError> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, WeylError> {
        let mut out = Self::zero(&self.factor);
        for (m, x) in &self.terms {
            accumulate(&mut out.terms, m.clone(), x.checked_mul(s)?)?;
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let c = &*self.factor;
        let mut out = BTreeMap::new();
        for (m, x) in &self.terms {
            let mut acc: BTreeMap<WeylMonomial, PhaseScalar> = BTreeMap::new();
            acc.insert(m.clone(), x.clone());
            for (n, y) in &other.terms {
                let mut cur = acc.clone();
                for g in n.to_word() {
                    cur = push_generator(c, &cur, g)?;
                }
                for (k, v) in cur {
                    accumulate(&mut out, k, v.checked_mul(y)?)?;
                }
            }
        }
        Ok(WeylElement { factor: Arc::clone(&self.factor), terms: out })
    }

    /// The antilinear anti-automorphism with `Θ^i ↦ Θ*_i`.
    pub fn star(&self) -> Self {
        let terms = self.terms.iter().map(|(m, x)| (m.star(), x.conj())).collect();
        WeylElement { factor: Arc::clone(&self.factor), terms }
    }

    /// The common grade of all terms.
    pub fn grade_of(&self) -> Result<GradeVector, WeylError> {
        let mut grades = self.terms.keys().map(|m| m.grade(&self.factor));
        let first = grades.next().ok_or(WeylError::ZeroElement)?;
        if grades.all(|g| g == first) {
            Ok(first)
        } else {
            Err(WeylError::Inhomogeneous)
        }
    }

    /// `[X, Y]_c = XY − c(|X|,|Y|) YX`; zero if either operand is zero.
    pub fn bracket(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.factor));
        }
        let (gx, gy) = (self.grade_of()?, other.grade_of()?);
        let phase = eval_factor(&self.factor, &gx, &gy)?;
        self.multiply(other)?.checked_sub(&other.multiply(self)?.scale(&phase)?)
    }

    /// Checks `[X,[Y,Z]] = [[X,Y],Z] + c(|X|,|Y|)[Y,[X,Z]]`.
    pub fn check_jacobi(x: &Self, y: &Self, z: &Self) -> Result<JacobiCheck, WeylError> {
        x.check(y)?;
        x.check(z)?;
        let zero = Self::zero(&x.factor);
        if x.is_zero() || y.is_zero() || z.is_zero() {
            return Ok(JacobiCheck { holds: true, witness: zero });
        }
        let phase = eval_factor(&x.factor, &x.grade_of()?, &y.grade_of()?)?;
        let lhs = x.bracket(&y.bracket(z)?)?;
        let rhs = x.bracket(y)?.bracket(z)?.checked_add(&y.bracket(&x.bracket(z)?)?.scale(&phase)?)?;
        let witness = lhs.checked_sub(&rhs)?;
        Ok(JacobiCheck { holds: witness.is_zero(), witness })
    }
}

#[derive(Debug, Clone)]
pub struct JacobiCheck {
    pub holds: bool,
    /// `lhs − rhs`; zero when the identity holds.
    pub witness: WeylElement,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        same_factor(&self.factor, &other.factor) && self.terms == other.terms
    }
}

impl Eq for WeylElement {}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement({self})")
    }
}

/// Writes `Σ coef · mono` in the expression grammar; scalars with several
/// cyclotomic terms are split into one term per power.
pub(crate) fn fmt_linear<'a, M: fmt::Display + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a M, &'a PhaseScalar, bool)>,
) -> fmt::Result {
    let mut first = true;
    for (m, x, unit) in terms {
        for (k, r) in x.terms() {
            let negative = r < &BigRational::from_integer(0.into());
            let mag = if negative { -r.clone() } else { r.clone() };
            let coef = if k == 0 {
                let t = crate::coefficients::fmt_term(1, 0, &mag);
                if unit {
                    t
                } else if t == "1" {
                    String::new()
                } else {
                    format!("{t} ")
                }
            } else {
                let base = crate::coefficients::fmt_term(1, 0, &mag);
                let t = format!("{base}*w{}^{k}", x.order());
                if unit {
                    t
                } else {
                    format!("{t} ")
                }
            };
            let body = if unit { coef } else { format!("{coef}{m}") };
            match (first, negative) {
                (true, false) => f.write_str(&body)?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_linear(f, self.terms.iter().map(|(m, x)| (m, x, m.is_unit())))
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;
    fn add(self, rhs: &WeylElement) -> WeylElement {
        self.checked_add(rhs).expect("factor mismatch")
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;
    fn sub(self, rhs: &WeylElement) -> WeylElement {
        self.checked_sub(rhs).expect("factor mismatch")
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), -x)).collect();
        WeylElement { factor: Arc::clone(&self.factor), terms }
    }
}

fn q_number(q: i64, b: u32) -> i64 {
    // [b]_q = Σ_{r<b} q^r
    if q == 1 {
        b as i64
    } else {
        i64::from(b % 2 == 1)
    }
}

fn phase_product(
    c: &CommutationFactor,
    factors: impl Iterator<Item = (usize, usize, u32)>,
) -> Result<PhaseScalar, ScalarError> {
    let mut acc = PhaseScalar::one();
    for (i, j, e) in factors {
        if e > 0 {
            acc = acc.checked_mul(&unit_pow(c.entry(i, j), e as i64)?)?;
        }
    }
    Ok(acc)
}

/// Right-multiplies every monomial of `terms` by `g` and normal-orders.
fn push_generator(
    c: &CommutationFactor,
    terms: &BTreeMap<WeylMonomial, PhaseScalar>,
    g: Generator,
) -> Result<BTreeMap<WeylMonomial, PhaseScalar>, ScalarError> {
    let mut out = BTreeMap::new();
    for (m, x) in terms {
        match g {
            Generator::Annihilate(i) => {
                // Θ*_j Θ*_i → c_ji Θ*_i Θ*_j for j < i
                if c.is_nilpotent(i) && m.annihilators[i] > 0 {
                    continue;
                }
                let phase = phase_product(c, (0..i).map(|j| (j, i, m.annihilators[j])))?;
                let mut n = m.clone();
                n.annihilators[i] += 1;
                accumulate(&mut out, n, x.checked_mul(&phase)?)?;
            }
            Generator::Create(i) => {
                // Θ*_k Θ^i → c_ik Θ^i Θ*_k across the lower annihilators
                let low = phase_product(c, (0..i).map(|k| (i, k, m.annihilators[k])))?;
                let b = m.annihilators[i];
                let q = c.parity(i);
                if b > 0 {
                    let mut n = m.clone();
                    n.annihilators[i] -= 1;
                    let coef = low.scale(&BigRational::from_integer(q_number(q, b).into()));
                    accumulate(&mut out, n, x.checked_mul(&coef)?)?;
                }
                if c.is_nilpotent(i) && m.creators[i] > 0 {
                    continue;
                }
                let high = phase_product(c, (i + 1..c.dim()).map(|k| (i, k, m.annihilators[k])))?;
                let cre = phase_product(c, (i + 1..c.dim()).map(|j| (j, i, m.creators[j])))?;
                let mut coef = low.checked_mul(&high)?.checked_mul(&cre)?;
                if q == -1 && b % 2 == 1 {
                    coef = -coef;
                }
                let mut n = m.clone();
                n.creators[i] += 1;
                accumulate(&mut out, n, x.checked_mul(&coef)?)?;
            }
        }
    }
    Ok(out)
}

/// Normal form of a word modulo the defining ideal.
pub fn normal_form(c: &Arc<CommutationFactor>, word: &[Generator]) -> Result<WeylElement, WeylError> {
    check_word(c, word)?;
    let mut terms = BTreeMap::new();
    terms.insert(WeylMonomial::unit(c.dim()), PhaseScalar::one());
    for &g in word {
        terms = push_generator(c, &terms, g)?;
    }
    Ok(WeylElement { factor: Arc::clone(c), terms })
}

/// An element of the free algebra on the generators: a linear combination of
/// words that have not been normal-ordered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordExpr {
    terms: BTreeMap<Word, PhaseScalar>,
}

impl WordExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new(), PhaseScalar::one())
    }

    pub fn word(word: Word, coef: PhaseScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(word, coef);
        }
        WordExpr { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &PhaseScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, ScalarError> {
        let mut out = self.clone();
        for (w, x) in &other.terms {
            accumulate(&mut out.terms, w.clone(), x.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, ScalarError> {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            accumulate(&mut out.terms, w.clone(), x.checked_mul(s)?)?;
        }
        Ok(out)
    }

    /// Concatenation product.
    pub fn concat(&self, other: &Self) -> Result<Self, ScalarError> {
        let mut out = Self::zero();
        for (u, x) in &self.terms {
            for (v, y) in &other.terms {
                let w: Word = u.iter().chain(v).copied().collect();
                accumulate(&mut out.terms, w, x.checked_mul(y)?)?;
            }
        }
        Ok(out)
    }

    /// The common grade of the words, `None` for the zero expression.
    pub fn grade(&self, c: &CommutationFactor) -> Result<Option<GradeVector>, WeylError> {
        let mut grades = self.terms.keys().map(|w| word_grade(c, w));
        let Some(first) = grades.next() else {
            return Ok(None);
        };
        if grades.all(|g| g == first) {
            Ok(Some(first))
        } else {
            Err(WeylError::Inhomogeneous)
        }
    }

    /// The graded bracket computed in the free algebra.
    pub fn bracket(&self, other: &Self, c: &CommutationFactor) -> Result<Self, WeylError> {
        let (Some(gx), Some(gy)) = (self.grade(c)?, other.grade(c)?) else {
            return Ok(Self::zero());
        };
        let phase = eval_factor(c, &gx, &gy)?;
        Ok(self.concat(other)?.add(&other.concat(self)?.scale(&-phase)?)?)
    }

    /// `[X,[Y,Z]] − [[X,Y],Z] − c(|X|,|Y|)[Y,[X,Z]]` in the free algebra.
    pub fn jacobi(x: &Self, y: &Self, z: &Self, c: &CommutationFactor) -> Result<Self, WeylError> {
        let (Some(gx), Some(gy)) = (x.grade(c)?, y.grade(c)?) else {
            return Ok(Self::zero());
        };
        let phase = eval_factor(c, &gx, &gy)?;
        let lhs = x.bracket(&y.bracket(z, c)?, c)?;
        let a = x.bracket(y, c)?.bracket(z, c)?;
        let b = y.bracket(&x.bracket(z, c)?, c)?.scale(&phase)?;
        Ok(lhs.add(&a.scale(&PhaseScalar::from_integer(-1))?)?.add(&b.scale(&PhaseScalar::from_integer(-1))?)?)
    }

    pub fn normal_form(&self, c: &Arc<CommutationFactor>) -> Result<WeylElement, WeylError> {
        let mut out = WeylElement::zero(c);
        for (w, x) in &self.terms {
            out = out.checked_add(&normal_form(c, w)?.scale(x)?)?;
        }
        Ok(out)
    }
}

impl From<&WeylElement> for WordExpr {
    fn from(x: &WeylElement) -> Self {
        let terms = x.terms().map(|(m, s)| (m.to_word(), s.clone())).collect();
        WordExpr { terms }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct W<'a>(&'a Word);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&format_word(self.0))
            }
        }
        let items: Vec<(W<'_>, &PhaseScalar, bool)> = self.terms.iter().map(|(w, x)| (W(w), x, w.is_empty())).collect();
        fmt_linear(f, items.iter().map(|(w, x, u)| (w, *x, *u)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::{make_factor, FactorPreset, PresetKind};
    use proptest::prelude::*;
    use Generator::{Annihilate as A, Create as C};

    fn factor(kind: PresetKind, n: usize) -> Arc<CommutationFactor> {
        Arc::new(make_factor(&FactorPreset::new(kind, n)).unwrap())
    }

    fn nf(c: &Arc<CommutationFactor>, w: &[Generator]) -> WeylElement {
        normal_form(c, w).unwrap()
    }

    fn int(v: i64) -> PhaseScalar {
        PhaseScalar::from_integer(v)
    }

    #[test]
    fn inhomogeneous_relation() {
        for kind in [PresetKind::Example3Cf, PresetKind::Example4Cb] {
            let c = factor(kind, 2);
            let expected = &WeylElement::one(&c) + &nf(&c, &[C(0), A(0)]).scale(&int(c.parity(0))).unwrap();
            assert_eq!(nf(&c, &[A(0), C(0)]), expected);
        }
    }

    #[test]
    fn nilpotent_square() {
        let c = factor(PresetKind::Example4Cb, 2);
        assert!(nf(&c, &[C(0), C(0)]).is_zero());
        assert!(nf(&c, &[A(1), A(1)]).is_zero());
        let b = factor(PresetKind::Example3Cf, 2);
        assert_eq!(nf(&b, &[C(0), C(0)]).len(), 1);
    }

    #[test]
    fn mixed_exchange() {
        let c = factor(PresetKind::Example3Cf, 2);
        assert_eq!(nf(&c, &[A(0), C(1)]), nf(&c, &[C(1), A(0)]).scale(&int(-1)).unwrap());
        assert_eq!(nf(&c, &[C(1), A(0)]).to_string(), "T2 T*1");
        assert_eq!(nf(&c, &[A(0), C(1)]).to_string(), "-T2 T*1");
    }

    #[test]
    fn multiply_examples() {
        let c = factor(PresetKind::Example4Cb, 2);
        let x = nf(&c, &[C(0), A(1)]);
        assert_eq!(x.multiply(&WeylElement::one(&c)).unwrap(), x);
        let t1 = WeylElement::generator(&c, C(0)).unwrap();
        let t2 = WeylElement::generator(&c, C(1)).unwrap();
        assert_eq!(t1.multiply(&t2).unwrap().to_string(), "T1 T2");
        assert_eq!(t2.multiply(&t1).unwrap().to_string(), "T1 T2");
        let f = factor(PresetKind::Example3Cf, 2);
        let a2 = WeylElement::generator(&f, A(1)).unwrap();
        let t12 = nf(&f, &[C(0), C(1)]);
        let prod = a2.multiply(&t12).unwrap();
        // Θ*_2Θ^1Θ^2 = c_12 Θ^1 (1 + Θ^2Θ*_2)
        let expected = -&(&WeylElement::generator(&f, C(0)).unwrap() + &nf(&f, &[C(0), C(1), A(1)]));
        assert_eq!(prod, expected);
        assert_eq!(prod.coefficient(&WeylMonomial::new(vec![1, 0], vec![0, 0])), int(-1));
    }

    #[test]
    fn factor_mismatch_is_an_error() {
        let a = factor(PresetKind::Example3Cf, 2);
        let b = factor(PresetKind::Example4Cb, 2);
        assert_eq!(WeylElement::one(&a).multiply(&WeylElement::one(&b)), Err(WeylError::FactorMismatch));
        assert!(matches!(normal_form(&a, &[C(2)]), Err(WeylError::UnknownMode { mode: 3, dim: 2 })));
    }

    #[test]
    fn star_examples() {
        let c = factor(PresetKind::Example3Cf, 2);
        assert_eq!(nf(&c, &[C(0)]).star(), nf(&c, &[A(0)]));
        assert_eq!(nf(&c, &[C(0), C(1)]).star(), nf(&c, &[A(1), A(0)]));
        let i = PhaseScalar::root_of_unity(4, 1).unwrap();
        let x = WeylElement::scalar(&c, i.clone());
        assert_eq!(x.star(), WeylElement::scalar(&c, -i));
    }

    #[test]
    fn grade_examples() {
        let c = factor(PresetKind::Example3Cf, 2);
        let g = nf(&c, &[C(0), A(1)]).grade_of().unwrap();
        assert_eq!(g.coords(), &[1, -1]);
        assert!(WeylElement::one(&c).grade_of().unwrap().is_zero());
        let mixed = &nf(&c, &[C(0)]) + &nf(&c, &[C(1)]);
        assert_eq!(mixed.grade_of(), Err(WeylError::Inhomogeneous));
        assert_eq!(WeylElement::zero(&c).grade_of(), Err(WeylError::ZeroElement));
    }

    #[test]
    fn bracket_examples() {
        for kind in PresetKind::CORE {
            let n = if kind == PresetKind::AppendixEven { 2 } else { 3 };
            let c = factor(kind, n);
            let t1 = WeylElement::generator(&c, C(0)).unwrap();
            let s1 = WeylElement::generator(&c, A(0)).unwrap();
            let t2 = WeylElement::generator(&c, C(1)).unwrap();
            assert_eq!(s1.bracket(&t1).unwrap(), WeylElement::one(&c));
            assert_eq!(t1.bracket(&s1).unwrap(), WeylElement::scalar(&c, int(-c.parity(0))));
            assert!(t1.bracket(&t2).unwrap().is_zero());
            assert!(s1.bracket(&t2).unwrap().is_zero());
        }
    }

    #[test]
    fn ideal_membership_for_all_pairs() {
        let general = make_factor(&FactorPreset::omega_general(
            vec![1, 0, 1],
            vec![vec![0, 1, 2], vec![0, 0, 1], vec![0, 0, 0]],
            crate::statistics::RootSpec { order: 6, exp: 1 },
        ))
        .unwrap();
        assert!(general.entry(0, 1).to_string().contains('w'));
        let mut factors: Vec<Arc<CommutationFactor>> =
            PresetKind::CORE.iter().map(|&k| factor(k, if k == PresetKind::AppendixEven { 4 } else { 3 })).collect();
        factors.push(Arc::new(general));
        for c in factors {
            for i in 0..c.dim() {
                for j in 0..c.dim() {
                    let cij = c.entry(i, j);
                    let cre = &nf(&c, &[C(i), C(j)]) - &nf(&c, &[C(j), C(i)]).scale(cij).unwrap();
                    // the starred creator relation; for ±1 factors c_ji = c_ij
                    let ann = &nf(&c, &[A(j), A(i)]) - &nf(&c, &[A(i), A(j)]).scale(&cij.conj()).unwrap();
                    assert!(cre.is_zero() && ann.is_zero(), "{i} {j}");
                    if c.is_rational() {
                        assert!((&nf(&c, &[A(j), A(i)]) - &nf(&c, &[A(i), A(j)]).scale(cij).unwrap()).is_zero());
                    }
                    let mixed = &nf(&c, &[A(i), C(j)]) - &nf(&c, &[C(j), A(i)]).scale(c.entry(j, i)).unwrap();
                    let delta = if i == j { WeylElement::one(&c) } else { WeylElement::zero(&c) };
                    assert_eq!(mixed, delta);
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        for kind in PresetKind::CORE {
            let c = factor(kind, if kind == PresetKind::AppendixEven { 2 } else { 1 });
            let t = WeylElement::generator(&c, C(0)).unwrap();
            let s = WeylElement::generator(&c, A(0)).unwrap();
            assert!(WeylElement::check_jacobi(&s, &t, &t).unwrap().holds);
            assert!(WeylElement::check_jacobi(&WeylElement::one(&c), &t, &s).unwrap().holds);
        }
    }

    #[test]
    fn display_uses_expression_grammar() {
        let c = factor(PresetKind::Example3Cf, 2);
        let half_i = PhaseScalar::term(BigRational::new(1.into(), 2.into()), 4, 1).unwrap();
        let x = &nf(&c, &[A(0), C(0)]) - &nf(&c, &[C(1), A(1)]).scale(&half_i).unwrap();
        assert_eq!(x.to_string(), "1 + T1 T*1 - 1/2*w4^1 T2 T*2");
        assert_eq!(WeylElement::zero(&c).to_string(), "0");
        let mixed = WeylElement::scalar(&c, PhaseScalar::from_integer(2) + PhaseScalar::root_of_unity(3, 1).unwrap());
        assert_eq!(mixed.to_string(), "2 + 1*w3^1");
    }

    #[test]
    fn free_brackets_lower_to_algebra_brackets() {
        let c = factor(PresetKind::Example3Cf, 2);
        let g = |x| WordExpr::word(vec![x], PhaseScalar::one());
        // graded Jacobi already holds in the free algebra
        assert!(WordExpr::jacobi(&g(A(0)), &g(C(0)), &g(C(1)), &c).unwrap().is_zero());
        let free = g(A(0)).bracket(&g(C(0)).bracket(&g(C(1)), &c).unwrap(), &c).unwrap();
        assert!(!free.is_zero());
        let x = WeylElement::generator(&c, A(0)).unwrap();
        let y = WeylElement::generator(&c, C(0)).unwrap();
        let z = WeylElement::generator(&c, C(1)).unwrap();
        assert_eq!(free.normal_form(&c).unwrap(), x.bracket(&y.bracket(&z).unwrap()).unwrap());
    }

    fn arb_case() -> impl Strategy<Value = (Arc<CommutationFactor>, Vec<Word>)> {
        let kinds = prop::sample::select(PresetKind::CORE.to_vec());
        (kinds, 0usize..2).prop_flat_map(|(kind, pick)| {
            let sizes = kind.sizes_up_to(3);
            let c = factor(kind, sizes[pick % sizes.len()]);
            let dim = c.dim();
            let gen = (0..dim, any::<bool>()).prop_map(|(i, cr)| if cr { C(i) } else { A(i) });
            let word = prop::collection::vec(gen, 0..4);
            (Just(c), prop::collection::vec(word, 3))
        })
    }

    proptest! {
        #[test]
        fn associativity_and_star((c, ws) in arb_case()) {
            let x = nf(&c, &ws[0]);
            let y = nf(&c, &ws[1]);
            let z = nf(&c, &ws[2]);
            let xy = x.multiply(&y).unwrap();
            prop_assert_eq!(xy.multiply(&z).unwrap(), x.multiply(&y.multiply(&z).unwrap()).unwrap());
            let concat: Word = ws[0].iter().chain(&ws[1]).copied().collect();
            prop_assert_eq!(&xy, &nf(&c, &concat));
            prop_assert_eq!(xy.star(), y.star().multiply(&x.star()).unwrap());
            prop_assert_eq!(x.star().star(), x.clone());
            let starred: Word = ws[0].iter().rev().map(|g| g.star()).collect();
            prop_assert_eq!(x.star(), nf(&c, &starred));
        }

        #[test]
        fn c_anticommutativity((c, ws) in arb_case()) {
            let x = nf(&c, &ws[0]).scale(&PhaseScalar::ratio(3, 2)).unwrap();
            let y = nf(&c, &ws[1]);
            prop_assume!(!x.is_zero() && !y.is_zero());
            let phase = eval_factor(&c, &x.grade_of().unwrap(), &y.grade_of().unwrap()).unwrap();
            let lhs = x.bracket(&y).unwrap();
            let rhs = -&y.bracket(&x).unwrap().scale(&phase).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn jacobi_on_words((c, ws) in arb_case()) {
            let x = nf(&c, &ws[0]);
            let y = nf(&c, &ws[1]);
            let z = nf(&c, &ws[2]);
            prop_assert!(WeylElement::check_jacobi(&x, &y, &z).unwrap().holds);
        }
    }
}
