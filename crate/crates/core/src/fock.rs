//! Fock space: the c-symmetric algebra `A = TE/I_c` in its PBW basis.
//!
//! A basis monomial `Θ^α = (Θ^1)^{α_1}…(Θ^N)^{α_N}` is stored as its
//! occupation vector. Creators act by left multiplication with c-symmetric
//! reordering, annihilators by the right evaluation maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};
use crate::statistics::{unit_pow, CommutationFactor, GradeVector};
use crate::weyl::{accumulate, Generator, WeylElement, WordExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("mode {mode} is out of range for N = {dim}")]
    UnknownMode { mode: usize, dim: usize },
    #[error("operands are governed by different commutation factors")]
    FactorMismatch,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Occupation vector of a basis monomial; ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FockMonomial(pub Vec<u32>);

impl FockMonomial {
    pub fn vacuum(dim: usize) -> Self {
        FockMonomial(vec![0; dim])
    }

    pub fn occupation(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of distinct occupied modes.
    pub fn occupied_modes(&self) -> usize {
        self.0.iter().filter(|&&a| a > 0).count()
    }

    /// Mode labels in canonical order, each repeated by its occupation.
    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize)).collect()
    }

    pub fn grade(&self, c: &CommutationFactor) -> GradeVector {
        GradeVector::new(self.0.iter().map(|&a| a as i64).collect(), c.reduced_modulus())
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels();
        if labels.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = labels.iter().map(|i| format!("T{}", i + 1)).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A finite combination of basis monomials of `A`.
#[derive(Clone)]
pub struct FockVector {
    factor: Arc<CommutationFactor>,
    terms: BTreeMap<FockMonomial, PhaseScalar>,
}

impl FockVector {
    pub fn zero(factor: &Arc<CommutationFactor>) -> Self {
        FockVector { factor: Arc::clone(factor), terms: BTreeMap::new() }
    }

    pub fn vacuum(factor: &Arc<CommutationFactor>) -> Self {
        Self::basis(factor, FockMonomial::vacuum(factor.dim()))
    }

    pub fn basis(factor: &Arc<CommutationFactor>, m: FockMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, PhaseScalar::one());
        FockVector { factor: Arc::clone(factor), terms }
    }

    /// `Θ^{m_1}Θ^{m_2}…Θ^{m_k}` as an element of `A`.
    pub fn from_word(factor: &Arc<CommutationFactor>, modes: &[usize]) -> Result<Self, FockError> {
        let mut v = Self::vacuum(factor);
        for &i in modes.iter().rev() {
            v = v.create(i)?;
        }
        Ok(v)
    }

    pub fn factor(&self) -> &Arc<CommutationFactor> {
        &self.factor
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &PhaseScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &FockMonomial) -> PhaseScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_mode(&self, i: usize) -> Result<(), FockError> {
        if i < self.factor.dim() {
            Ok(())
        } else {
            Err(FockError::UnknownMode { mode: i + 1, dim: self.factor.dim() })
        }
    }

    fn same(&self, other: &Arc<CommutationFactor>) -> Result<(), FockError> {
        if Arc::ptr_eq(&self.factor, other) || *self.factor == **other {
            Ok(())
        } else {
            Err(FockError::FactorMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FockError> {
        self.same(&other.factor)?;
        let mut out = self.clone();
        for (m, x) in &other.terms {
            accumulate(&mut out.terms, m.clone(), x.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FockError> {
        self.checked_add(&other.scale(&PhaseScalar::from_integer(-1))?)
    }

    pub fn scale(&self, s: &PhaseScalar) -> Result<Self, FockError> {
        let mut out = Self::zero(&self.factor);
        for (m, x) in &self.terms {
            accumulate(&mut out.terms, m.clone(), x.checked_mul(s)?)?;
        }
        Ok(out)
    }

    /// Left multiplication by `Θ^i`, reordered into canonical form.
    pub fn create(&self, i: usize) -> Result<Self, FockError> {
        self.check_mode(i)?;
        let c = &*self.factor;
        let mut out = Self::zero(&self.factor);
        for (m, x) in &self.terms {
            if c.is_nilpotent(i) && m.0[i] > 0 {
                continue;
            }
            // Θ^i Θ^j → c_ij Θ^j Θ^i for every j < i
            let mut phase = PhaseScalar::one();
            for j in 0..i {
                if m.0[j] > 0 {
                    phase = phase.checked_mul(&unit_pow(c.entry(i, j), m.0[j] as i64)?)?;
                }
            }
            let mut n = m.clone();
            n.0[i] += 1;
            accumulate(&mut out.terms, n, x.checked_mul(&phase)?)?;
        }
        Ok(out)
    }

    /// The evaluation map `ev_i`: `ev_i(1) = 0`,
    /// `ev_i(Θ^j g) = δ_ij g + c_ji Θ^j ev_i(g)`.
    pub fn evaluate(&self, i: usize) -> Result<Self, FockError> {
        self.check_mode(i)?;
        let mut out = Self::zero(&self.factor);
        for (m, x) in &self.terms {
            let part = evaluate_monomial(&self.factor, i, m)?;
            for (n, y) in part.terms {
                accumulate(&mut out.terms, n, y.checked_mul(x)?)?;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, g: Generator) -> Result<Self, FockError> {
        match g {
            Generator::Create(i) => self.create(i),
            Generator::Annihilate(i) => self.evaluate(i),
        }
    }

    /// Applies a word, rightmost letter first.
    pub fn apply_word(&self, word: &[Generator]) -> Result<Self, FockError> {
        let mut v = self.clone();
        for &g in word.iter().rev() {
            if v.is_zero() {
                break;
            }
            v = v.apply(g)?;
        }
        Ok(v)
    }

    /// `a_X f` for an algebra element `X`.
    pub fn act(&self, x: &WeylElement) -> Result<Self, FockError> {
        self.same(x.factor())?;
        let mut out = Self::zero(&self.factor);
        for (m, s) in x.terms() {
            out = out.checked_add(&self.apply_word(&m.to_word())?.scale(s)?)?;
        }
        Ok(out)
    }

    /// `a_X f` for an unreduced word expression.
    pub fn act_expr(&self, x: &WordExpr) -> Result<Self, FockError> {
        let mut out = Self::zero(&self.factor);
        for (w, s) in x.terms() {
            out = out.checked_add(&self.apply_word(w)?.scale(s)?)?;
        }
        Ok(out)
    }
}

fn evaluate_monomial(c: &Arc<CommutationFactor>, i: usize, m: &FockMonomial) -> Result<FockVector, FockError> {
    let Some(j) = m.0.iter().position(|&a| a > 0) else {
        return Ok(FockVector::zero(c));
    };
    let mut rest = m.clone();
    rest.0[j] -= 1;
    let inner = evaluate_monomial(c, i, &rest)?;
    let mut out = inner.create(j)?.scale(c.entry(j, i))?;
    if i == j {
        out = out.checked_add(&FockVector::basis(c, rest))?;
    }
    Ok(out)
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        self.same(&other.factor).is_ok() && self.terms == other.terms
    }
}

impl Eq for FockVector {}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockVector({self})")
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::weyl::fmt_linear(f, self.terms.iter().map(|(m, x)| (m, x, m.degree() == 0)))
    }
}

/// Occupation caps per mode: nilpotent modes are capped at 1.
pub fn mode_caps(c: &CommutationFactor, cap: u32) -> Vec<u32> {
    (0..c.dim()).map(|i| if c.is_nilpotent(i) { 1 } else { cap }).collect()
}

/// All occupation vectors within `caps`, lexicographic.
pub fn enumerate_occupations(caps: &[u32]) -> Vec<FockMonomial> {
    let mut out = vec![FockMonomial(Vec::with_capacity(caps.len()))];
    for &k in caps {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=k).map(move |a| {
                    let mut v = m.0.clone();
                    v.push(a);
                    FockMonomial(v)
                })
            })
            .collect();
    }
    out
}

/// Basis monomials of total degree exactly `degree`.
pub fn basis_of_degree(c: &CommutationFactor, degree: u32) -> Vec<FockMonomial> {
    enumerate_occupations(&mode_caps(c, degree)).into_iter().filter(|m| m.degree() == degree).collect()
}

/// Basis monomials of total degree at most `degree`.
pub fn basis_up_to_degree(c: &CommutationFactor, degree: u32) -> Vec<FockMonomial> {
    enumerate_occupations(&mode_caps(c, degree)).into_iter().filter(|m| m.degree() <= degree).collect()
}

/// A vector of the single-Grassmann column model: row `i` holds `Θ` or 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnState {
    Zero,
    Column(Vec<bool>),
}

impl ColumnState {
    pub fn is_zero(&self) -> bool {
        matches!(self, ColumnState::Zero)
    }
}

impl fmt::Display for ColumnState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnState::Zero => f.write_str("0"),
            ColumnState::Column(rows) => {
                let parts: Vec<&str> = rows.iter().map(|&r| if r { "Θ" } else { "0" }).collect();
                write!(f, "({})ᵀ", parts.join(", "))
            }
        }
    }
}

/// Product of the column generators `a⁺_i|0⟩` for the listed modes.
///
/// With a single Grassmann `Θ`, a repeated row squares to zero. For even `N`
/// distinct rows commute and combine; for odd `N` they must both commute
/// and anticommute, so every product of two or more modes vanishes.
pub fn represent_column(indices: &[usize], dim: usize) -> Result<ColumnState, FockError> {
    if let Some(&i) = indices.iter().find(|&&i| i >= dim) {
        return Err(FockError::UnknownMode { mode: i + 1, dim });
    }
    let mut rows = vec![false; dim];
    for &i in indices {
        if rows[i] {
            return Ok(ColumnState::Zero);
        }
        rows[i] = true;
    }
    if dim % 2 == 1 && indices.len() >= 2 {
        return Ok(ColumnState::Zero);
    }
    Ok(ColumnState::Column(rows))
}

/// `B_eff = B − m·Φ₀`, in units of `Φ₀`.
pub fn effective_field(b: &BigRational, m: usize) -> BigRational {
    b - BigRational::from_integer(m.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeStateInfo {
    /// quasiparticles: distinct occupied modes
    pub m: usize,
    /// quasiholes: `N − m`
    pub n: usize,
    pub nu_prime: BigRational,
    /// in units of `Φ₀`
    pub b_eff: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRow {
    pub monomial: FockMonomial,
    pub info: CompositeStateInfo,
    pub column_rep_zero: bool,
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for StateRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(6))?;
        map.serialize_entry("occupation", &self.monomial)?;
        map.serialize_entry("m", &self.info.m)?;
        map.serialize_entry("n", &self.info.n)?;
        map.serialize_entry("nu_prime", &fmt_rational(&self.info.nu_prime))?;
        map.serialize_entry("b_eff", &format!("{}*Phi0", fmt_rational(&self.info.b_eff)))?;
        map.serialize_entry("column_rep_zero", &self.column_rep_zero)?;
        map.end()
    }
}

/// Every basis state within the occupation cap with its composite-particle
/// bookkeeping at field `b` (units of `Φ₀`).
pub fn enumerate_states(c: &CommutationFactor, b: &BigRational, cap: u32) -> Vec<StateRow> {
    let dim = c.dim();
    enumerate_occupations(&mode_caps(c, cap.max(1)))
        .into_iter()
        .map(|monomial| {
            let m = monomial.occupied_modes();
            let column = represent_column(&monomial.labels(), dim).expect("modes in range");
            let nu_prime = if dim == 0 { BigRational::zero() } else { BigRational::new(dim.into(), dim.into()) };
            StateRow {
                info: CompositeStateInfo { m, n: dim - m, nu_prime, b_eff: effective_field(b, m) },
                column_rep_zero: column.is_zero(),
                monomial,
            }
        })
        .collect()
}
