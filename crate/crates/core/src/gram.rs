//! The sesquilinear form on `A`, Gram matrices and positivity certificates.
//!
//! `⟨1,1⟩ = 1` and `⟨Θ^i f, g⟩ = ⟨f, ev_i g⟩`, antilinear in the first slot.
//! [`permutation_sum`] evaluates the same form by brute force over `S_n` and
//! serves as an independent check.

use std::sync::Arc;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};
use crate::fock::{enumerate_occupations, mode_caps, FockError, FockMonomial, FockVector};
use crate::statistics::CommutationFactor;

/// Largest word length accepted by [`permutation_sum`].
pub const MAX_PERMUTATION_LENGTH: usize = 9;

/// Default working precision for numeric pivot signs.
pub const DEFAULT_PRECISION: usize = 128;

const MAX_PRECISION: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GramError {
    #[error("label lists have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("permutation sum limited to n ≤ {MAX_PERMUTATION_LENGTH}, got {0}")]
    TooLong(usize),
    #[error("matrix is not Hermitian at ({0}, {1})")]
    NonHermitian(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("label {mode} is out of range for N = {dim}")]
    UnknownMode { mode: usize, dim: usize },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `⟨Θ^α, g⟩ = ⟨1, ev_{j_n}…ev_{j_1} g⟩` for the labels `j` of `α`.
fn inner_basis(m: &FockMonomial, g: &FockVector) -> Result<PhaseScalar, GramError> {
    // grades are occupation vectors, so only the matching term can survive
    let matching = g.coefficient(m);
    if matching.is_zero() {
        return Ok(PhaseScalar::zero());
    }
    let mut h = FockVector::basis(g.factor(), m.clone()).scale(&matching)?;
    for i in m.labels() {
        h = h.evaluate(i)?;
    }
    Ok(h.coefficient(&FockMonomial::vacuum(g.factor().dim())))
}

/// The scalar product, antilinear in `f`.
pub fn inner(f: &FockVector, g: &FockVector) -> Result<PhaseScalar, GramError> {
    if !(Arc::ptr_eq(f.factor(), g.factor()) || **f.factor() == **g.factor()) {
        return Err(FockError::FactorMismatch.into());
    }
    let mut acc = PhaseScalar::zero();
    for (m, x) in f.terms() {
        let v = inner_basis(m, g)?;
        if !v.is_zero() {
            acc = acc.checked_add(&x.conj().checked_mul(&v)?)?;
        }
    }
    Ok(acc)
}

/// `Σ_{π∈S_n} χ(π) Π_a δ(σ_a, τ_{π(a)})` with
/// `χ(π) = Π_{a<b, π(a)>π(b)} c_{σ_b σ_a}`.
pub fn permutation_sum(sigma: &[usize], tau: &[usize], c: &CommutationFactor) -> Result<PhaseScalar, GramError> {
    if sigma.len() != tau.len() {
        return Err(GramError::LengthMismatch(sigma.len(), tau.len()));
    }
    let n = sigma.len();
    if n > MAX_PERMUTATION_LENGTH {
        return Err(GramError::TooLong(n));
    }
    if let Some(&i) = sigma.iter().chain(tau).find(|&&i| i >= c.dim()) {
        return Err(GramError::UnknownMode { mode: i + 1, dim: c.dim() });
    }
    let mut total = PhaseScalar::zero();
    for pi in (0..n).permutations(n) {
        if (0..n).any(|a| sigma[a] != tau[pi[a]]) {
            continue;
        }
        let mut chi = PhaseScalar::one();
        for a in 0..n {
            for b in a + 1..n {
                if pi[a] > pi[b] {
                    chi = chi.checked_mul(c.entry(sigma[b], sigma[a]))?;
                }
            }
        }
        total = total.checked_add(&chi)?;
    }
    Ok(total)
}

/// Gram matrix of the degree-`n` basis monomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramMatrix {
    pub degree: u32,
    pub basis: Vec<FockMonomial>,
    pub entries: Vec<Vec<PhaseScalar>>,
}

/// Builds the Gram matrix at degree `n`; bosonic modes are capped at `cap`.
pub fn gram_matrix(n: u32, c: &Arc<CommutationFactor>, cap: u32) -> Result<GramMatrix, GramError> {
    let basis: Vec<FockMonomial> =
        enumerate_occupations(&mode_caps(c, cap.max(1))).into_iter().filter(|m| m.degree() == n).collect();
    let vectors: Vec<FockVector> = basis.iter().map(|m| FockVector::basis(c, m.clone())).collect();
    let mut entries = Vec::with_capacity(basis.len());
    for u in &vectors {
        let row = vectors.iter().map(|v| inner(u, v)).collect::<Result<Vec<_>, _>>()?;
        entries.push(row);
    }
    check_hermitian(&entries)?;
    Ok(GramMatrix { degree: n, basis, entries })
}

fn check_hermitian(m: &[Vec<PhaseScalar>]) -> Result<(), GramError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(GramError::NotSquare);
    }
    for i in 0..n {
        for j in i..n {
            if m[i][j] != m[j][i].conj() {
                return Err(GramError::NonHermitian(i, j));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub verdict: Verdict,
    /// `D` of `A = L D L*`, up to the first failing pivot.
    pub pivots: Vec<PhaseScalar>,
    /// True when some pivot sign was decided numerically.
    pub numeric: bool,
    pub kernel_dim: usize,
}

enum Sign {
    Negative,
    Zero,
    Positive,
}

// sign of a real cyclotomic number; exact when rational
fn real_sign(x: &PhaseScalar, precision: usize) -> (Sign, bool) {
    if x.is_zero() {
        return (Sign::Zero, false);
    }
    if let Some(r) = x.as_rational() {
        return (if r.is_negative() { Sign::Negative } else { Sign::Positive }, false);
    }
    // x ≠ 0 exactly, so refining precision eventually separates it from 0
    let tol = BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(20));
    let mut p = precision.max(DEFAULT_PRECISION);
    loop {
        let re = x.to_complex(p).re_rational();
        if re.abs() > &tol * (BigRational::from_integer(1.into()) + x.abs_sum()) || p >= MAX_PRECISION {
            return (if re.is_negative() { Sign::Negative } else { Sign::Positive }, true);
        }
        p *= 2;
    }
}

/// Decides positivity by an exact `LDL*` factorization without pivoting.
pub fn check_positive(m: &[Vec<PhaseScalar>], precision: usize) -> Result<PositivityReport, GramError> {
    check_hermitian(m)?;
    let n = m.len();
    let mut a: Vec<Vec<PhaseScalar>> = m.to_vec();
    let mut pivots = Vec::with_capacity(n);
    let mut numeric = false;
    let mut kernel_dim = 0;
    for k in 0..n {
        let d = a[k][k].clone();
        let (sign, approx) = real_sign(&d, precision);
        numeric |= approx;
        pivots.push(d.clone());
        match sign {
            Sign::Negative => {
                return Ok(PositivityReport { verdict: Verdict::Indefinite, pivots, numeric, kernel_dim })
            }
            Sign::Zero => {
                // a PSD matrix with a zero pivot has a zero column below it
                if (k + 1..n).any(|i| !a[i][k].is_zero()) {
                    return Ok(PositivityReport { verdict: Verdict::Indefinite, pivots, numeric, kernel_dim });
                }
                kernel_dim += 1;
            }
            Sign::Positive => {
                let inv = d.inv()?;
                for i in k + 1..n {
                    if a[i][k].is_zero() {
                        continue;
                    }
                    let l = a[i][k].checked_mul(&inv)?;
                    for j in k + 1..n {
                        if !a[k][j].is_zero() {
                            a[i][j] = a[i][j].checked_sub(&l.checked_mul(&a[k][j])?)?;
                        }
                    }
                }
            }
        }
    }
    let verdict = if kernel_dim == 0 { Verdict::PositiveDefinite } else { Verdict::PositiveSemidefinite };
    Ok(PositivityReport { verdict, pivots, numeric, kernel_dim })
}

impl GramMatrix {
    pub fn check_positive(&self, precision: usize) -> Result<PositivityReport, GramError> {
        check_positive(&self.entries, precision)
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().flatten().all(PhaseScalar::is_rational)
    }
}

/// Numeric values of a scalar matrix, for CSV output.
pub fn numeric_entries(m: &[Vec<PhaseScalar>], precision: usize) -> Vec<Vec<(f64, f64)>> {
    m.iter().map(|r| r.iter().map(|x| x.to_complex(precision).to_f64()).collect()).collect()
}
