//! Grading group, grade vectors and commutation factors.
//!
//! Γ is `Z^N` with generators `σ_i`, optionally reduced to `Z_n^N`. A
//! commutation factor is stored extensionally: the full matrix `c_ij` with
//! the parities `q_i = c_ii` on the diagonal.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("grade has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grade modulus {found:?} does not match factor modulus {expected:?}")]
    ModulusMismatch { expected: Option<u32>, found: Option<u32> },
    #[error("factor matrix must be square and non-empty")]
    NotSquare,
    #[error("parity q_{mode} = {value} is not +1 or -1")]
    InvalidParity { mode: usize, value: String },
    #[error("parity bit S_{mode} = {value} is not 0 or 1")]
    InvalidParityBit { mode: usize, value: i64 },
    #[error("c_{i}{j}·c_{j}{i} = {product} ≠ 1")]
    NotInverse { i: usize, j: usize, product: String },
    #[error("|c_{i}{j}| ≠ 1 for c_{i}{j} = {value}")]
    NotUnitModulus { i: usize, j: usize, value: String },
    #[error("invalid Omega: {0}")]
    InvalidOmega(String),
    #[error("preset {preset} requires {expected} N, got N = {n}")]
    PresetParity { preset: &'static str, expected: &'static str, n: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("factor dimension N must be at least 1")]
    EmptyDimension,
    #[error("descriptor field `{0}` is required")]
    MissingField(&'static str),
    #[error("reduction to Z_{n} invalid: (c_{i}{j})^{n} = {value} ≠ 1")]
    ReductionInvalid { i: usize, j: usize, n: u32, value: String },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An element `Σ α^i σ_i` of Γ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GradeVector {
    coords: Vec<i64>,
    modulus: Option<u32>,
}

impl GradeVector {
    pub fn new(coords: Vec<i64>, modulus: Option<u32>) -> Self {
        let mut g = GradeVector { coords, modulus };
        g.normalize();
        g
    }

    pub fn zero(dim: usize, modulus: Option<u32>) -> Self {
        GradeVector { coords: vec![0; dim], modulus }
    }

    /// The generator `σ_i` (0-based mode).
    pub fn basis(dim: usize, mode: usize, modulus: Option<u32>) -> Self {
        let mut coords = vec![0; dim];
        coords[mode] = 1;
        Self::new(coords, modulus)
    }

    fn normalize(&mut self) {
        if let Some(n) = self.modulus {
            for x in &mut self.coords {
                *x = x.rem_euclid(n as i64);
            }
        }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn modulus(&self) -> Option<u32> {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    pub fn with_modulus(&self, modulus: Option<u32>) -> Self {
        Self::new(self.coords.clone(), modulus)
    }

    fn zip(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        assert_eq!(self.coords.len(), other.coords.len(), "grade dimension mismatch");
        assert_eq!(self.modulus, other.modulus, "grade modulus mismatch");
        Self::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect(), self.modulus)
    }
}

impl Add for &GradeVector {
    type Output = GradeVector;
    fn add(self, rhs: &GradeVector) -> GradeVector {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &GradeVector {
    type Output = GradeVector;
    fn sub(self, rhs: &GradeVector) -> GradeVector {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &GradeVector {
    type Output = GradeVector;
    fn neg(self) -> GradeVector {
        GradeVector::new(self.coords.iter().map(|x| -x).collect(), self.modulus)
    }
}

impl fmt::Display for GradeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))?;
        if let Some(n) = self.modulus {
            write!(f, " mod {n}")?;
        }
        Ok(())
    }
}

/// A validated commutation factor on Γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationFactor {
    // full matrix, c[i][i] = q_i
    matrix: Vec<Vec<PhaseScalar>>,
    reduced_modulus: Option<u32>,
}

impl CommutationFactor {
    /// Validates `c_ii = ±1`, `c_ij c_ji = 1` and `|c_ij| = 1`.
    pub fn new(matrix: Vec<Vec<PhaseScalar>>) -> Result<Self, FactorError> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|row| row.len() != n) {
            return Err(FactorError::NotSquare);
        }
        for (i, row) in matrix.iter().enumerate() {
            let q = &row[i];
            if !(q.is_one() || (-q).is_one()) {
                return Err(FactorError::InvalidParity { mode: i + 1, value: q.to_string() });
            }
            for j in 0..n {
                let cij = &row[j];
                let norm = cij.checked_mul(&cij.conj())?;
                if !norm.is_one() {
                    return Err(FactorError::NotUnitModulus { i: i + 1, j: j + 1, value: cij.to_string() });
                }
                let prod = cij.checked_mul(&matrix[j][i])?;
                if !prod.is_one() {
                    return Err(FactorError::NotInverse { i: i + 1, j: j + 1, product: prod.to_string() });
                }
            }
        }
        Ok(CommutationFactor { matrix, reduced_modulus: None })
    }

    /// Builds the factor from parities and the strictly upper entries
    /// `c_ij (i < j)`; lower entries are the inverses.
    pub fn from_upper(
        parities: &[i64],
        mut upper: impl FnMut(usize, usize) -> PhaseScalar,
    ) -> Result<Self, FactorError> {
        let n = parities.len();
        if n == 0 {
            return Err(FactorError::EmptyDimension);
        }
        let mut matrix = vec![vec![PhaseScalar::one(); n]; n];
        for i in 0..n {
            matrix[i][i] = PhaseScalar::from_integer(parities[i]);
            for j in i + 1..n {
                let cij = upper(i, j);
                // unit modulus makes the inverse the conjugate
                matrix[j][i] = cij.conj();
                matrix[i][j] = cij;
            }
        }
        Self::new(matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &PhaseScalar {
        &self.matrix[i][j]
    }

    pub fn matrix(&self) -> &[Vec<PhaseScalar>] {
        &self.matrix
    }

    /// Parity `q_i` as ±1.
    pub fn parity(&self, i: usize) -> i64 {
        if self.matrix[i][i].is_one() {
            1
        } else {
            -1
        }
    }

    /// Parity bits `S_i` with `q_i = (-1)^{S_i}`.
    pub fn parity_bits(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| u8::from(self.parity(i) == -1)).collect()
    }

    pub fn is_nilpotent(&self, i: usize) -> bool {
        self.parity(i) == -1
    }

    pub fn reduced_modulus(&self) -> Option<u32> {
        self.reduced_modulus
    }

    /// `σ_i` in this factor's grading group.
    pub fn sigma(&self, i: usize) -> GradeVector {
        GradeVector::basis(self.dim(), i, self.reduced_modulus)
    }

    pub fn zero_grade(&self) -> GradeVector {
        GradeVector::zero(self.dim(), self.reduced_modulus)
    }

    /// True when every entry is rational (hence ±1).
    pub fn is_rational(&self) -> bool {
        self.matrix.iter().flatten().all(PhaseScalar::is_rational)
    }

    fn check_grade(&self, a: &GradeVector) -> Result<(), FactorError> {
        if a.dim() != self.dim() {
            return Err(FactorError::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        if a.modulus() != self.reduced_modulus {
            return Err(FactorError::ModulusMismatch { expected: self.reduced_modulus, found: a.modulus() });
        }
        Ok(())
    }
}

/// `c(α, β) = Π_i q_i^{α^i β^i} · Π_{i<j} c_ij^{α^i β^j − α^j β^i}`.
pub fn eval_factor(c: &CommutationFactor, a: &GradeVector, b: &GradeVector) -> Result<PhaseScalar, FactorError> {
    c.check_grade(a)?;
    c.check_grade(b)?;
    let (x, y) = (a.coords(), b.coords());
    let n = c.dim();
    let mut sign = 0i64;
    let mut acc = PhaseScalar::one();
    for i in 0..n {
        if c.parity(i) == -1 {
            sign += x[i] * y[i];
        }
        for j in i + 1..n {
            let e = x[i] * y[j] - x[j] * y[i];
            if e != 0 {
                acc = acc.checked_mul(&unit_pow(c.entry(i, j), e)?)?;
            }
        }
    }
    if sign.rem_euclid(2) == 1 {
        acc = -acc;
    }
    Ok(acc)
}

// powers of a unit-modulus scalar; negative exponents go through conj
pub(crate) fn unit_pow(x: &PhaseScalar, e: i64) -> Result<PhaseScalar, ScalarError> {
    if x.is_one() {
        return Ok(x.clone());
    }
    if (-x).is_one() {
        return Ok(if e.rem_euclid(2) == 0 { PhaseScalar::one() } else { x.clone() });
    }
    if e < 0 {
        x.conj().pow(-e)
    } else {
        x.pow(e)
    }
}

/// Splits `c = c′·b` with `c′` the sign part and `b` parity-free.
pub fn factorize(c: &CommutationFactor) -> Result<(CommutationFactor, CommutationFactor), FactorError> {
    let n = c.dim();
    let both_odd = |i: usize, j: usize| c.parity(i) == -1 && c.parity(j) == -1;
    let mut cp = vec![vec![PhaseScalar::one(); n]; n];
    let mut b = vec![vec![PhaseScalar::one(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                cp[i][i] = PhaseScalar::from_integer(c.parity(i));
            } else if both_odd(i, j) {
                cp[i][j] = PhaseScalar::from_integer(-1);
                b[i][j] = -c.entry(i, j);
            } else {
                b[i][j] = c.entry(i, j).clone();
            }
        }
    }
    let mut cp = CommutationFactor::new(cp)?;
    let mut b = CommutationFactor::new(b)?;
    cp.reduced_modulus = c.reduced_modulus;
    b.reduced_modulus = c.reduced_modulus;
    Ok((cp, b))
}

/// `π(α) = Σ S_i α^i mod 2`, the image of α in `Γ/Γ₀`.
pub fn quotient_grade(c: &CommutationFactor, a: &GradeVector) -> Result<u8, FactorError> {
    c.check_grade(a)?;
    let s: i64 = c.parity_bits().iter().zip(a.coords()).map(|(&s, &x)| s as i64 * x).sum();
    Ok(s.rem_euclid(2) as u8)
}

/// Reinterprets `c` on `Z_n^N`; every entry must be an `n`-th root of unity.
pub fn reduce_group(c: &CommutationFactor, n: u32) -> Result<CommutationFactor, FactorError> {
    if n == 0 {
        return Err(FactorError::ZeroModulus);
    }
    for i in 0..c.dim() {
        for j in 0..c.dim() {
            let p = unit_pow(c.entry(i, j), n as i64)?;
            if !p.is_one() {
                return Err(FactorError::ReductionInvalid { i: i + 1, j: j + 1, n, value: p.to_string() });
            }
        }
    }
    Ok(CommutationFactor { matrix: c.matrix.clone(), reduced_modulus: Some(n) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    AppendixEven,
    AppendixOdd,
    Example3Cf,
    Example4Cb,
    Clifford,
    OmegaGeneral,
}

impl PresetKind {
    pub const ALL: [PresetKind; 6] = [
        PresetKind::AppendixEven,
        PresetKind::AppendixOdd,
        PresetKind::Example3Cf,
        PresetKind::Example4Cb,
        PresetKind::Clifford,
        PresetKind::OmegaGeneral,
    ];

    /// The four fixed presets the verification suites sweep over.
    pub const CORE: [PresetKind; 4] =
        [PresetKind::AppendixEven, PresetKind::AppendixOdd, PresetKind::Example3Cf, PresetKind::Example4Cb];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::AppendixEven => "appendix_even",
            PresetKind::AppendixOdd => "appendix_odd",
            PresetKind::Example3Cf => "example3_cf",
            PresetKind::Example4Cb => "example4_cb",
            PresetKind::Clifford => "clifford",
            PresetKind::OmegaGeneral => "omega_general",
        }
    }

    /// Whether `n` is an admissible size for this preset.
    pub fn accepts(self, n: usize) -> bool {
        match self {
            PresetKind::AppendixEven => n.is_multiple_of(2),
            PresetKind::AppendixOdd => n % 2 == 1,
            _ => true,
        }
    }
}

impl PresetKind {
    /// Sizes `1..=max` this preset admits.
    pub fn sizes_up_to(self, max: usize) -> Vec<usize> {
        (1..=max).filter(|&n| self.accepts(n)).collect()
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetKind {
    type Err = FactorError;
    fn from_str(s: &str) -> Result<Self, FactorError> {
        PresetKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| FactorError::UnknownPreset(s.to_string()))
    }
}

/// `ω = ζ_order^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSpec {
    pub order: u32,
    pub exp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaData {
    pub s: Vec<i64>,
    pub omega_matrix: Vec<Vec<i64>>,
    pub omega: RootSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPreset {
    pub kind: PresetKind,
    pub n: usize,
    pub data: Option<OmegaData>,
}

impl FactorPreset {
    pub fn new(kind: PresetKind, n: usize) -> Self {
        FactorPreset { kind, n, data: None }
    }

    pub fn omega_general(s: Vec<i64>, omega_matrix: Vec<Vec<i64>>, omega: RootSpec) -> Self {
        FactorPreset { kind: PresetKind::OmegaGeneral, n: s.len(), data: Some(OmegaData { s, omega_matrix, omega }) }
    }
}

fn fixed(n: usize, q: i64, off: i64) -> Result<CommutationFactor, FactorError> {
    CommutationFactor::from_upper(&vec![q; n], |_, _| PhaseScalar::from_integer(off))
}

// q_i = (-1)^{S_i}, c_ij = c′_ij·ω^{Ω_ij} for i < j
fn from_omega(d: &OmegaData) -> Result<CommutationFactor, FactorError> {
    let n = d.s.len();
    if n == 0 {
        return Err(FactorError::EmptyDimension);
    }
    if d.omega_matrix.len() != n || d.omega_matrix.iter().any(|r| r.len() != n) {
        return Err(FactorError::InvalidOmega(format!("expected a {n}×{n} matrix")));
    }
    if let Some(i) = (0..n).find(|&i| d.omega_matrix[i][i] != 0) {
        return Err(FactorError::InvalidOmega(format!("diagonal entry Omega_{0}{0} must be 0", i + 1)));
    }
    if let Some((i, &v)) = d.s.iter().enumerate().find(|(_, &v)| v != 0 && v != 1) {
        return Err(FactorError::InvalidParityBit { mode: i + 1, value: v });
    }
    let omega = PhaseScalar::root_of_unity(d.omega.order, d.omega.exp)?;
    let parities: Vec<i64> = d.s.iter().map(|&s| if s == 1 { -1 } else { 1 }).collect();
    let mut err = None;
    let f = CommutationFactor::from_upper(&parities, |i, j| {
        let sign = if parities[i] == -1 && parities[j] == -1 { -1 } else { 1 };
        match unit_pow(&omega, d.omega_matrix[i][j]) {
            Ok(p) => p.scale(&num_rational::BigRational::from_integer(sign.into())),
            Err(e) => {
                err = Some(e);
                PhaseScalar::one()
            }
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => f,
    }
}

pub fn make_factor(preset: &FactorPreset) -> Result<CommutationFactor, FactorError> {
    let n = preset.n;
    if n == 0 {
        return Err(FactorError::EmptyDimension);
    }
    match preset.kind {
        PresetKind::AppendixEven | PresetKind::AppendixOdd if !preset.kind.accepts(n) => {
            Err(FactorError::PresetParity {
                preset: preset.kind.name(),
                expected: if preset.kind == PresetKind::AppendixEven { "even" } else { "odd" },
                n,
            })
        }
        // c_ij = −(−1)^N (−1)^{Ω_ij}, Ω_ij = 1 − δ_ij
        PresetKind::AppendixEven => fixed(n, -1, 1),
        PresetKind::AppendixOdd => fixed(n, 1, -1),
        PresetKind::Example3Cf => fixed(n, 1, -1),
        PresetKind::Example4Cb => fixed(n, -1, 1),
        PresetKind::Clifford => fixed(n, 1, -1),
        PresetKind::OmegaGeneral => {
            let data = preset.data.as_ref().ok_or(FactorError::MissingField("Omega"))?;
            if data.s.len() != n {
                return Err(FactorError::DimensionMismatch { expected: n, found: data.s.len() });
            }
            from_omega(data)
        }
    }
}

/// JSON descriptor of a factor: a named preset, `(S, Ω, ω)` data, or the
/// full matrix `c` with parities on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDescriptor {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetKind>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<i64>>,
    #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
    pub omega_matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<RootSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<PhaseScalar>>>,
}

impl FactorDescriptor {
    pub fn preset(kind: PresetKind, n: usize) -> Self {
        FactorDescriptor { n, preset: Some(kind), s: None, omega_matrix: None, omega: None, modulus: None, c: None }
    }

    pub fn to_preset(&self) -> Result<FactorPreset, FactorError> {
        let explicit = self.s.is_some() || self.omega_matrix.is_some() || self.omega.is_some();
        match self.preset {
            Some(kind) if kind != PresetKind::OmegaGeneral && !explicit => Ok(FactorPreset::new(kind, self.n)),
            Some(kind) if kind != PresetKind::OmegaGeneral => {
                Err(FactorError::InvalidOmega(format!("preset {kind} takes no S/Omega/omega data")))
            }
            _ => {
                let s = self.s.clone().ok_or(FactorError::MissingField("S"))?;
                let omega_matrix = self.omega_matrix.clone().ok_or(FactorError::MissingField("Omega"))?;
                let omega = self.omega.ok_or(FactorError::MissingField("omega"))?;
                if s.len() != self.n {
                    return Err(FactorError::DimensionMismatch { expected: self.n, found: s.len() });
                }
                Ok(FactorPreset::omega_general(s, omega_matrix, omega))
            }
        }
    }

    pub fn build(&self) -> Result<CommutationFactor, FactorError> {
        let c = match &self.c {
            Some(_) if self.preset.is_some() || self.s.is_some() || self.omega_matrix.is_some() => {
                return Err(FactorError::InvalidOmega("a raw matrix `c` excludes preset and S/Omega data".into()))
            }
            Some(m) => {
                if m.len() != self.n {
                    return Err(FactorError::DimensionMismatch { expected: self.n, found: m.len() });
                }
                CommutationFactor::new(m.clone())?
            }
            None => make_factor(&self.to_preset()?)?,
        };
        match self.modulus {
            Some(n) => reduce_group(&c, n),
            None => Ok(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn preset(kind: PresetKind, n: usize) -> CommutationFactor {
        make_factor(&FactorPreset::new(kind, n)).unwrap()
    }

    fn ints(c: &CommutationFactor) -> Vec<Vec<i64>> {
        c.matrix()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        if x.is_one() {
                            1
                        } else if (-x).is_one() {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn sigma_sum(c: &CommutationFactor, modes: &[usize]) -> GradeVector {
        modes.iter().fold(c.zero_grade(), |g, &i| &g + &c.sigma(i))
    }

    // Π_{i,j} c_ij^{α^i β^j} over all index pairs
    fn brute_eval(c: &CommutationFactor, a: &GradeVector, b: &GradeVector) -> PhaseScalar {
        let mut acc = PhaseScalar::one();
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                let e = a.coords()[i] * b.coords()[j];
                acc = acc * c.entry(i, j).pow(e).unwrap();
            }
        }
        acc
    }

    #[test]
    fn preset_values() {
        assert_eq!(ints(&preset(PresetKind::AppendixEven, 2)), vec![vec![-1, 1], vec![1, -1]]);
        assert_eq!(ints(&preset(PresetKind::AppendixOdd, 3)), vec![vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]]);
        assert_eq!(ints(&preset(PresetKind::Example3Cf, 2)), vec![vec![1, -1], vec![-1, 1]]);
        assert_eq!(ints(&preset(PresetKind::Example4Cb, 2)), vec![vec![-1, 1], vec![1, -1]]);
        assert_eq!(ints(&preset(PresetKind::Clifford, 2)), vec![vec![1, -1], vec![-1, 1]]);
        let single = preset(PresetKind::Example3Cf, 1);
        assert_eq!(single.dim(), 1);
    }

    #[test]
    fn electron_presets_by_parity() {
        for n in 1..=6 {
            let (kind, q, off) =
                if n % 2 == 0 { (PresetKind::AppendixEven, -1, 1) } else { (PresetKind::AppendixOdd, 1, -1) };
            let m = ints(&preset(kind, n));
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(m[i][j], if i == j { q } else { off });
                }
            }
        }
        assert!(matches!(
            make_factor(&FactorPreset::new(PresetKind::AppendixEven, 3)),
            Err(FactorError::PresetParity { .. })
        ));
    }

    #[test]
    fn appendix_presets_match_omega_data() {
        for n in 1..=5usize {
            let kind = if n % 2 == 0 { PresetKind::AppendixEven } else { PresetKind::AppendixOdd };
            let s = vec![(n % 2 == 0) as i64; n];
            let om: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i != j)).collect()).collect();
            let general = make_factor(&FactorPreset::omega_general(s, om, RootSpec { order: 2, exp: 1 })).unwrap();
            assert_eq!(general, preset(kind, n));
        }
    }

    #[test]
    fn validation_names_the_invariant() {
        let one = PhaseScalar::one;
        let bad = CommutationFactor::new(vec![vec![one(), PhaseScalar::from_integer(-1)], vec![one(), one()]]);
        let err = bad.unwrap_err();
        assert!(matches!(err, FactorError::NotInverse { i: 1, j: 2, .. }));
        assert!(err.to_string().contains("c_12·c_21"));
        let w = PhaseScalar::root_of_unity(4, 1).unwrap();
        let bad_q = CommutationFactor::new(vec![vec![w]]);
        assert!(matches!(bad_q, Err(FactorError::InvalidParity { .. })));
        let two = PhaseScalar::from_integer(2);
        let bad_mod = CommutationFactor::new(vec![vec![one(), two], vec![PhaseScalar::ratio(1, 2), one()]]);
        assert!(matches!(bad_mod, Err(FactorError::NotUnitModulus { .. })));
    }

    #[test]
    fn omega_validation() {
        let root = RootSpec { order: 3, exp: 1 };
        let diag = FactorPreset::omega_general(vec![0, 0], vec![vec![1, 1], vec![0, 0]], root);
        assert!(matches!(make_factor(&diag), Err(FactorError::InvalidOmega(_))));
        let shape = FactorPreset::omega_general(vec![0, 0], vec![vec![0, 1]], root);
        assert!(matches!(make_factor(&shape), Err(FactorError::InvalidOmega(_))));
        let bit = FactorPreset::omega_general(vec![2, 0], vec![vec![0, 1], vec![-1, 0]], root);
        assert!(matches!(make_factor(&bit), Err(FactorError::InvalidParityBit { .. })));
        // any zero-diagonal integer matrix is accepted; only the upper part is read
        let loose = FactorPreset::omega_general(vec![0, 1], vec![vec![0, 2], vec![5, 0]], root);
        let c = make_factor(&loose).unwrap();
        assert_eq!(c.entry(0, 1), &PhaseScalar::root_of_unity(3, 2).unwrap());
    }

    #[test]
    fn eval_examples() {
        let c = preset(PresetKind::AppendixEven, 2);
        assert!(eval_factor(&c, &c.sigma(0), &c.sigma(1)).unwrap().is_one());
        assert!(eval_factor(&c, &c.zero_grade(), &sigma_sum(&c, &[0, 1, 1])).unwrap().is_one());
        let a = sigma_sum(&c, &[0, 1]);
        let v = eval_factor(&c, &a, &c.sigma(0)).unwrap();
        assert_eq!(v, PhaseScalar::from_integer(-1));
        assert_eq!(v, brute_eval(&c, &a, &c.sigma(0)));
        let wrong = GradeVector::zero(3, None);
        assert!(matches!(eval_factor(&c, &wrong, &a), Err(FactorError::DimensionMismatch { .. })));
    }

    #[test]
    fn factorize_examples() {
        let (cp, b) = factorize(&preset(PresetKind::Example4Cb, 2)).unwrap();
        assert_eq!(ints(&cp)[0][1], -1);
        assert_eq!(ints(&b)[0][1], -1);
        let (cp, b) = factorize(&preset(PresetKind::Example3Cf, 2)).unwrap();
        assert_eq!(ints(&cp)[0][1], 1);
        assert_eq!(ints(&b)[0][1], -1);
        let trivial = fixed(3, 1, 1).unwrap();
        let (cp, b) = factorize(&trivial).unwrap();
        assert_eq!(cp, trivial);
        assert_eq!(b, trivial);
        assert!((0..3).all(|i| b.parity(i) == 1));
    }

    #[test]
    fn quotient_examples() {
        let c = preset(PresetKind::Example3Cf, 3);
        assert_eq!(quotient_grade(&c, &sigma_sum(&c, &[0, 2, 2])).unwrap(), 0);
        let c = preset(PresetKind::Example4Cb, 3);
        let a = sigma_sum(&c, &[0, 1]);
        assert_eq!(quotient_grade(&c, &a).unwrap(), 0);
        assert!(eval_factor(&c, &a, &a).unwrap().is_one());
        assert_eq!(quotient_grade(&c, &c.sigma(0)).unwrap(), 1);
    }

    #[test]
    fn reduction_examples() {
        let c = preset(PresetKind::Example4Cb, 3);
        let r = reduce_group(&c, 2).unwrap();
        assert_eq!(r.reduced_modulus(), Some(2));
        let root = RootSpec { order: 3, exp: 1 };
        let om = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]];
        let w3 = make_factor(&FactorPreset::omega_general(vec![0, 0, 0], om, root)).unwrap();
        assert!(reduce_group(&w3, 3).is_ok());
        assert!(matches!(reduce_group(&w3, 2), Err(FactorError::ReductionInvalid { .. })));
        // agreement on representatives
        let reduced = reduce_group(&w3, 3).unwrap();
        let a = GradeVector::new(vec![2, 1, 0], None);
        let b = GradeVector::new(vec![1, 2, 2], None);
        let lhs = eval_factor(&reduced, &a.with_modulus(Some(3)), &b.with_modulus(Some(3))).unwrap();
        assert_eq!(lhs, eval_factor(&w3, &a, &b).unwrap());
    }

    #[test]
    fn descriptor_round_trip() {
        let texts = [
            r#"{"N":3,"preset":"example4_cb"}"#,
            r#"{"N":3,"S":[1,1,1],"Omega":[[0,1,1],[-1,0,1],[-1,-1,0]],"omega":{"order":2,"exp":1},"modulus":2}"#,
        ];
        for text in texts {
            let d: FactorDescriptor = serde_json::from_str(text).unwrap();
            assert_eq!(serde_json::to_string(&d).unwrap(), text);
            d.build().unwrap();
        }
        let d: FactorDescriptor = serde_json::from_str(texts[1]).unwrap();
        assert_eq!(d.build().unwrap().reduced_modulus(), Some(2));
        assert!(serde_json::from_str::<FactorDescriptor>(r#"{"N":2,"preset":"nope"}"#).is_err());
        let missing: FactorDescriptor = serde_json::from_str(r#"{"N":2}"#).unwrap();
        assert!(matches!(missing.build(), Err(FactorError::MissingField("S"))));
        let raw: FactorDescriptor = serde_json::from_str(r#"{"N":2,"c":[["1","w4^1"],["w4^3","-1"]]}"#).unwrap();
        assert_eq!(raw.build().unwrap().entry(0, 1), &PhaseScalar::root_of_unity(4, 1).unwrap());
        let bad: FactorDescriptor = serde_json::from_str(r#"{"N":2,"c":[["1","w4^1"],["w4^1","1"]]}"#).unwrap();
        assert_eq!(bad.build().unwrap_err().to_string(), "c_12·c_21 = -1 ≠ 1");
    }

    fn arb_factor() -> impl Strategy<Value = CommutationFactor> {
        (1usize..=4, 1u32..=8, 0i64..8).prop_flat_map(|(n, order, exp)| {
            (prop::collection::vec(0i64..2, n), prop::collection::vec(-3i64..4, n * n)).prop_map(move |(s, flat)| {
                let om = (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { flat[i * n + j] }).collect()).collect();
                make_factor(&FactorPreset::omega_general(s, om, RootSpec { order, exp })).unwrap()
            })
        })
    }

    fn arb_grades(k: usize) -> impl Strategy<Value = (CommutationFactor, Vec<GradeVector>)> {
        arb_factor().prop_flat_map(move |c| {
            let n = c.dim();
            let g = prop::collection::vec(-3i64..4, n).prop_map(|v| GradeVector::new(v, None));
            (Just(c), prop::collection::vec(g, k))
        })
    }

    proptest! {
        #[test]
        fn bicharacter_laws((c, g) in arb_grades(3)) {
            let e = |a: &GradeVector, b: &GradeVector| eval_factor(&c, a, b).unwrap();
            prop_assert_eq!(e(&(&g[0] + &g[1]), &g[2]), e(&g[0], &g[2]) * e(&g[1], &g[2]));
            prop_assert_eq!(e(&g[2], &(&g[0] + &g[1])), e(&g[2], &g[0]) * e(&g[2], &g[1]));
            prop_assert!((e(&g[0], &g[1]) * e(&g[1], &g[0])).is_one());
            prop_assert_eq!(e(&g[0], &g[1]), brute_eval(&c, &g[0], &g[1]));
        }

        #[test]
        fn factorization_round_trip((c, g) in arb_grades(2)) {
            let (cp, b) = factorize(&c).unwrap();
            let e = |f: &CommutationFactor| eval_factor(f, &g[0], &g[1]).unwrap();
            prop_assert_eq!(e(&c), e(&cp) * e(&b));
            let pa = quotient_grade(&c, &g[0]).unwrap();
            let pb = quotient_grade(&c, &g[1]).unwrap();
            let sign = PhaseScalar::from_integer(if pa * pb == 1 { -1 } else { 1 });
            prop_assert_eq!(e(&cp), sign);
            prop_assert!((0..b.dim()).all(|i| b.parity(i) == 1));
            let self_pair = eval_factor(&c, &g[0], &g[0]).unwrap();
            prop_assert_eq!(self_pair, PhaseScalar::from_integer(if pa == 1 { -1 } else { 1 }));
        }
    }
}
