//! Dense matrices of the Fock representation on a truncated occupation basis.
//!
//! Matrices are filled from closed-form column formulas
//!
//! * `a(Θ^i) Θ^α = Π_{j<i} c_ij^{α_j} Θ^{α+σ_i}`
//! * `a(Θ*_i) Θ^α = Π_{j<i} c_ji^{α_j} [α_i]_{q_i} Θ^{α−σ_i}`
//!
//! and never consult `weyl` or `fock`: words are evaluated by multiplying
//! generator matrices. Bosonic modes are cut off at the occupation cap, so
//! identities that raise the top occupation are checked below it only.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{PhaseScalar, ScalarError};
use crate::fock::FockMonomial;
use crate::statistics::{unit_pow, CommutationFactor};
use crate::weyl::{Generator, WeylError, WordExpr};

pub const DEFAULT_DIMENSION_BOUND: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("basis dimension {dim} exceeds the bound {bound}")]
    DimensionTooLarge { dim: usize, bound: usize },
    #[error("occupation cap must be at least 1")]
    ZeroCap,
    #[error("mode {mode} is out of range for N = {dim}")]
    UnknownMode { mode: usize, dim: usize },
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Occupation vectors `0 ≤ α_i ≤ caps_i` in lexicographic order.
#[derive(Debug, Clone)]
pub struct OracleBasis {
    caps: Vec<u32>,
    states: Vec<FockMonomial>,
    index: HashMap<FockMonomial, usize>,
}

impl OracleBasis {
    pub fn new(caps: Vec<u32>, bound: usize) -> Result<Self, OracleError> {
        let dim = caps.iter().try_fold(1usize, |d, &k| d.checked_mul(k as usize + 1));
        match dim {
            Some(d) if d <= bound => {}
            d => return Err(OracleError::DimensionTooLarge { dim: d.unwrap_or(usize::MAX), bound }),
        }
        let mut states = Vec::new();
        let mut cur = vec![0u32; caps.len()];
        loop {
            states.push(FockMonomial(cur.clone()));
            // odometer with the last mode fastest
            let Some(p) = (0..caps.len()).rev().find(|&p| cur[p] < caps[p]) else {
                break;
            };
            cur[p] += 1;
            cur[p + 1..].iter_mut().for_each(|x| *x = 0);
        }
        let index = states.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        Ok(OracleBasis { caps, states, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn states(&self) -> &[FockMonomial] {
        &self.states
    }

    pub fn index_of(&self, m: &FockMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// A sparse column vector over the basis.
pub type Column = BTreeMap<usize, PhaseScalar>;

fn add_into(v: &mut Column, k: usize, x: PhaseScalar) -> Result<(), ScalarError> {
    crate::weyl::accumulate(v, k, x)
}

/// A `d × d` matrix over `PhaseScalar`, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseOperator {
    columns: Vec<Column>,
}

impl DenseOperator {
    pub fn zero(dim: usize) -> Self {
        DenseOperator { columns: vec![Column::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let columns = (0..dim).map(|k| Column::from([(k, PhaseScalar::one())])).collect();
        DenseOperator { columns }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> PhaseScalar {
        self.columns[col].get(&row).cloned().unwrap_or_else(PhaseScalar::zero)
    }

    pub fn column(&self, col: usize) -> &Column {
        &self.columns[col]
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    pub fn apply(&self, v: &Column) -> Result<Column, ScalarError> {
        let mut out = Column::new();
        for (&k, x) in v {
            for (&r, y) in &self.columns[k] {
                add_into(&mut out, r, y.checked_mul(x)?)?;
            }
        }
        Ok(out)
    }

    /// The matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let columns = other.columns.iter().map(|v| self.apply(v)).collect::<Result<_, _>>()?;
        Ok(DenseOperator { columns })
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: &PhaseScalar) -> Result<Self, ScalarError> {
        let mut out = self.clone();
        for (col, v) in out.columns.iter_mut().zip(&other.columns) {
            for (&r, y) in v {
                add_into(col, r, y.checked_mul(s)?)?;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim());
        for (c, v) in self.columns.iter().enumerate() {
            for (&r, x) in v {
                out.columns[r].insert(c, x.conj());
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<PhaseScalar>> {
        (0..self.dim()).map(|r| (0..self.dim()).map(|c| self.entry(r, c)).collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<PhaseScalar>]) -> Self {
        let dim = rows.len();
        let mut out = Self::zero(dim);
        for (r, row) in rows.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.columns[c].insert(r, x.clone());
                }
            }
        }
        out
    }
}

/// Generator matrices on a truncated basis.
#[derive(Debug, Clone)]
pub struct Matrices {
    pub factor: Arc<CommutationFactor>,
    pub basis: OracleBasis,
    pub creators: Vec<DenseOperator>,
    pub annihilators: Vec<DenseOperator>,
}

impl Matrices {
    pub fn generator(&self, g: Generator) -> &DenseOperator {
        match g {
            Generator::Create(i) => &self.creators[i],
            Generator::Annihilate(i) => &self.annihilators[i],
        }
    }

    /// `a(w_1)…a(w_k) v`, the rightmost letter acting first.
    pub fn apply_word(&self, word: &[Generator], v: &Column) -> Result<Column, OracleError> {
        let mut v = v.clone();
        for &g in word.iter().rev() {
            if g.mode() >= self.creators.len() {
                return Err(OracleError::UnknownMode { mode: g.mode() + 1, dim: self.creators.len() });
            }
            v = self.generator(g).apply(&v)?;
            if v.is_empty() {
                break;
            }
        }
        Ok(v)
    }

    pub fn apply_expr(&self, x: &WordExpr, v: &Column) -> Result<Column, OracleError> {
        let mut out = Column::new();
        for (w, s) in x.terms() {
            for (k, y) in self.apply_word(w, v)? {
                add_into(&mut out, k, y.checked_mul(s)?)?;
            }
        }
        Ok(out)
    }

    /// The matrix of a word, by generator matrix products.
    pub fn word_matrix(&self, word: &[Generator]) -> Result<DenseOperator, OracleError> {
        let mut m = DenseOperator::identity(self.basis.len());
        for &g in word {
            if g.mode() >= self.creators.len() {
                return Err(OracleError::UnknownMode { mode: g.mode() + 1, dim: self.creators.len() });
            }
            m = m.mul(self.generator(g))?;
        }
        Ok(m)
    }
}

fn q_number(q: i64, n: u32) -> i64 {
    if q == 1 {
        n as i64
    } else {
        (n % 2) as i64
    }
}

/// Per-mode caps: nilpotent modes hold at most one quantum.
pub fn oracle_caps(c: &CommutationFactor, cap: u32) -> Vec<u32> {
    (0..c.dim()).map(|i| if c.is_nilpotent(i) { 1 } else { cap }).collect()
}

pub fn build_matrices(c: &Arc<CommutationFactor>, cap: u32) -> Result<Matrices, OracleError> {
    build_matrices_bounded(c, cap, DEFAULT_DIMENSION_BOUND)
}

pub fn build_matrices_bounded(c: &Arc<CommutationFactor>, cap: u32, bound: usize) -> Result<Matrices, OracleError> {
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let basis = OracleBasis::new(oracle_caps(c, cap), bound)?;
    let d = basis.len();
    let n = c.dim();
    let mut creators = vec![DenseOperator::zero(d); n];
    let mut annihilators = vec![DenseOperator::zero(d); n];
    for (k, m) in basis.states().iter().enumerate() {
        let a = m.occupation();
        for i in 0..n {
            let mut up = a.to_vec();
            up[i] += 1;
            if let Some(r) = basis.index_of(&FockMonomial(up)) {
                let mut phase = PhaseScalar::one();
                for j in 0..i {
                    phase = phase.checked_mul(&unit_pow(c.entry(i, j), a[j] as i64)?)?;
                }
                creators[i].columns[k].insert(r, phase);
            }
            if a[i] > 0 {
                let mut down = a.to_vec();
                down[i] -= 1;
                let r = basis.index_of(&FockMonomial(down)).expect("lowered state in basis");
                let mut phase = PhaseScalar::from_integer(q_number(c.parity(i), a[i]));
                for j in 0..i {
                    phase = phase.checked_mul(&unit_pow(c.entry(j, i), a[j] as i64)?)?;
                }
                if !phase.is_zero() {
                    annihilators[i].columns[k].insert(r, phase);
                }
            }
        }
    }
    Ok(Matrices { factor: Arc::clone(c), basis, creators, annihilators })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
    pub checked_columns: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub dimension: usize,
    pub caps: Vec<u32>,
    pub checks: Vec<RelationCheck>,
    pub passed: bool,
}

/// Checks `[a(Θ*_i), a(Θ^j)]_c = δ_ij`, `[a(Θ^i), a(Θ^j)]_c = 0` and
/// `[a(Θ*_i), a(Θ*_j)]_c = 0` for every ordered pair.
pub fn verify_relations(c: &Arc<CommutationFactor>, cap: u32) -> Result<RelationReport, OracleError> {
    let m = build_matrices(c, cap)?;
    let n = c.dim();
    let d = m.basis.len();
    let id = DenseOperator::identity(d);
    let minus = |x: &PhaseScalar| -x.clone();
    let mut checks = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (ci, cj, ai, aj) = (&m.creators[i], &m.creators[j], &m.annihilators[i], &m.annihilators[j]);
            let (i1, j1) = (i + 1, j + 1);

            let mut mixed = ai.mul(cj)?.add_scaled(&cj.mul(ai)?, &minus(c.entry(j, i)))?;
            if i == j {
                mixed = mixed.add_scaled(&id, &PhaseScalar::from_integer(-1))?;
            }
            // a(Θ^i) drops the top bosonic occupation, which spoils the diagonal pair there
            let cols: Vec<usize> = if i == j && !c.is_nilpotent(i) {
                (0..d).filter(|&k| m.basis.states()[k].occupation()[i] < cap).collect()
            } else {
                (0..d).collect()
            };
            let excluded = (cols.len() < d)
                .then(|| format!("{} basis vectors with occupation {cap} in mode {i1}", d - cols.len()));
            let holds = cols.iter().all(|&k| mixed.column(k).is_empty());
            let delta = if i == j { "1" } else { "0" };
            checks.push(RelationCheck {
                relation: format!("[a(T*{i1}), a(T{j1})]_c = {delta}"),
                holds,
                checked_columns: cols.len(),
                excluded,
            });

            let cc = ci.mul(cj)?.add_scaled(&cj.mul(ci)?, &minus(c.entry(i, j)))?;
            checks.push(RelationCheck {
                relation: format!("[a(T{i1}), a(T{j1})]_c = 0"),
                holds: cc.is_zero(),
                checked_columns: d,
                excluded: None,
            });

            let aa = ai.mul(aj)?.add_scaled(&aj.mul(ai)?, &minus(c.entry(i, j)))?;
            checks.push(RelationCheck {
                relation: format!("[a(T*{i1}), a(T*{j1})]_c = 0"),
                holds: aa.is_zero(),
                checked_columns: d,
                excluded: None,
            });
        }
    }
    let passed = checks.iter().all(|r| r.holds);
    Ok(RelationReport { dimension: d, caps: m.basis.caps().to_vec(), checks, passed })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub equal: bool,
    /// True when the matrix of the expression vanishes on the compared columns.
    pub zero: bool,
    pub dimension: usize,
    pub checked_columns: usize,
}

/// Evaluates `x` on every basis vector with occupations `≤ cap`, once by
/// multiplying generator matrices along each word and once through the
/// monomials of its normal form. The matrices are built with enough headroom
/// that no word reaches the truncation.
pub fn compare_symbolic(
    c: &Arc<CommutationFactor>,
    x: &WordExpr,
    cap: u32,
    bound: usize,
) -> Result<Comparison, OracleError> {
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let nf = WordExpr::from(&x.normal_form(c)?);
    let reach = x.max_len().max(nf.max_len()) as u32;
    let m = build_matrices_bounded(c, cap + reach, bound)?;
    let mut equal = true;
    let mut zero = true;
    let mut checked = 0;
    for (k, s) in m.basis.states().iter().enumerate() {
        if s.occupation().iter().any(|&a| a > cap) {
            continue;
        }
        checked += 1;
        let v = Column::from([(k, PhaseScalar::one())]);
        let direct = m.apply_expr(x, &v)?;
        let symbolic = m.apply_expr(&nf, &v)?;
        equal &= direct == symbolic;
        zero &= direct.is_empty() && symbolic.is_empty();
    }
    Ok(Comparison { equal, zero, dimension: m.basis.len(), checked_columns: checked })
}

/// `compare_symbolic` for a single word.
pub fn compare_word(c: &Arc<CommutationFactor>, word: &[Generator], cap: u32) -> Result<Comparison, OracleError> {
    compare_symbolic(c, &WordExpr::word(word.to_vec(), PhaseScalar::one()), cap, DEFAULT_DIMENSION_BOUND)
}
