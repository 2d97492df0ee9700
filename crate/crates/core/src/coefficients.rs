//! Exact cyclotomic scalars.
//!
//! A [`PhaseScalar`] is a rational linear combination of powers of a primitive
//! root of unity `ζ_n = e^{2πi/n}`. The representative polynomial is always
//! reduced modulo the cyclotomic polynomial `Φ_n`, so the zero scalar has an
//! empty term map and equality is an exact comparison of reduced terms.
//!
//! Mixed-order arithmetic promotes both operands to `lcm` of their orders.
//! Orders above [`order_limit`] are rejected to bound the degree of `Φ_n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cap on the root-of-unity order of any scalar.
pub const DEFAULT_ORDER_LIMIT: u32 = 360;

static ORDER_LIMIT: AtomicU32 = AtomicU32::new(DEFAULT_ORDER_LIMIT);

/// Current cap on root-of-unity orders.
pub fn order_limit() -> u32 {
    ORDER_LIMIT.load(Ordering::Relaxed)
}

/// Changes the process-wide order cap. Values below 1 are clamped to 1.
pub fn set_order_limit(limit: u32) {
    ORDER_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("root-of-unity order {order} exceeds the configured limit {limit}")]
    OrderLimit { order: u64, limit: u32 },
    #[error("root-of-unity order must be positive")]
    ZeroOrder,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

fn check_order(order: u64) -> Result<u32, ScalarError> {
    if order == 0 {
        return Err(ScalarError::ZeroOrder);
    }
    let limit = order_limit();
    if order > limit as u64 {
        return Err(ScalarError::OrderLimit { order, limit });
    }
    Ok(order as u32)
}

// Φ_n as integer coefficients, lowest degree first.
fn cyclotomic(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(poly) = cache.lock().unwrap().get(&n) {
        return Arc::clone(poly);
    }
    // x^n - 1 = Π_{d | n} Φ_d
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = exact_div_monic(&poly, &cyclotomic(d));
        }
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(n, Arc::clone(&poly));
    poly
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let t = rem[k + dd].clone();
        if t.is_zero() {
            continue;
        }
        for (j, c) in den.iter().enumerate() {
            rem[k + j] -= &t * c;
        }
        quot[k] = t;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient, i.e. the degree of `Φ_n`.
pub fn totient(n: u32) -> u32 {
    (cyclotomic(n).len() - 1) as u32
}

/// An exact element of the cyclotomic field `Q(ζ_n)`.
#[derive(Clone)]
pub struct PhaseScalar {
    order: u32,
    terms: BTreeMap<u32, BigRational>,
}

impl PhaseScalar {
    pub fn zero() -> Self {
        PhaseScalar { order: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_rational(BigRational::from_integer(value.into()))
    }

    pub fn from_rational(value: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(0, value);
        }
        PhaseScalar { order: 1, terms }
    }

    /// `p / q` as a scalar. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(p.into(), q.into()))
    }

    /// The root of unity `ζ_n^k`; `k` may be negative.
    pub fn root_of_unity(order: u32, exponent: i64) -> Result<Self, ScalarError> {
        let order = check_order(order as u64)?;
        let k = exponent.rem_euclid(order as i64) as usize;
        let mut dense = vec![BigRational::zero(); order as usize];
        dense[k] = BigRational::one();
        Ok(Self::reduce_dense(order, dense))
    }

    /// `coefficient · ζ_n^k`.
    pub fn term(coefficient: BigRational, order: u32, exponent: i64) -> Result<Self, ScalarError> {
        Ok(Self::root_of_unity(order, exponent)?.scale(&coefficient))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Reduced terms `(k, r_k)` meaning `Σ r_k ζ_n^k`, ascending in `k`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.terms.iter().map(|(&k, r)| (k, r))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// The value as a rational number, when it has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// `Σ |r_k|`, the scale used in numeric error bounds.
    pub fn abs_sum(&self) -> BigRational {
        self.terms.values().map(|r| r.abs()).fold(BigRational::zero(), |a, b| a + b)
    }

    fn reduce_dense(order: u32, mut dense: Vec<BigRational>) -> Self {
        // fold exponents onto 0..order using ζ^order = 1
        let n = order as usize;
        if dense.len() > n {
            let tail: Vec<_> = dense.drain(n..).collect();
            for (k, r) in tail.into_iter().enumerate() {
                dense[k % n] += r;
            }
        }
        let mut terms = BTreeMap::new();
        if order <= 2 {
            // Φ_1 = x - 1, Φ_2 = x + 1
            let mut value = dense.first().cloned().unwrap_or_else(BigRational::zero);
            if order == 2 && dense.len() > 1 {
                value -= &dense[1];
            }
            if !value.is_zero() {
                terms.insert(0, value);
            }
            return PhaseScalar { order, terms };
        }
        dense.resize(n, BigRational::zero());
        let phi = cyclotomic(order);
        let deg = phi.len() - 1;
        for d in (deg..n).rev() {
            if dense[d].is_zero() {
                continue;
            }
            let t = std::mem::replace(&mut dense[d], BigRational::zero());
            for (j, c) in phi.iter().enumerate().take(deg) {
                if !c.is_zero() {
                    dense[d - deg + j] -= &t * c;
                }
            }
        }
        for (k, r) in dense.into_iter().enumerate().take(deg) {
            if !r.is_zero() {
                terms.insert(k as u32, r);
            }
        }
        PhaseScalar { order, terms }
    }

    fn dense_at(&self, order: u32) -> Vec<BigRational> {
        debug_assert_eq!(order % self.order, 0);
        let step = (order / self.order) as usize;
        let mut dense = vec![BigRational::zero(); order as usize];
        for (&k, r) in &self.terms {
            dense[k as usize * step] = r.clone();
        }
        dense
    }

    fn promoted(&self, order: u32) -> Self {
        if order == self.order {
            self.clone()
        } else {
            Self::reduce_dense(order, self.dense_at(order))
        }
    }

    fn common_order(&self, other: &Self) -> Result<u32, ScalarError> {
        check_order(self.order.lcm(&other.order) as u64)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.order <= 2 && other.order <= 2 {
            let order = self.order.max(other.order);
            let value = self.terms.get(&0).cloned().unwrap_or_else(BigRational::zero)
                + other.terms.get(&0).cloned().unwrap_or_else(BigRational::zero);
            let mut out = Self::from_rational(value);
            out.order = order;
            return Ok(out);
        }
        let order = self.common_order(other)?;
        let mut out = self.promoted(order);
        for (k, r) in other.promoted(order).terms {
            let slot = out.terms.entry(k).or_insert_with(BigRational::zero);
            *slot += r;
            if slot.is_zero() {
                out.terms.remove(&k);
            }
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.order <= 2 && other.order <= 2 {
            let order = self.order.max(other.order);
            let mut out = match (self.terms.get(&0), other.terms.get(&0)) {
                (Some(a), Some(b)) => Self::from_rational(a * b),
                _ => Self::zero(),
            };
            out.order = order;
            return Ok(out);
        }
        let order = self.common_order(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(PhaseScalar { order, terms: BTreeMap::new() });
        }
        let a = self.promoted(order);
        let b = other.promoted(order);
        let n = order as usize;
        let mut dense = vec![BigRational::zero(); n];
        for (&i, x) in &a.terms {
            for (&j, y) in &b.terms {
                dense[(i as usize + j as usize) % n] += x * y;
            }
        }
        Ok(Self::reduce_dense(order, dense))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return PhaseScalar { order: self.order, terms: BTreeMap::new() };
        }
        PhaseScalar { order: self.order, terms: self.terms.iter().map(|(&k, r)| (k, r * factor)).collect() }
    }

    /// Complex conjugate: `ζ^k ↦ ζ^{-k}`.
    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        let n = self.order as usize;
        let mut dense = vec![BigRational::zero(); n];
        for (&k, r) in &self.terms {
            dense[(n - k as usize) % n] += r;
        }
        Self::reduce_dense(self.order, dense)
    }

    /// Multiplicative inverse, computed by the extended Euclidean algorithm
    /// against `Φ_n`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            let mut out = Self::from_rational(r.recip());
            out.order = self.order;
            return Ok(out);
        }
        let phi: Vec<BigRational> =
            cyclotomic(self.order).iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let mut a = vec![BigRational::zero(); phi.len() - 1];
        for (&k, r) in &self.terms {
            a[k as usize] = r.clone();
        }
        let u = poly::inverse_mod(&a, &phi);
        Ok(Self::reduce_dense(self.order, u))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, exponent: i64) -> Result<Self, ScalarError> {
        let base = if exponent < 0 { self.inv()? } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut acc = Self::one();
        acc.order = self.order;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Numeric value with at least `precision` bits of accuracy relative to
    /// `1 + Σ|r_k|`. Precision below 53 is raised to 53.
    pub fn to_complex(&self, precision: usize) -> ComplexApprox {
        let precision = precision.max(53);
        let wp = precision + 64;
        let rm = RoundingMode::ToEven;
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            let mut re = BigFloat::from_i64(0, wp);
            let mut im = BigFloat::from_i64(0, wp);
            let two_pi_over_n = cc.pi(wp, rm).mul(&BigFloat::from_i64(2, wp), wp, rm).div(
                &BigFloat::from_i64(self.order as i64, wp),
                wp,
                rm,
            );
            for (&k, r) in &self.terms {
                let coef = rational_to_float(r, wp, &mut cc);
                if k == 0 {
                    re = re.add(&coef, wp, rm);
                    continue;
                }
                let angle = two_pi_over_n.mul(&BigFloat::from_i64(k as i64, wp), wp, rm);
                re = re.add(&coef.mul(&angle.cos(wp, rm, &mut cc), wp, rm), wp, rm);
                im = im.add(&coef.mul(&angle.sin(wp, rm, &mut cc), wp, rm), wp, rm);
            }
            ComplexApprox { re, im, precision }
        })
    }
}

thread_local! {
    static CONSTS: std::cell::RefCell<Consts> =
        std::cell::RefCell::new(Consts::new().expect("constants cache"));
}

fn rational_to_float(r: &BigRational, p: usize, cc: &mut Consts) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let num = BigFloat::parse(&r.numer().to_string(), Radix::Dec, p, rm, cc);
    let den = BigFloat::parse(&r.denom().to_string(), Radix::Dec, p, rm, cc);
    num.div(&den, p, rm)
}

/// A high-precision complex approximation returned by
/// [`PhaseScalar::to_complex`].
#[derive(Debug, Clone)]
pub struct ComplexApprox {
    pub re: BigFloat,
    pub im: BigFloat,
    precision: usize,
}

impl ComplexApprox {
    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (float_to_f64(&self.re), float_to_f64(&self.im))
    }

    /// The real part as an exact (dyadic) rational.
    pub fn re_rational(&self) -> BigRational {
        float_to_rational(&self.re)
    }

    pub fn im_rational(&self) -> BigRational {
        float_to_rational(&self.im)
    }
}

fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

fn float_to_rational(x: &BigFloat) -> BigRational {
    let Some((words, bits, sign, exp, _)) = x.as_raw_parts() else {
        return BigRational::zero();
    };
    let mut mantissa = BigInt::zero();
    for w in words.iter().rev() {
        mantissa = (mantissa << 64) + BigInt::from(*w);
    }
    if sign == Sign::Neg {
        mantissa = -mantissa;
    }
    let shift = exp as i64 - bits as i64;
    if shift >= 0 {
        BigRational::from_integer(mantissa << shift as usize)
    } else {
        BigRational::new(mantissa, BigInt::one() << (-shift) as usize)
    }
}

mod poly {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn trim(p: &mut Vec<BigRational>) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut rem = a.to_vec();
        trim(&mut rem);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if rem.len() < b.len() {
            return (vec![], rem);
        }
        let mut quot = vec![BigRational::zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let t = &rem[k + db] / &lead;
            if t.is_zero() {
                continue;
            }
            for (j, c) in b.iter().enumerate() {
                rem[k + j] -= &t * c;
            }
            quot[k] = t;
        }
        trim(&mut rem);
        (quot, rem)
    }

    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// `u` with `a·u ≡ 1 (mod m)`, for `a` coprime to the irreducible `m`.
    pub(super) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant gcd
        let g = r0[0].clone();
        s0.iter().map(|c| c / &g).collect()
    }
}

impl PartialEq for PhaseScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order || (self.order <= 2 && other.order <= 2) {
            return self.terms == other.terms;
        }
        let order = self.order.lcm(&other.order);
        self.promoted(order).terms == other.promoted(order).terms
    }
}

impl Eq for PhaseScalar {}

impl Default for PhaseScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for PhaseScalar {
    fn from(value: i64) -> Self {
        Self::from_integer(value)
    }
}

impl From<BigRational> for PhaseScalar {
    fn from(value: BigRational) -> Self {
        Self::from_rational(value)
    }
}

// Operator impls panic when the order limit is exceeded; use the `checked_*`
// methods where that can happen.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&PhaseScalar> for &PhaseScalar {
            type Output = PhaseScalar;
            fn $method(self, rhs: &PhaseScalar) -> PhaseScalar {
                self.$checked(rhs).expect("scalar order limit exceeded")
            }
        }
        impl $trait<PhaseScalar> for PhaseScalar {
            type Output = PhaseScalar;
            fn $method(self, rhs: PhaseScalar) -> PhaseScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&PhaseScalar> for PhaseScalar {
            type Output = PhaseScalar;
            fn $method(self, rhs: &PhaseScalar) -> PhaseScalar {
                (&self).$method(rhs)
            }
        }
    };
}

impl PhaseScalar {
    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.checked_add(&-other)
    }
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &PhaseScalar {
    type Output = PhaseScalar;
    fn neg(self) -> PhaseScalar {
        PhaseScalar { order: self.order, terms: self.terms.iter().map(|(&k, r)| (k, -r)).collect() }
    }
}

impl Neg for PhaseScalar {
    type Output = PhaseScalar;
    fn neg(self) -> PhaseScalar {
        -&self
    }
}

impl std::iter::Sum for PhaseScalar {
    fn sum<I: Iterator<Item = PhaseScalar>>(iter: I) -> Self {
        iter.fold(PhaseScalar::zero(), |a, b| a + b)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats one term `r·ζ_n^k` with its sign folded into the text.
pub(crate) fn fmt_term(order: u32, k: u32, r: &BigRational) -> String {
    if k == 0 {
        return fmt_rational(r);
    }
    let phase = format!("w{order}^{k}");
    if r.is_one() {
        phase
    } else if (-r).is_one() {
        format!("-{phase}")
    } else {
        format!("{}*{phase}", fmt_rational(r))
    }
}

impl fmt::Display for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (&k, r)) in self.terms.iter().enumerate() {
            if idx == 0 {
                f.write_str(&fmt_term(self.order, k, r))?;
            } else if r.is_negative() {
                write!(f, " - {}", fmt_term(self.order, k, &-r))?;
            } else {
                write!(f, " + {}", fmt_term(self.order, k, r))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseScalar({self} @ order {})", self.order)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        rest[..len].parse().ok()
    }
}

impl FromStr for PhaseScalar {
    type Err = ScalarError;

    /// Parses the canonical text form, e.g. `-1/2 + 3*w4^1 - w3^2`.
    fn from_str(text: &str) -> Result<Self, ScalarError> {
        let err = |reason: &str| ScalarError::Parse { text: text.to_string(), reason: reason.into() };
        let mut cur = Cursor { text, pos: 0 };
        let mut total = PhaseScalar::zero();
        let mut first = true;
        loop {
            let negative = if cur.eat('-') {
                true
            } else if cur.eat('+') {
                if first {
                    return Err(err("leading '+'"));
                }
                false
            } else if first {
                false
            } else if cur.peek().is_none() {
                break;
            } else {
                return Err(err("expected '+' or '-' between terms"));
            };
            first = false;
            let mut coef = BigRational::one();
            let mut has_rational = false;
            if let Some(p) = cur.integer() {
                has_rational = true;
                coef = if cur.eat('/') {
                    let q = cur.integer().ok_or_else(|| err("missing denominator"))?;
                    if q.is_zero() {
                        return Err(err("zero denominator"));
                    }
                    BigRational::new(p, q)
                } else {
                    BigRational::from_integer(p)
                };
            }
            let term = if (!has_rational || cur.eat('*')) && cur.eat('w') {
                let order = cur.integer().ok_or_else(|| err("missing root order"))?;
                if !cur.eat('^') {
                    return Err(err("expected '^' after root order"));
                }
                let neg_exp = cur.eat('-');
                let exp = cur.integer().ok_or_else(|| err("missing exponent"))?;
                let order = order.to_u64().ok_or_else(|| err("root order out of range"))?;
                let order = check_order(order)?;
                let exp = exp.to_i64().ok_or_else(|| err("exponent out of range"))?;
                PhaseScalar::term(coef, order, if neg_exp { -exp } else { exp })?
            } else if has_rational {
                PhaseScalar::from_rational(coef)
            } else {
                return Err(err("expected a rational or a phase `w<n>^<k>`"));
            };
            let term = if negative { -term } else { term };
            total = total.checked_add(&term)?;
            if cur.peek().is_none() {
                break;
            }
        }
        Ok(total)
    }
}

impl Serialize for PhaseScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PhaseScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: u32, k: i64) -> PhaseScalar {
        PhaseScalar::root_of_unity(n, k).unwrap()
    }

    fn numeric(a: &PhaseScalar) -> (f64, f64) {
        let n = a.order() as f64;
        a.terms().fold((0.0, 0.0), |(re, im), (k, r)| {
            let r = r.to_f64().unwrap();
            let t = std::f64::consts::TAU * k as f64 / n;
            (re + r * t.cos(), im + r * t.sin())
        })
    }

    #[test]
    fn cyclotomic_polynomials() {
        let coeffs = |n| cyclotomic(n).iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(coeffs(1), vec![-1, 1]);
        assert_eq!(coeffs(3), vec![1, 1, 1]);
        assert_eq!(coeffs(4), vec![1, 0, 1]);
        assert_eq!(coeffs(6), vec![1, -1, 1]);
        assert_eq!(coeffs(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(360), 96);
        // the first cyclotomic polynomial with a coefficient outside {−1, 0, 1}
        assert!(coeffs(105).contains(&-2));
    }

    #[test]
    fn additive_inverse() {
        assert!((PhaseScalar::one() + PhaseScalar::from_integer(-1)).is_zero());
    }

    #[test]
    fn zeta3_plus_zeta3_squared() {
        let sum = z(3, 1) + z(3, 2);
        assert_eq!(sum, PhaseScalar::from_integer(-1));
        let (re, im) = numeric(&z(3, 1));
        let (re2, im2) = numeric(&z(3, 2));
        assert!((re + re2 + 1.0).abs() < 1e-12 && (im + im2).abs() < 1e-12);
    }

    #[test]
    fn rational_addition() {
        assert_eq!(PhaseScalar::ratio(1, 2) + PhaseScalar::ratio(1, 3), PhaseScalar::ratio(5, 6));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(z(4, 1) * z(4, 1), PhaseScalar::from_integer(-1));
        let x = PhaseScalar::ratio(3, 7) + z(5, 2);
        assert_eq!(&x * &PhaseScalar::one(), x);
        assert_eq!(PhaseScalar::from_integer(-1) * PhaseScalar::from_integer(-1), PhaseScalar::one());
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(z(3, 1).conj(), z(3, 2));
        assert_eq!(PhaseScalar::ratio(5, 7).conj(), PhaseScalar::ratio(5, 7));
        assert_eq!(z(12, 5) * z(12, 5).conj(), PhaseScalar::one());
    }

    #[test]
    fn complex_values() {
        // error bound 2^(1-p)·(1 + Σ|r|)
        let (re, im) = z(4, 1).to_complex(128).to_f64();
        assert!(re.abs() < 1e-37 && im == 1.0);
        let (re, im) = PhaseScalar::from_integer(-1).to_complex(53).to_f64();
        assert_eq!((re, im), (-1.0, 0.0));
        let (re, im) = (PhaseScalar::one() + z(3, 1)).to_complex(128).to_f64();
        assert!((re - 0.5).abs() < 1e-15 && (im - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn mixed_orders_promote_to_lcm() {
        let x = z(4, 1) + z(6, 1);
        assert_eq!(x.order(), 12);
        // ζ_6^3 = -1 compares equal to the rational -1
        assert_eq!(z(6, 3), PhaseScalar::from_integer(-1));
        assert_eq!(z(12, 3), z(4, 1));
    }

    #[test]
    fn order_limit_is_enforced() {
        assert!(matches!(PhaseScalar::root_of_unity(361, 1), Err(ScalarError::OrderLimit { .. })));
        let a = z(8, 1);
        let b = z(9, 1);
        // lcm 72 is fine
        assert_eq!(a.checked_mul(&b).unwrap().order(), 72);
        let c = z(7, 1);
        assert!(a.checked_mul(&b).unwrap().checked_mul(&c).is_err());
    }

    #[test]
    fn inverse_and_division() {
        let x = PhaseScalar::from_integer(2) + z(5, 1) - z(5, 3);
        let inv = x.inv().unwrap();
        assert!((&x * &inv).is_one());
        assert_eq!(PhaseScalar::zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(z(7, 3).pow(-3).unwrap(), z(7, -9));
    }

    #[test]
    fn text_round_trip_examples() {
        for text in ["0", "5/6", "-1/2 + 3*w4^1", "w4^1", "-w3^1", "-1 + w6^1", "7 - 2/3*w5^2 + w5^3"] {
            let x: PhaseScalar = text.parse().unwrap();
            assert_eq!(x.to_string(), text);
        }
        let parsed: PhaseScalar = "w3^2 + w3^1".parse().unwrap();
        assert_eq!(parsed.to_string(), "-1");
        assert!("1/0".parse::<PhaseScalar>().is_err());
        assert!("w4".parse::<PhaseScalar>().is_err());
        assert!("2 3".parse::<PhaseScalar>().is_err());
    }

    #[test]
    fn serde_uses_text_form() {
        let x = PhaseScalar::ratio(-1, 2) + z(4, 1);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"-1/2 + w4^1\"");
        assert_eq!(serde_json::from_str::<PhaseScalar>(&json).unwrap(), x);
    }

    #[test]
    fn power_cycles_and_root_sums() {
        for n in 1..=12u32 {
            for k in 0..n as i64 {
                let x = z(n, k);
                assert!(x.pow(n as i64).unwrap().is_one());
            }
        }
        for n in [2u32, 3, 5, 7, 11] {
            let sum: PhaseScalar = (0..n as i64).map(|k| z(n, k)).sum();
            assert!(sum.is_zero(), "order {n}");
        }
    }

    fn arb_scalar() -> impl Strategy<Value = PhaseScalar> {
        let orders = prop::sample::select(vec![1u32, 2, 3, 4, 6, 8, 12]);
        (orders, prop::collection::vec((0i64..12, -5i64..6, 1i64..4), 0..4)).prop_map(|(n, parts)| {
            parts
                .into_iter()
                .map(|(k, p, q)| PhaseScalar::term(BigRational::new(p.into(), q.into()), n, k).unwrap())
                .sum()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), a.conj() * b.conj());
        }

        #[test]
        fn text_round_trip(a in arb_scalar()) {
            let text = a.to_string();
            let back: PhaseScalar = text.parse().unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn numeric_homomorphism(a in arb_scalar(), b in arb_scalar()) {
            let prod = (&a * &b).to_complex(128);
            let (x, y) = (a.to_complex(128), b.to_complex(128));
            let re = x.re_rational() * y.re_rational() - x.im_rational() * y.im_rational();
            let im = x.re_rational() * y.im_rational() + x.im_rational() * y.re_rational();
            let tol = BigRational::new(1.into(), BigInt::from(10).pow(12));
            prop_assert!((prod.re_rational() - re).abs() < tol);
            prop_assert!((prod.im_rational() - im).abs() < tol);
        }

        #[test]
        fn nonzero_scalars_invert(a in arb_scalar()) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }
}
