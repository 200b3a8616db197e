//! Truncated formal power series in q, generic over the coefficient ring.
//!
//! All arithmetic is exact within the chosen ring and truncated to a fixed
//! order N (coefficients of q^0 .. q^(N−1)). Multiplication and division are
//! schoolbook convolutions that iterate only the nonzero support of the
//! structured operand, so multiplying by an eta factor (O(√N) support) costs
//! O(N√N) instead of O(N²).

use crate::ring::{CoeffRing, Exact, Parity, Residue};
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation order must be at least 1")]
    EmptyTruncation,
    #[error("eta dilation must be at least 1")]
    ZeroDilation,
    #[error("coefficient backends differ: {left} vs {right}")]
    BackendMismatch { left: String, right: String },
    #[error("constant term is not a unit in the {backend} backend")]
    NonUnitConstantTerm { backend: String },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("cannot re-reduce modulo {new}: it does not divide the current modulus {old}")]
    ModulusNotDivisible { old: u64, new: u64 },
    #[error("exponent overflow while merging factors of dilation {dilation}")]
    ExponentOverflow { dilation: u32 },
}

/// A power series truncated to a fixed positive order.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: CoeffRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> Series<R> {
    /// Wrap an explicit coefficient vector. The vector length is the
    /// truncation order and must be positive.
    pub fn from_coeffs(ring: R, coeffs: Vec<R::Elem>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "series truncation order must be positive"
        );
        Series { ring, coeffs }
    }

    pub fn zero(ring: R, order: usize) -> Self {
        assert!(order > 0, "series truncation order must be positive");
        let coeffs = vec![ring.zero(); order];
        Series { ring, coeffs }
    }

    pub fn one(ring: R, order: usize) -> Self {
        let mut s = Series::zero(ring, order);
        s.coeffs[0] = s.ring.one();
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Truncation order N: coefficients of q^0 .. q^(N−1) are stored.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &R::Elem {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, value: R::Elem) {
        self.coeffs[n] = value;
    }

    fn nonzero_count(&self, upto: usize) -> usize {
        self.coeffs[..upto]
            .iter()
            .filter(|c| !self.ring.is_zero(c))
            .count()
    }
}

fn ensure_same_ring<R: CoeffRing>(a: &Series<R>, b: &Series<R>) -> Result<(), SeriesError> {
    if a.ring == b.ring {
        Ok(())
    } else {
        Err(SeriesError::BackendMismatch {
            left: a.ring.name(),
            right: b.ring.name(),
        })
    }
}

/// Classification of a support coefficient, so the convolution inner loops
/// can skip multiplications for ±1 (every eta factor is ±1-valued).
enum CoeffClass {
    One,
    NegOne,
    General,
}

struct Term<'a, E> {
    offset: usize,
    class: CoeffClass,
    value: &'a E,
}

fn support<'a, R: CoeffRing>(ring: &R, coeffs: &'a [R::Elem]) -> Vec<Term<'a, R::Elem>> {
    let one = ring.one();
    let neg_one = ring.neg(&one);
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !ring.is_zero(c))
        .map(|(offset, value)| {
            let class = if *value == one {
                CoeffClass::One
            } else if *value == neg_one {
                CoeffClass::NegOne
            } else {
                CoeffClass::General
            };
            Term {
                offset,
                class,
                value,
            }
        })
        .collect()
}

/// Product truncated to the smaller operand order.
pub fn mul<R: CoeffRing>(a: &Series<R>, b: &Series<R>) -> Result<Series<R>, SeriesError> {
    ensure_same_ring(a, b)?;
    let order = a.order().min(b.order());
    let ring = a.ring.clone();
    // Iterate the sparser operand's support; add shifted copies of the other.
    let (sparse, dense) = if a.nonzero_count(order) <= b.nonzero_count(order) {
        (a, b)
    } else {
        (b, a)
    };
    let mut out = vec![ring.zero(); order];
    for term in support(&ring, &sparse.coeffs[..order]) {
        let upper = order - term.offset;
        let src = &dense.coeffs[..upper];
        match term.class {
            CoeffClass::One => {
                for (i, c) in src.iter().enumerate() {
                    ring.add_assign(&mut out[term.offset + i], c);
                }
            }
            CoeffClass::NegOne => {
                for (i, c) in src.iter().enumerate() {
                    ring.sub_assign(&mut out[term.offset + i], c);
                }
            }
            CoeffClass::General => {
                for (i, c) in src.iter().enumerate() {
                    if !ring.is_zero(c) {
                        let p = ring.mul(term.value, c);
                        ring.add_assign(&mut out[term.offset + i], &p);
                    }
                }
            }
        }
    }
    Ok(Series { ring, coeffs: out })
}

/// Quotient a/b truncated to the smaller operand order. Requires the constant
/// term of `b` to be a unit; solves the convolution recurrence term by term,
/// iterating only the nonzero support of `b`.
pub fn div<R: CoeffRing>(a: &Series<R>, b: &Series<R>) -> Result<Series<R>, SeriesError> {
    ensure_same_ring(a, b)?;
    let order = a.order().min(b.order());
    let ring = a.ring.clone();
    let lead = &b.coeffs[0];
    let lead_inv = ring
        .inv(lead)
        .ok_or_else(|| SeriesError::NonUnitConstantTerm {
            backend: ring.name(),
        })?;
    let lead_is_one = *lead == ring.one();
    let tail = support(&ring, &b.coeffs[1..order]);
    let mut c: Vec<R::Elem> = Vec::with_capacity(order);
    for n in 0..order {
        let mut acc = a.coeffs[n].clone();
        for term in &tail {
            let j = term.offset + 1;
            if j > n {
                break;
            }
            let prior = &c[n - j];
            if ring.is_zero(prior) {
                continue;
            }
            match term.class {
                CoeffClass::One => ring.sub_assign(&mut acc, prior),
                CoeffClass::NegOne => ring.add_assign(&mut acc, prior),
                CoeffClass::General => {
                    let p = ring.mul(term.value, prior);
                    ring.sub_assign(&mut acc, &p);
                }
            }
        }
        c.push(if lead_is_one {
            acc
        } else {
            ring.mul(&lead_inv, &acc)
        });
    }
    Ok(Series { ring, coeffs: c })
}

/// Multiplicative inverse: `div(1, a)`.
pub fn inverse<R: CoeffRing>(a: &Series<R>) -> Result<Series<R>, SeriesError> {
    let one = Series::one(a.ring.clone(), a.order());
    div(&one, a)
}

/// The dilated Euler product ∏_{n≥1} (1 − q^(k·n)), expanded by the
/// pentagonal-number sparse form: exponents k·j(3j∓1)/2 with sign (−1)^j.
pub fn eta_series<R: CoeffRing>(
    ring: R,
    dilation: u32,
    order: usize,
) -> Result<Series<R>, SeriesError> {
    if order == 0 {
        return Err(SeriesError::EmptyTruncation);
    }
    if dilation == 0 {
        return Err(SeriesError::ZeroDilation);
    }
    let mut coeffs = vec![ring.zero(); order];
    coeffs[0] = ring.one();
    let neg_one = ring.from_i64(-1);
    let k = dilation as u128;
    let n = order as u128;
    let mut j: u128 = 1;
    loop {
        let g1 = k * (j * (3 * j - 1) / 2);
        if g1 >= n {
            break;
        }
        let g2 = k * (j * (3 * j + 1) / 2);
        let v = if j % 2 == 1 {
            neg_one.clone()
        } else {
            ring.one()
        };
        coeffs[g1 as usize] = v.clone();
        if g2 < n {
            coeffs[g2 as usize] = v;
        }
        j += 1;
    }
    Ok(Series { ring, coeffs })
}

/// A formal product ∏_k f_k^{e_k} of dilated Euler factors, keyed by
/// dilation. Invariants: dilations are ≥ 1, entries with exponent 0 are
/// dropped, duplicate dilations merge by summing exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EtaQuotient {
    factors: BTreeMap<u32, i64>,
}

impl EtaQuotient {
    pub fn new(pairs: impl IntoIterator<Item = (u32, i64)>) -> Result<Self, SeriesError> {
        let mut factors: BTreeMap<u32, i64> = BTreeMap::new();
        for (k, e) in pairs {
            if k == 0 {
                return Err(SeriesError::ZeroDilation);
            }
            let slot = factors.entry(k).or_insert(0);
            *slot = slot
                .checked_add(e)
                .ok_or(SeriesError::ExponentOverflow { dilation: k })?;
        }
        factors.retain(|_, e| *e != 0);
        Ok(EtaQuotient { factors })
    }

    /// Factors in ascending dilation order.
    pub fn factors(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.factors.iter().map(|(k, e)| (*k, *e))
    }

    /// True for the empty product.
    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, e) in self.factors() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{k}:{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parse failure for the `k:e` comma-separated quotient grammar, with the
/// byte offset of the offending token in the original input.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid eta quotient at byte {position}: {message}")]
pub struct EtaParseError {
    pub position: usize,
    pub message: String,
}

impl EtaParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        EtaParseError {
            position,
            message: message.into(),
        }
    }
}

/// Byte offset of the first non-space character of `token` within the whole
/// input, given the token's own offset. Falls back to the token start when
/// the token is all spaces.
fn token_pos(base: usize, token: &str) -> usize {
    base + (token.len() - token.trim_start().len()).min(token.len().saturating_sub(1))
}

impl FromStr for EtaQuotient {
    type Err = EtaParseError;

    /// Grammar: `pair (',' pair)*` with `pair = k ':' e`, `k` a positive
    /// decimal integer and `e` a signed decimal integer. ASCII spaces around
    /// tokens are permitted.
    fn from_str(s: &str) -> Result<Self, EtaParseError> {
        if s.trim().is_empty() {
            return Err(EtaParseError::new(0, "empty quotient"));
        }
        let mut pairs: Vec<(u32, i64)> = Vec::new();
        let mut base = 0usize;
        for segment in s.split(',') {
            if segment.trim().is_empty() {
                return Err(EtaParseError::new(base, "empty `k:e` pair"));
            }
            let colon = segment.find(':').ok_or_else(|| {
                EtaParseError::new(token_pos(base, segment), "expected `k:e` pair")
            })?;
            let (k_tok, e_tok) = (&segment[..colon], &segment[colon + 1..]);
            let k_pos = token_pos(base, k_tok);
            let e_pos = token_pos(base + colon + 1, e_tok);
            if k_tok.trim().is_empty() {
                return Err(EtaParseError::new(base, "missing dilation before `:`"));
            }
            if e_tok.trim().is_empty() {
                return Err(EtaParseError::new(
                    base + colon,
                    "missing exponent after `:`",
                ));
            }
            let k: u32 = k_tok
                .trim()
                .parse()
                .map_err(|_| EtaParseError::new(k_pos, "dilation must be a positive integer"))?;
            if k == 0 {
                return Err(EtaParseError::new(k_pos, "dilation must be at least 1"));
            }
            let e: i64 = e_tok
                .trim()
                .parse()
                .map_err(|_| EtaParseError::new(e_pos, "exponent must be an integer"))?;
            pairs.push((k, e));
            base += segment.len() + 1;
        }
        EtaQuotient::new(pairs).map_err(|err| match err {
            SeriesError::ExponentOverflow { dilation } => EtaParseError::new(
                0,
                format!("merged exponent overflows for dilation {dilation}"),
            ),
            other => EtaParseError::new(0, other.to_string()),
        })
    }
}

/// Expand an eta quotient to a truncated series by repeated sparse
/// multiplication/division by each dilated Euler factor.
pub fn expand_quotient<R: CoeffRing>(
    ring: R,
    quotient: &EtaQuotient,
    order: usize,
) -> Result<Series<R>, SeriesError> {
    if order == 0 {
        return Err(SeriesError::EmptyTruncation);
    }
    let mut acc = Series::one(ring.clone(), order);
    for (k, e) in quotient.factors() {
        let factor = eta_series(ring.clone(), k, order)?;
        for _ in 0..e.unsigned_abs() {
            acc = if e > 0 {
                mul(&acc, &factor)?
            } else {
                div(&acc, &factor)?
            };
        }
    }
    Ok(acc)
}

/// Coefficientwise reduction to the word-sized residue backend.
///
/// Reducing an already-reduced series is permitted only when the new modulus
/// divides the current one (the map is otherwise not well defined).
pub trait Reduce {
    fn reduce(&self, modulus: u64) -> Result<Series<Residue>, SeriesError>;
}

impl Reduce for Series<Exact> {
    fn reduce(&self, modulus: u64) -> Result<Series<Residue>, SeriesError> {
        let ring = Residue::new(modulus).ok_or(SeriesError::BadModulus(modulus))?;
        let m = num_bigint::BigInt::from(modulus);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                c.mod_floor(&m)
                    .to_u64()
                    .expect("mod_floor result fits the modulus")
            })
            .collect();
        Ok(Series { ring, coeffs })
    }
}

impl Reduce for Series<Residue> {
    fn reduce(&self, modulus: u64) -> Result<Series<Residue>, SeriesError> {
        let ring = Residue::new(modulus).ok_or(SeriesError::BadModulus(modulus))?;
        let old = self.ring.modulus();
        if !old.is_multiple_of(modulus) {
            return Err(SeriesError::ModulusNotDivisible { old, new: modulus });
        }
        let coeffs = self.coeffs.iter().map(|c| c % modulus).collect();
        Ok(Series { ring, coeffs })
    }
}

/// Free-function form of [`Reduce::reduce`].
pub fn reduce<S: Reduce>(a: &S, modulus: u64) -> Result<Series<Residue>, SeriesError> {
    a.reduce(modulus)
}

/// Coefficient parities of an exact series.
pub fn to_parity(a: &Series<Exact>) -> Series<Parity> {
    let coeffs = a.coeffs.iter().map(|c| c.is_odd()).collect();
    Series {
        ring: Parity,
        coeffs,
    }
}

/// Read-only view of a mod-m coefficient table, shared by the parity and
/// residue backends so congruence scans are backend-agnostic.
pub trait ResidueView {
    fn modulus(&self) -> u64;
    fn order(&self) -> usize;
    /// Canonical residue in [0, modulus) of the coefficient of q^n.
    fn residue_at(&self, n: usize) -> u64;
}

impl ResidueView for Series<Parity> {
    fn modulus(&self) -> u64 {
        2
    }

    fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn residue_at(&self, n: usize) -> u64 {
        self.coeffs[n] as u64
    }
}

impl ResidueView for Series<Residue> {
    fn modulus(&self) -> u64 {
        self.ring.modulus()
    }

    fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn residue_at(&self, n: usize) -> u64 {
        self.coeffs[n]
    }
}
