//! Theta-function specializations and the triple-product comparison.
//!
//! A specialization assigns a = s_a·q^α, b = s_b·q^β (signs ±1, exponents
//! ≥ 1) to the two-variable theta series Σ_{n∈ℤ} a^{n(n+1)/2} b^{n(n−1)/2}.
//! The sum side is accumulated bilaterally until the q-order leaves the
//! truncation window; the product side multiplies out the three factor
//! families of the triple-product identity, each a stream of binomials
//! 1 ± q^e. Both sides are exact, so agreement is decided coefficient by
//! coefficient.

use crate::ring::{CoeffRing, Exact};
use crate::series::{EtaQuotient, Series, SeriesError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ThetaError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("theta sign must be +1 or -1, got {0}")]
    InvalidSign(i8),
    #[error("theta exponent must be at least 1, got {0}")]
    ZeroExponent(u32),
    #[error("sum and product sides first disagree at q^{exponent}")]
    Mismatch { exponent: usize },
}

/// A choice of a = s_a·q^α, b = s_b·q^β.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaSpecialization {
    sign_a: i8,
    exp_a: u32,
    sign_b: i8,
    exp_b: u32,
}

impl ThetaSpecialization {
    pub fn new(sign_a: i8, exp_a: u32, sign_b: i8, exp_b: u32) -> Result<Self, ThetaError> {
        for s in [sign_a, sign_b] {
            if s != 1 && s != -1 {
                return Err(ThetaError::InvalidSign(s));
            }
        }
        for e in [exp_a, exp_b] {
            if e == 0 {
                return Err(ThetaError::ZeroExponent(e));
            }
        }
        Ok(ThetaSpecialization {
            sign_a,
            exp_a,
            sign_b,
            exp_b,
        })
    }

    /// a = b = q: the square-exponent series.
    pub fn phi() -> Self {
        ThetaSpecialization {
            sign_a: 1,
            exp_a: 1,
            sign_b: 1,
            exp_b: 1,
        }
    }

    /// a = q, b = q³: the triangular-exponent series.
    pub fn psi() -> Self {
        ThetaSpecialization {
            sign_a: 1,
            exp_a: 1,
            sign_b: 1,
            exp_b: 3,
        }
    }

    /// a = −q, b = −q²: the pentagonal-exponent series, equal to the Euler
    /// product f_1.
    pub fn euler() -> Self {
        ThetaSpecialization {
            sign_a: -1,
            exp_a: 1,
            sign_b: -1,
            exp_b: 2,
        }
    }

    pub fn sign_a(&self) -> i8 {
        self.sign_a
    }

    pub fn exp_a(&self) -> u32 {
        self.exp_a
    }

    pub fn sign_b(&self) -> i8 {
        self.sign_b
    }

    pub fn exp_b(&self) -> u32 {
        self.exp_b
    }
}

/// Bilateral sum side: walk n = 0, 1, 2, … and n = −1, −2, … until the
/// exponent α·n(n+1)/2 + β·n(n−1)/2 leaves the window. Distinct n may land
/// on the same exponent, so contributions accumulate.
pub fn theta_sum<R: CoeffRing>(
    ring: R,
    spec: &ThetaSpecialization,
    order: usize,
) -> Result<Series<R>, SeriesError> {
    if order == 0 {
        return Err(SeriesError::EmptyTruncation);
    }
    let mut coeffs = vec![ring.zero(); order];
    let one = ring.one();
    let neg_one = ring.from_i64(-1);
    let alpha = spec.exp_a as u128;
    let beta = spec.exp_b as u128;
    for dir in [1i128, -1] {
        let mut n: i128 = if dir == 1 { 0 } else { -1 };
        loop {
            // Both triangular factors are nonnegative for every integer n.
            let t = (n * (n + 1) / 2) as u128;
            let u = (n * (n - 1) / 2) as u128;
            let e = alpha * t + beta * u;
            if e >= order as u128 {
                break;
            }
            let negative = (spec.sign_a < 0 && t % 2 == 1) ^ (spec.sign_b < 0 && u % 2 == 1);
            let delta = if negative { &neg_one } else { &one };
            ring.add_assign(&mut coeffs[e as usize], delta);
            n += dir;
        }
    }
    Ok(Series::from_coeffs(ring, coeffs))
}

/// Multiply a truncated series in place by 1 ± q^e (e ≥ 1), highest index
/// first so each source coefficient is read before it is overwritten.
fn mul_binomial<R: CoeffRing>(ring: &R, coeffs: &mut [R::Elem], negative: bool, e: usize) {
    for i in (0..coeffs.len().saturating_sub(e)).rev() {
        if ring.is_zero(&coeffs[i]) {
            continue;
        }
        let v = coeffs[i].clone();
        if negative {
            ring.sub_assign(&mut coeffs[i + e], &v);
        } else {
            ring.add_assign(&mut coeffs[i + e], &v);
        }
    }
}

/// Product side of the triple-product identity: with x = ab = s_a s_b
/// q^(α+β), the three factor families are (−a; x)_∞, (−b; x)_∞ and (x; x)_∞,
/// every factor a binomial 1 ± q^e with e strictly increasing within its
/// family.
pub fn theta_product<R: CoeffRing>(
    ring: R,
    spec: &ThetaSpecialization,
    order: usize,
) -> Result<Series<R>, SeriesError> {
    if order == 0 {
        return Err(SeriesError::EmptyTruncation);
    }
    let mut coeffs = vec![ring.zero(); order];
    coeffs[0] = ring.one();
    let alpha = spec.exp_a as u128;
    let beta = spec.exp_b as u128;
    let period = alpha + beta;
    let prod_neg = spec.sign_a * spec.sign_b < 0; // sign of each x power alternates iff this holds

    // (−a; x): factors 1 + s_a (s_a s_b)^m q^(α+mp), m ≥ 0.
    // (−b; x): factors 1 + s_b (s_a s_b)^m q^(β+mp), m ≥ 0.
    for (sign, base) in [(spec.sign_a, alpha), (spec.sign_b, beta)] {
        let mut m: u128 = 0;
        loop {
            let e = base + m * period;
            if e >= order as u128 {
                break;
            }
            let coeff_negative = (sign < 0) ^ (prod_neg && m % 2 == 1);
            mul_binomial(&ring, &mut coeffs, coeff_negative, e as usize);
            m += 1;
        }
    }
    // (x; x): factors 1 − (s_a s_b)^m q^(mp), m ≥ 1.
    let mut m: u128 = 1;
    loop {
        let e = m * period;
        if e >= order as u128 {
            break;
        }
        let coeff_negative = !(prod_neg && m % 2 == 1);
        mul_binomial(&ring, &mut coeffs, coeff_negative, e as usize);
        m += 1;
    }
    Ok(Series::from_coeffs(ring, coeffs))
}

/// The square-exponent theta series: coefficient 1 at 0 and 2 at every
/// positive perfect square.
pub fn phi<R: CoeffRing>(ring: R, order: usize) -> Result<Series<R>, SeriesError> {
    theta_sum(ring, &ThetaSpecialization::phi(), order)
}

/// The triangular-exponent theta series: coefficient 1 at every n(n+1)/2.
pub fn psi<R: CoeffRing>(ring: R, order: usize) -> Result<Series<R>, SeriesError> {
    theta_sum(ring, &ThetaSpecialization::psi(), order)
}

/// Eta-quotient form of [`phi`]: f₂⁵ / (f₁² f₄²).
pub fn phi_quotient() -> EtaQuotient {
    EtaQuotient::new([(2, 5), (1, -2), (4, -2)]).expect("built-in quotient is valid")
}

/// Eta-quotient form of [`psi`]: f₂² / f₁.
pub fn psi_quotient() -> EtaQuotient {
    EtaQuotient::new([(2, 2), (1, -1)]).expect("built-in quotient is valid")
}

fn first_mismatch<R: CoeffRing>(a: &Series<R>, b: &Series<R>) -> Option<usize> {
    (0..a.order().min(b.order())).find(|&n| a.coeff(n) != b.coeff(n))
}

/// Compare the sum and product sides of the triple-product identity with
/// exact coefficients up to the given order. `Mismatch` carries the first
/// disagreeing exponent.
pub fn jtp_check(spec: &ThetaSpecialization, order: usize) -> Result<(), ThetaError> {
    let sum = theta_sum(Exact, spec, order)?;
    let product = theta_product(Exact, spec, order)?;
    match first_mismatch(&sum, &product) {
        None => Ok(()),
        Some(exponent) => Err(ThetaError::Mismatch { exponent }),
    }
}
