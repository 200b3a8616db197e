//! Congruence families for the PEND coefficient tables: case classification
//! by the parity of pend((p²−1)/8), the two towers of mod-2 progressions
//! that parity selects, and the mod-3 family ladder.
//!
//! A family is either an arithmetic progression A·n + B (n ≥ 0) whose
//! residues must all equal an expected value, or a single point index whose
//! residue must. Verification scans a read-only coefficient table and
//! reports honestly: a family whose smallest index lies beyond the table is
//! `insufficient-range`, never silently verified.

use crate::newman::is_prime;
use crate::series::ResidueView;
use serde::Serialize;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FamiliesError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("classification prime must be at least 5, got {0}")]
    PrimeTooSmall(u64),
    #[error("classification needs a mod-2 table, got modulus {0}")]
    ParityTableRequired(u64),
    #[error("table of order {have} does not reach index {needed}")]
    InsufficientTable { needed: u64, have: usize },
    #[error("family checks residues mod {family}, table holds them mod {table}")]
    ModulusMismatch { family: u64, table: u64 },
    #[error("check modulus must be 2 or 3, got {0}")]
    BadCheckModulus(u64),
    #[error("expected residue {expected} is not reduced mod {modulus}")]
    BadExpectedResidue { expected: u64, modulus: u64 },
    #[error("progression modulus must be positive")]
    ZeroModulus,
    #[error("family indices overflow the index type")]
    IndexOverflow,
    #[error("alpha_max must be at least 1, got {0}")]
    BadAlphaRange(u32),
}

/// Which tower of progressions a prime belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    /// pend((p²−1)/8) odd: exponents grow in steps of 4.
    CaseI,
    /// pend((p²−1)/8) even: exponents grow in steps of 6.
    CaseII,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::CaseI => write!(f, "case-i"),
            CaseLabel::CaseII => write!(f, "case-ii"),
        }
    }
}

/// A classified prime: p, the shift Δ = (p²−1)/8, the parity bit that
/// decided the case, and the case label (CaseI iff the bit is 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCase {
    pub p: u64,
    pub delta: u64,
    pub pend_delta_parity: u8,
    pub label: CaseLabel,
}

/// Read the parity of pend((p²−1)/8) off a mod-2 table and label the case.
pub fn classify<T: ResidueView>(p: u64, pend_parities: &T) -> Result<PrimeCase, FamiliesError> {
    if !is_prime(p) {
        return Err(FamiliesError::NotPrime(p));
    }
    if p < 5 {
        return Err(FamiliesError::PrimeTooSmall(p));
    }
    if pend_parities.modulus() != 2 {
        return Err(FamiliesError::ParityTableRequired(pend_parities.modulus()));
    }
    let delta = p
        .checked_mul(p)
        .map(|sq| (sq - 1) / 8)
        .ok_or(FamiliesError::IndexOverflow)?;
    if delta >= pend_parities.order() as u64 {
        return Err(FamiliesError::InsufficientTable {
            needed: delta,
            have: pend_parities.order(),
        });
    }
    let pend_delta_parity = pend_parities.residue_at(delta as usize) as u8;
    let label = if pend_delta_parity == 1 {
        CaseLabel::CaseI
    } else {
        CaseLabel::CaseII
    };
    Ok(PrimeCase {
        p,
        delta,
        pend_delta_parity,
        label,
    })
}

/// One congruence claim: residues of a coefficient sequence along
/// A·n + B (n ≥ 0), all expected to equal `expected_residue` mod
/// `check_modulus`. A point claim about a single index is encoded with
/// modulus A = 0 and the index in B; [`ProgressionFamily::is_point`] tells
/// the two apart.
///
/// B is the literal offset of the stated progression and may exceed A (it
/// does for p ≥ 11): reducing B mod A would add indices the underlying
/// statements never claim.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProgressionFamily {
    modulus: u64,
    residue: u64,
    check_modulus: u64,
    expected_residue: u64,
    provenance: String,
}

fn validate_check(check_modulus: u64, expected: u64) -> Result<(), FamiliesError> {
    if check_modulus != 2 && check_modulus != 3 {
        return Err(FamiliesError::BadCheckModulus(check_modulus));
    }
    if expected >= check_modulus {
        return Err(FamiliesError::BadExpectedResidue {
            expected,
            modulus: check_modulus,
        });
    }
    Ok(())
}

impl ProgressionFamily {
    pub fn progression(
        modulus: u64,
        residue: u64,
        check_modulus: u64,
        expected_residue: u64,
        provenance: impl Into<String>,
    ) -> Result<Self, FamiliesError> {
        if modulus == 0 {
            return Err(FamiliesError::ZeroModulus);
        }
        validate_check(check_modulus, expected_residue)?;
        Ok(ProgressionFamily {
            modulus,
            residue,
            check_modulus,
            expected_residue,
            provenance: provenance.into(),
        })
    }

    pub fn point(
        index: u64,
        check_modulus: u64,
        expected_residue: u64,
        provenance: impl Into<String>,
    ) -> Result<Self, FamiliesError> {
        validate_check(check_modulus, expected_residue)?;
        Ok(ProgressionFamily {
            modulus: 0,
            residue: index,
            check_modulus,
            expected_residue,
            provenance: provenance.into(),
        })
    }

    pub fn is_point(&self) -> bool {
        self.modulus == 0
    }

    /// Progression step A, or 0 for a point claim.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Offset B, or the sole index for a point claim.
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn check_modulus(&self) -> u64 {
        self.check_modulus
    }

    pub fn expected_residue(&self) -> u64 {
        self.expected_residue
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Every claimed index ≤ `max`, in increasing order.
    pub fn indices_up_to(&self, max: u64) -> impl Iterator<Item = u64> + '_ {
        let step = self.modulus;
        let first = if self.residue <= max {
            Some(self.residue)
        } else {
            None
        };
        std::iter::successors(first, move |&i| {
            if step == 0 {
                None
            } else {
                i.checked_add(step).filter(|&next| next <= max)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyStatus {
    Verified,
    Refuted,
    InsufficientRange,
}

impl fmt::Display for FamilyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyStatus::Verified => "verified",
            FamilyStatus::Refuted => "refuted",
            FamilyStatus::InsufficientRange => "insufficient-range",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub observed: u64,
}

/// Outcome of scanning one family against one table. Serialization order is
/// the report wire format; `max_index` is the largest index actually tested
/// (absent when none were in range).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    #[serde(rename = "A")]
    pub modulus: u64,
    #[serde(rename = "B")]
    pub residue: u64,
    #[serde(rename = "mod")]
    pub check_modulus: u64,
    #[serde(rename = "expected")]
    pub expected_residue: u64,
    pub status: FamilyStatus,
    pub n_checked: u64,
    pub max_index: Option<u64>,
    pub counterexamples: Vec<Counterexample>,
    pub provenance: String,
}

/// Scan every in-range index of the family. `verified` requires at least one
/// index checked and no counterexamples; an empty range is reported as
/// `insufficient-range`.
pub fn verify_family<T: ResidueView>(
    family: &ProgressionFamily,
    table: &T,
) -> Result<FamilyReport, FamiliesError> {
    if table.modulus() != family.check_modulus {
        return Err(FamiliesError::ModulusMismatch {
            family: family.check_modulus,
            table: table.modulus(),
        });
    }
    let top = table.order() as u64 - 1;
    let mut n_checked = 0u64;
    let mut max_index = None;
    let mut counterexamples = Vec::new();
    for index in family.indices_up_to(top) {
        let observed = table.residue_at(index as usize);
        n_checked += 1;
        max_index = Some(index);
        if observed != family.expected_residue {
            counterexamples.push(Counterexample { index, observed });
        }
    }
    let status = if n_checked == 0 {
        FamilyStatus::InsufficientRange
    } else if counterexamples.is_empty() {
        FamilyStatus::Verified
    } else {
        FamilyStatus::Refuted
    };
    Ok(FamilyReport {
        modulus: family.modulus,
        residue: family.residue,
        check_modulus: family.check_modulus,
        expected_residue: family.expected_residue,
        status,
        n_checked,
        max_index,
        counterexamples,
        provenance: family.provenance.clone(),
    })
}

fn tower_exponents(label: CaseLabel, k: u32) -> (u32, u32, u32) {
    // (A exponent, step exponent, point-stride) per level.
    match label {
        CaseLabel::CaseI => (4 * k + 4, 4 * k + 3, 4),
        CaseLabel::CaseII => (6 * k + 6, 6 * k + 5, 6),
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<u64, FamiliesError> {
    base.checked_pow(exp).ok_or(FamiliesError::IndexOverflow)
}

/// The point claim of tower level `level`: index (p^{4·level}−1)/8 (CaseI)
/// or (p^{6·level}−1)/8 (CaseII), expected odd. Level 0 is the trivial
/// index 0.
pub fn point_family(case: &PrimeCase, level: u32) -> Result<ProgressionFamily, FamiliesError> {
    let (_, _, stride) = tower_exponents(case.label, 0);
    let power = checked_pow(case.p, stride * level)?;
    // p² ≡ 1 (mod 8) makes every even power ≡ 1, so the index is integral.
    let index = (power - 1) / 8;
    ProgressionFamily::point(index, 2, 1, format!("{} point k={}", case.label, level))
}

/// The level-k families of the tower the case selects: p−1 zero-residue
/// progressions with A = p^{4k+4} (CaseI) or p^{6k+6} (CaseII) and
/// B = p^{4k+3}·j + (A−1)/8 for j = 1..p−1, plus the singleton odd-value
/// index (A−1)/8 — which is the level-(k+1) point value.
pub fn theorem_families(case: &PrimeCase, k: u32) -> Result<Vec<ProgressionFamily>, FamiliesError> {
    let (exp_a, exp_step, _) = tower_exponents(case.label, k);
    let a = checked_pow(case.p, exp_a)?;
    let step = checked_pow(case.p, exp_step)?;
    let base = (a - 1) / 8;
    let mut out = Vec::with_capacity(case.p as usize);
    for j in 1..case.p {
        let b = step
            .checked_mul(j)
            .and_then(|x| x.checked_add(base))
            .ok_or(FamiliesError::IndexOverflow)?;
        out.push(ProgressionFamily::progression(
            a,
            b,
            2,
            0,
            format!("{} zero-family k={k} j={j}", case.label),
        )?);
    }
    out.push(point_family(case, k + 1)?);
    Ok(out)
}

/// Everything worth checking for one prime at table order `max_index + 1`:
/// level-0 families always, higher levels only while their A fits the table
/// (on-demand generation, capped), and every in-range point value starting
/// from the trivial level 0. Sorted by (A, B, provenance), deduplicated.
pub fn theorem_campaign(
    case: &PrimeCase,
    k_max: u32,
    max_index: u64,
) -> Result<Vec<ProgressionFamily>, FamiliesError> {
    let mut families = Vec::new();
    for k in 0..=k_max {
        if k > 0 {
            let (exp_a, _, _) = tower_exponents(case.label, k);
            match case.p.checked_pow(exp_a) {
                Some(a) if a <= max_index.saturating_add(1) => {}
                _ => break,
            }
        }
        families.extend(theorem_families(case, k)?);
    }
    let mut level = 0u32;
    loop {
        match point_family(case, level) {
            Ok(point) if point.residue() <= max_index => {
                families.push(point);
                level += 1;
            }
            // Out of range or the power overflowed: either way, done.
            _ => break,
        }
    }
    families.sort();
    families.dedup();
    Ok(families)
}

/// The mod-3 ladder: the directly stated 27n+19 congruence, then one family
/// per 1 ≤ α ≤ alpha_max with A = 3^{2α+1} and B = (17·3^{2α}−1)/8. The
/// α-display carries no explicit right-hand side in its source; it is read
/// as ≡ 0 (mod 3) — consistent with the stated congruence it extends at
/// α = 1 — and that reading is flagged in the provenance.
pub fn sellers_families(alpha_max: u32) -> Result<Vec<ProgressionFamily>, FamiliesError> {
    if alpha_max == 0 {
        return Err(FamiliesError::BadAlphaRange(alpha_max));
    }
    let mut out = vec![ProgressionFamily::progression(
        27,
        19,
        3,
        0,
        "sellers mod-3 congruence",
    )?];
    for alpha in 1..=alpha_max {
        let a = checked_pow(3, 2 * alpha + 1)?;
        let pow = checked_pow(3, 2 * alpha)?;
        let b = pow
            .checked_mul(17)
            .map(|x| (x - 1) / 8)
            .ok_or(FamiliesError::IndexOverflow)?;
        out.push(ProgressionFamily::progression(
            a,
            b,
            3,
            0,
            format!("sellers alpha-family alpha={alpha} (display read as 0 mod 3)"),
        )?);
    }
    Ok(out)
}
