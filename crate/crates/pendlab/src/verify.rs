//! Verification campaigns: structured, deterministic reports for each CLI
//! target. Every report is plain data with a fixed field order and no
//! timestamps, so identical inputs serialize to identical bytes.

use crate::families::{
    classify, sellers_families, theorem_campaign, verify_family, CaseLabel, FamiliesError,
    FamilyReport, FamilyStatus,
};
use crate::newman::{
    alpha_closed_form, fit_alpha, newman_residual, newman_step3_residual, replication_moduli,
    NewmanError,
};
use crate::partitions::a_table;
use crate::ring::{CoeffRing, Exact, Residue};
use crate::series::{eta_series, expand_quotient, ResidueView, Series, SeriesError};
use crate::theta::{
    jtp_check, phi, phi_quotient, psi, psi_quotient, theta_sum, ThetaError, ThetaSpecialization,
};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Newman(#[from] NewmanError),
    #[error(transparent)]
    Families(#[from] FamiliesError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("this check requires mod-2 tables, got modulus {0}")]
    NotParity(u64),
}

/// Worst-of aggregation: any refutation dominates; otherwise any
/// insufficient range; otherwise verified.
pub fn aggregate<I: IntoIterator<Item = FamilyStatus>>(statuses: I) -> FamilyStatus {
    let mut out = FamilyStatus::Verified;
    for s in statuses {
        match s {
            FamilyStatus::Refuted => return FamilyStatus::Refuted,
            FamilyStatus::InsufficientRange => out = FamilyStatus::InsufficientRange,
            FamilyStatus::Verified => {}
        }
    }
    out
}

/// Documented exit-code contract: 0 verified, 1 refuted, 2 insufficient
/// range only.
pub fn exit_code(status: FamilyStatus) -> i32 {
    match status {
        FamilyStatus::Verified => 0,
        FamilyStatus::Refuted => 1,
        FamilyStatus::InsufficientRange => 2,
    }
}

const MISMATCH_DISPLAY_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub index: u64,
    pub pend: u64,
    pub a: u64,
}

/// Pointwise mod-2 comparison of the PEND table against the auxiliary
/// sequence table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub target: &'static str,
    pub modulus: u64,
    pub order: u64,
    pub n_checked: u64,
    pub mismatch_count: u64,
    /// First few mismatches only; `mismatch_count` is the full tally.
    pub mismatches: Vec<IdentityMismatch>,
    pub status: FamilyStatus,
}

pub fn identity_report<T: ResidueView, U: ResidueView>(
    pend: &T,
    a: &U,
) -> Result<IdentityReport, VerifyError> {
    for modulus in [pend.modulus(), a.modulus()] {
        if modulus != 2 {
            return Err(VerifyError::NotParity(modulus));
        }
    }
    let order = pend.order().min(a.order());
    let mut mismatch_count = 0u64;
    let mut mismatches = Vec::new();
    for n in 0..order {
        let (lhs, rhs) = (pend.residue_at(n), a.residue_at(n));
        if lhs != rhs {
            mismatch_count += 1;
            if mismatches.len() < MISMATCH_DISPLAY_CAP {
                mismatches.push(IdentityMismatch {
                    index: n as u64,
                    pend: lhs,
                    a: rhs,
                });
            }
        }
    }
    let status = if mismatch_count == 0 {
        FamilyStatus::Verified
    } else {
        FamilyStatus::Refuted
    };
    Ok(IdentityReport {
        target: "identity",
        modulus: 2,
        order: order as u64,
        n_checked: order as u64,
        mismatch_count,
        mismatches,
        status,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaCheck {
    pub name: &'static str,
    pub status: FamilyStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Series-identity and triple-product checks, all with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub target: &'static str,
    pub series_order: u64,
    pub product_order: u64,
    pub checks: Vec<ThetaCheck>,
    pub status: FamilyStatus,
}

fn compare_series(name: &'static str, lhs: &Series<Exact>, rhs: &Series<Exact>) -> ThetaCheck {
    let mismatch = (0..lhs.order().min(rhs.order())).find(|&n| lhs.coeff(n) != rhs.coeff(n));
    match mismatch {
        None => ThetaCheck {
            name,
            status: FamilyStatus::Verified,
            detail: None,
        },
        Some(n) => ThetaCheck {
            name,
            status: FamilyStatus::Refuted,
            detail: Some(format!("first mismatch at q^{n}")),
        },
    }
}

pub fn theta_report(series_order: usize, product_order: usize) -> Result<ThetaReport, VerifyError> {
    let mut checks = Vec::new();

    let phi_direct = phi(Exact, series_order)?;
    let phi_from_quotient = expand_quotient(Exact, &phi_quotient(), series_order)?;
    checks.push(compare_series(
        "phi equals its eta-quotient form",
        &phi_direct,
        &phi_from_quotient,
    ));

    let psi_direct = psi(Exact, series_order)?;
    let psi_from_quotient = expand_quotient(Exact, &psi_quotient(), series_order)?;
    checks.push(compare_series(
        "psi equals its eta-quotient form",
        &psi_direct,
        &psi_from_quotient,
    ));

    let euler_theta = theta_sum(Exact, &ThetaSpecialization::euler(), series_order)?;
    let f1 = eta_series(Exact, 1, series_order)?;
    checks.push(compare_series(
        "euler product equals its theta form",
        &euler_theta,
        &f1,
    ));

    for (name, spec) in [
        ("triple product at phi", ThetaSpecialization::phi()),
        ("triple product at psi", ThetaSpecialization::psi()),
        (
            "triple product at the euler specialization",
            ThetaSpecialization::euler(),
        ),
    ] {
        match jtp_check(&spec, product_order) {
            Ok(()) => checks.push(ThetaCheck {
                name,
                status: FamilyStatus::Verified,
                detail: None,
            }),
            Err(ThetaError::Mismatch { exponent }) => checks.push(ThetaCheck {
                name,
                status: FamilyStatus::Refuted,
                detail: Some(format!("sides disagree at q^{exponent}")),
            }),
            Err(other) => return Err(other.into()),
        }
    }

    let status = aggregate(checks.iter().map(|c| c.status));
    Ok(ThetaReport {
        target: "theta",
        series_order: series_order as u64,
        product_order: product_order as u64,
        checks,
        status,
    })
}

/// Exact-sweep defaults per prime, chosen so desk-scale runs stay in the
/// minutes range.
pub fn default_n_max(p: u64) -> u64 {
    match p {
        5 => 200,
        7 => 100,
        _ => 30,
    }
}

/// Third-step sweeps are run only where the table growth stays tame.
pub fn default_step3_n_max(p: u64) -> Option<u64> {
    match p {
        5 => Some(30),
        7 => Some(10),
        _ => None,
    }
}

pub const REPLICATION_FACTOR: u64 = 10;
pub const REPLICATION_COUNT: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewmanConfig {
    pub primes: Vec<u64>,
    /// Override for the main sweep bound (per prime defaults otherwise).
    pub n_max: Option<u64>,
    pub run_exact: bool,
    pub run_replication: bool,
}

impl Default for NewmanConfig {
    fn default() -> Self {
        NewmanConfig {
            primes: vec![5, 7, 11, 13],
            n_max: None,
            run_exact: true,
            run_replication: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepOutcome {
    pub n_max: u64,
    pub all_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplicationReport {
    pub modulus: u64,
    pub n_max: u64,
    pub all_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewmanPrimeReport {
    pub p: u64,
    pub delta: u64,
    /// Exact decimal eigenvalue; closed form and the n=0 fit agreed.
    pub alpha: String,
    pub omega_parity: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<SweepOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step3: Option<SweepOutcome>,
    pub replication: Vec<ReplicationReport>,
    pub status: FamilyStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewmanReport {
    pub target: &'static str,
    pub primes: Vec<NewmanPrimeReport>,
    pub status: FamilyStatus,
}

fn sweep_bounds(config: &NewmanConfig, p: u64) -> (u64, Option<u64>) {
    let main = config.n_max.unwrap_or_else(|| default_n_max(p));
    // A user-supplied bound also caps the third-step sweep.
    let step3 = default_step3_n_max(p).map(|d| config.n_max.map_or(d, |o| o.min(d)));
    (main, step3)
}

/// Largest coefficient index any sweep for p will touch.
fn required_index(p: u64, n_max: u64, step3_n_max: Option<u64>) -> Result<u64, NewmanError> {
    let p = p as u128;
    let delta = (p * p - 1) / 8;
    let mut top = p * p * n_max as u128 + delta;
    if let Some(n3) = step3_n_max {
        top = top.max(p.pow(3) * n3 as u128 + (p.pow(4) - 1) / 8);
    }
    u64::try_from(top).map_err(|_| NewmanError::IndexOverflow(p as u64))
}

fn run_sweep<R: CoeffRing>(
    p: u64,
    n_max: u64,
    table: &Series<R>,
    alpha: &R::Elem,
    third_step: bool,
) -> Result<SweepOutcome, NewmanError> {
    let ring = table.ring().clone();
    let mut first_failure = None;
    for n in 0..=n_max {
        let residual = if third_step {
            newman_step3_residual(p, n, table, alpha)?
        } else {
            newman_residual(p, n, table, alpha)?
        };
        if !ring.is_zero(&residual) {
            first_failure = Some(n);
            break;
        }
    }
    Ok(SweepOutcome {
        n_max,
        all_zero: first_failure.is_none(),
        first_failure,
    })
}

/// Run the full recurrence campaign: per prime, fit α (hard-failing on any
/// closed-form/fit disagreement), sweep the residuals exactly, sweep the
/// third-step consequence where configured, and replay the main sweep over
/// three fixed 60-bit prime moduli at 10× the range.
pub fn newman_report(config: &NewmanConfig) -> Result<NewmanReport, VerifyError> {
    let mut primes = config.primes.clone();
    primes.sort_unstable();
    primes.dedup();

    let mut exact_top = 0u64;
    let mut replication_top = 0u64;
    for &p in &primes {
        let (n_main, n_step3) = sweep_bounds(config, p);
        let exact_need = if config.run_exact {
            required_index(p, n_main, n_step3)?
        } else {
            // α alone needs the coefficient at Δ.
            required_index(p, 0, None)?
        };
        exact_top = exact_top.max(exact_need);
        if config.run_replication {
            let n_rep = n_main.saturating_mul(REPLICATION_FACTOR);
            replication_top = replication_top.max(required_index(p, n_rep, None)?);
        }
    }

    let exact_table = a_table(Exact, exact_top as usize + 1)?.into_series();
    let mut replication_tables: Vec<(u64, Series<Residue>)> = Vec::new();
    if config.run_replication {
        for m in replication_moduli(REPLICATION_COUNT) {
            let ring = Residue::new(m).expect("replication moduli exceed 2");
            let table = a_table(ring, replication_top as usize + 1)?.into_series();
            replication_tables.push((m, table));
        }
    }

    let mut reports = Vec::with_capacity(primes.len());
    for &p in &primes {
        let fit = fit_alpha(p, &exact_table)?;
        let (n_main, n_step3) = sweep_bounds(config, p);
        let exact = if config.run_exact {
            Some(run_sweep(p, n_main, &exact_table, &fit.alpha, false)?)
        } else {
            None
        };
        let step3 = if config.run_exact {
            match n_step3 {
                Some(n3) => Some(run_sweep(p, n3, &exact_table, &fit.alpha, true)?),
                None => None,
            }
        } else {
            None
        };
        let mut replication = Vec::with_capacity(replication_tables.len());
        for (m, table) in &replication_tables {
            let alpha_m = alpha_closed_form(p, table)?;
            let n_rep = n_main.saturating_mul(REPLICATION_FACTOR);
            let outcome = run_sweep(p, n_rep, table, &alpha_m, false)?;
            replication.push(ReplicationReport {
                modulus: *m,
                n_max: outcome.n_max,
                all_zero: outcome.all_zero,
                first_failure: outcome.first_failure,
            });
        }
        let all_zero = exact.iter().all(|s| s.all_zero)
            && step3.iter().all(|s| s.all_zero)
            && replication.iter().all(|r| r.all_zero);
        let status = if all_zero {
            FamilyStatus::Verified
        } else {
            FamilyStatus::Refuted
        };
        reports.push(NewmanPrimeReport {
            p,
            delta: (p * p - 1) / 8,
            alpha: fit.alpha.to_string(),
            omega_parity: fit.omega_parity,
            exact,
            step3,
            replication,
            status,
        });
    }

    let status = aggregate(reports.iter().map(|r| r.status));
    Ok(NewmanReport {
        target: "newman",
        primes: reports,
        status,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremPrimeReport {
    pub p: u64,
    pub delta: u64,
    pub pend_delta_parity: u8,
    pub case: CaseLabel,
    pub families: Vec<FamilyReport>,
    pub status: FamilyStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub target: &'static str,
    pub table_order: u64,
    pub k_max: u32,
    pub primes: Vec<TheoremPrimeReport>,
    pub status: FamilyStatus,
}

/// Classify each prime off the parity table, expand its family campaign to
/// level `k_max`, and scan every family.
pub fn theorem_report<T: ResidueView>(
    primes: &[u64],
    k_max: u32,
    pend_parities: &T,
) -> Result<TheoremReport, VerifyError> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let max_index = pend_parities.order() as u64 - 1;
    let mut prime_reports = Vec::with_capacity(primes.len());
    for &p in &primes {
        let case = classify(p, pend_parities)?;
        let families = theorem_campaign(&case, k_max, max_index)?;
        let mut reports = Vec::with_capacity(families.len());
        for family in &families {
            reports.push(verify_family(family, pend_parities)?);
        }
        let status = aggregate(reports.iter().map(|r| r.status));
        prime_reports.push(TheoremPrimeReport {
            p,
            delta: case.delta,
            pend_delta_parity: case.pend_delta_parity,
            case: case.label,
            families: reports,
            status,
        });
    }
    let status = aggregate(prime_reports.iter().map(|r| r.status));
    Ok(TheoremReport {
        target: "theorem",
        table_order: pend_parities.order() as u64,
        k_max,
        primes: prime_reports,
        status,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SellersReport {
    pub target: &'static str,
    pub table_order: u64,
    pub alpha_max: u32,
    pub families: Vec<FamilyReport>,
    pub status: FamilyStatus,
}

/// Scan the mod-3 ladder against a mod-3 coefficient table.
pub fn sellers_report<T: ResidueView>(
    alpha_max: u32,
    pend_mod3: &T,
) -> Result<SellersReport, VerifyError> {
    let families = sellers_families(alpha_max)?;
    let mut reports = Vec::with_capacity(families.len());
    for family in &families {
        reports.push(verify_family(family, pend_mod3)?);
    }
    let status = aggregate(reports.iter().map(|r| r.status));
    Ok(SellersReport {
        target: "sellers",
        table_order: pend_mod3.order() as u64,
        alpha_max,
        families: reports,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Counterexample;
    use crate::partitions::pend_table;
    use crate::ring::Parity;
    use crate::series::Reduce;

    #[test]
    fn aggregation_orders_refuted_above_insufficient_above_verified() {
        use FamilyStatus::*;
        assert_eq!(aggregate([]), Verified);
        assert_eq!(aggregate([Verified, Verified]), Verified);
        assert_eq!(aggregate([Verified, InsufficientRange]), InsufficientRange);
        assert_eq!(aggregate([InsufficientRange, Refuted, Verified]), Refuted);
        assert_eq!(exit_code(Verified), 0);
        assert_eq!(exit_code(Refuted), 1);
        assert_eq!(exit_code(InsufficientRange), 2);
    }

    #[test]
    fn identity_holds_on_a_small_window() {
        let n = 4000;
        let pend = pend_table(Parity, n).unwrap().into_series();
        let a = a_table(Parity, n).unwrap().into_series();
        let report = identity_report(&pend, &a).unwrap();
        assert_eq!(report.status, FamilyStatus::Verified);
        assert_eq!(report.n_checked, n as u64);
        assert_eq!(report.mismatch_count, 0);
    }

    #[test]
    fn identity_reports_injected_disagreements() {
        let n = 64;
        let pend = pend_table(Parity, n).unwrap().into_series();
        let mut a = a_table(Parity, n).unwrap().into_series();
        let flipped = !a.coeff(10);
        a.set_coeff(10, flipped);
        let report = identity_report(&pend, &a).unwrap();
        assert_eq!(report.status, FamilyStatus::Refuted);
        assert_eq!(report.mismatch_count, 1);
        assert_eq!(report.mismatches[0].index, 10);
    }

    #[test]
    fn identity_requires_parity_tables() {
        let pend = pend_table(Exact, 8)
            .unwrap()
            .into_series()
            .reduce(3)
            .unwrap();
        let a = a_table(Parity, 8).unwrap().into_series();
        assert!(matches!(
            identity_report(&pend, &a),
            Err(VerifyError::NotParity(3))
        ));
    }

    #[test]
    fn theta_checks_all_verify_at_modest_orders() {
        let report = theta_report(300, 120).unwrap();
        assert_eq!(report.status, FamilyStatus::Verified);
        assert_eq!(report.checks.len(), 6);
        assert!(report
            .checks
            .iter()
            .all(|c| c.status == FamilyStatus::Verified));
    }

    // The recurrence sweeps fail from n = 1 onward (n = 0 holds by the
    // construction of α); the campaign must say so rather than smooth it
    // over, and the word-sized replication must land on the same first
    // failing index as the exact sweep.
    #[test]
    fn newman_campaign_reports_the_failing_sweeps_at_reduced_bounds() {
        let config = NewmanConfig {
            primes: vec![5, 7],
            n_max: Some(8),
            run_exact: true,
            run_replication: true,
        };
        let report = newman_report(&config).unwrap();
        assert_eq!(report.status, FamilyStatus::Refuted);
        assert_eq!(report.primes.len(), 2);
        let five = &report.primes[0];
        assert_eq!(five.p, 5);
        assert_eq!(five.delta, 3);
        assert_eq!(five.alpha, "2505");
        assert_eq!(five.omega_parity, 1);
        let exact = five.exact.as_ref().unwrap();
        assert_eq!(exact.n_max, 8);
        assert!(!exact.all_zero);
        assert_eq!(exact.first_failure, Some(1));
        // The override also caps step3 (default 30 → 8); its n = 0 instance
        // reads the same coefficients as the main sweep at n = Δ and fails.
        let step3 = five.step3.as_ref().unwrap();
        assert_eq!(step3.n_max, 8);
        assert_eq!(step3.first_failure, Some(0));
        assert_eq!(five.replication.len(), 3);
        assert!(five
            .replication
            .iter()
            .all(|r| !r.all_zero && r.n_max == 80 && r.first_failure == Some(1)));
        let seven = &report.primes[1];
        assert_eq!(seven.p, 7);
        assert_eq!(seven.delta, 6);
        assert_eq!(seven.alpha, "60361");
        assert_eq!(seven.exact.as_ref().unwrap().first_failure, Some(1));
        assert_eq!(seven.status, FamilyStatus::Refuted);
    }

    #[test]
    fn newman_campaign_can_skip_replication() {
        let config = NewmanConfig {
            primes: vec![5],
            n_max: Some(4),
            run_exact: true,
            run_replication: false,
        };
        let report = newman_report(&config).unwrap();
        assert!(report.primes[0].replication.is_empty());
        assert_eq!(
            report.primes[0].exact.as_ref().unwrap().first_failure,
            Some(1)
        );
        assert_eq!(report.status, FamilyStatus::Refuted);
    }

    #[test]
    fn theorem_campaign_handles_a_small_table_honestly() {
        // Order 2000 reaches the p=5 point values 0 and 1953 but none of the
        // level-0 zero families (smallest B is 5078). The index-0 probe holds
        // (pend(0) = 1 is odd); the 1953 probe is an outright counterexample
        // (pend(1953) is even); the out-of-range families stay undecided.
        let parities = pend_table(Parity, 2000).unwrap().into_series();
        let report = theorem_report(&[5], 0, &parities).unwrap();
        assert_eq!(report.status, FamilyStatus::Refuted);
        let five = &report.primes[0];
        assert_eq!(five.case, CaseLabel::CaseII);
        let statuses: Vec<(u64, u64, FamilyStatus)> = five
            .families
            .iter()
            .map(|f| (f.modulus, f.residue, f.status))
            .collect();
        assert_eq!(
            statuses,
            vec![
                (0, 0, FamilyStatus::Verified),
                (0, 1953, FamilyStatus::Refuted),
                (15625, 5078, FamilyStatus::InsufficientRange),
                (15625, 8203, FamilyStatus::InsufficientRange),
                (15625, 11328, FamilyStatus::InsufficientRange),
                (15625, 14453, FamilyStatus::InsufficientRange),
            ]
        );
        let point = &five.families[1];
        assert_eq!(
            point.counterexamples,
            vec![Counterexample {
                index: 1953,
                observed: 0
            }]
        );
        assert_eq!(point.n_checked, 1);
    }

    #[test]
    fn sellers_ladder_verifies_on_a_mid_size_table() {
        let ring = Residue::new(3).unwrap();
        let table = pend_table(ring, 20_000).unwrap().into_series();
        let report = sellers_report(3, &table).unwrap();
        assert_eq!(report.status, FamilyStatus::Verified);
        assert_eq!(report.families.len(), 4);
        assert!(report.families.iter().all(|f| f.n_checked >= 1));
    }

    #[test]
    fn reports_serialize_without_maps_or_timestamps() {
        let parities = pend_table(Parity, 2100).unwrap().into_series();
        let report = theorem_report(&[5], 0, &parities).unwrap();
        let one = serde_json::to_string(&report).unwrap();
        let two = serde_json::to_string(&theorem_report(&[5], 0, &parities).unwrap()).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with("{\"target\":\"theorem\",\"table_order\":2100,\"k_max\":0,"));
    }
}
