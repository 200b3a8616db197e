//! Integer partitions and the coefficient tables the verification campaigns
//! scan.
//!
//! A partition is PEND when no even part value occurs exactly once: every
//! even value among its parts must appear with multiplicity ≠ 1. The
//! brute-force counters here enumerate partitions directly and exist purely
//! as oracles for the generating-function pipeline; they are deliberately
//! capped at small n.

use crate::ring::CoeffRing;
use crate::series::{expand_quotient, EtaQuotient, Series, SeriesError};

/// Hard cap for explicit enumeration. p(90) ≈ 5.7·10^7 partitions is the
/// most a desk-scale oracle run should ever materialize or stream.
pub const ENUMERATION_LIMIT: u64 = 90;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("n = {n} exceeds the enumeration cap of {limit}")]
    TooLarge { n: u64, limit: u64 },
    #[error("parts must be positive and non-increasing")]
    InvalidParts,
}

/// A partition of a nonnegative integer, stored as non-increasing positive
/// parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self, PartitionError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::InvalidParts);
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn sum(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// True when every even part value has multiplicity ≠ 1.
    pub fn is_pend(&self) -> bool {
        is_pend(&self.parts)
    }
}

/// Multiplicity predicate on a non-increasing part list: no even value may
/// occur exactly once.
pub fn is_pend(parts: &[u64]) -> bool {
    let mut i = 0;
    while i < parts.len() {
        let mut j = i + 1;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        if parts[i].is_multiple_of(2) && j - i == 1 {
            return false;
        }
        i = j;
    }
    true
}

fn check_cap(n: u64) -> Result<(), PartitionError> {
    if n > ENUMERATION_LIMIT {
        Err(PartitionError::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn visit_partitions<F: FnMut(&[u64])>(
    remaining: u64,
    max_part: u64,
    buf: &mut Vec<u64>,
    f: &mut F,
) {
    if remaining == 0 {
        f(buf);
        return;
    }
    let top = remaining.min(max_part);
    for part in (1..=top).rev() {
        buf.push(part);
        visit_partitions(remaining - part, part, buf, f);
        buf.pop();
    }
}

/// Stream every partition of n (largest first part first) without
/// materializing the full list.
pub fn for_each_partition<F: FnMut(&[u64])>(n: u64, mut f: F) -> Result<(), PartitionError> {
    check_cap(n)?;
    let mut buf = Vec::new();
    visit_partitions(n, n.max(1), &mut buf, &mut f);
    Ok(())
}

/// All partitions of n. Prefer [`for_each_partition`] when only a scan is
/// needed; this materializes p(n) vectors.
pub fn enumerate(n: u64) -> Result<Vec<Partition>, PartitionError> {
    let mut out = Vec::new();
    for_each_partition(n, |parts| {
        out.push(Partition {
            parts: parts.to_vec(),
        })
    })?;
    Ok(out)
}

/// Count of PEND partitions of n by direct enumeration.
pub fn pend_bruteforce(n: u64) -> Result<u64, PartitionError> {
    let mut count = 0u64;
    for_each_partition(n, |parts| {
        if is_pend(parts) {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Which coefficient sequence a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKind {
    /// PEND partition counts.
    Pend,
    /// The auxiliary cube-quotient sequence driving the recurrence checks.
    A,
    /// Unrestricted partition counts.
    P,
}

impl TableKind {
    /// The eta quotient whose expansion generates the sequence.
    pub fn quotient(self) -> EtaQuotient {
        let pairs: &[(u32, i64)] = match self {
            TableKind::Pend => &[(1, -1), (2, 1), (4, -1), (6, -1), (12, 1)],
            TableKind::A => &[(1, -3), (3, 2)],
            TableKind::P => &[(1, -1)],
        };
        EtaQuotient::new(pairs.iter().copied()).expect("built-in quotients are valid")
    }

    pub fn label(self) -> &'static str {
        match self {
            TableKind::Pend => "pend",
            TableKind::A => "a",
            TableKind::P => "p",
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pend" => Ok(TableKind::Pend),
            "a" => Ok(TableKind::A),
            "p" => Ok(TableKind::P),
            other => Err(format!(
                "unknown table kind `{other}` (expected pend, a, or p)"
            )),
        }
    }
}

/// A generating-function coefficient table tagged with the sequence it
/// holds. Index n is the coefficient of q^n.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable<R: CoeffRing> {
    kind: TableKind,
    series: Series<R>,
}

impl<R: CoeffRing> CoefficientTable<R> {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn series(&self) -> &Series<R> {
        &self.series
    }

    pub fn into_series(self) -> Series<R> {
        self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, n: usize) -> &R::Elem {
        self.series.coeff(n)
    }

    /// Reattach a kind tag to a series produced elsewhere (cache loads).
    pub fn from_series(kind: TableKind, series: Series<R>) -> Self {
        CoefficientTable { kind, series }
    }
}

fn build_table<R: CoeffRing>(
    ring: R,
    kind: TableKind,
    order: usize,
) -> Result<CoefficientTable<R>, SeriesError> {
    let series = expand_quotient(ring, &kind.quotient(), order)?;
    debug_assert!(*series.coeff(0) == series.ring().one());
    Ok(CoefficientTable { kind, series })
}

/// PEND counts for n < order.
pub fn pend_table<R: CoeffRing>(ring: R, order: usize) -> Result<CoefficientTable<R>, SeriesError> {
    build_table(ring, TableKind::Pend, order)
}

/// The auxiliary sequence for n < order.
pub fn a_table<R: CoeffRing>(ring: R, order: usize) -> Result<CoefficientTable<R>, SeriesError> {
    build_table(ring, TableKind::A, order)
}

/// Unrestricted partition counts for n < order.
pub fn p_table<R: CoeffRing>(ring: R, order: usize) -> Result<CoefficientTable<R>, SeriesError> {
    build_table(ring, TableKind::P, order)
}
