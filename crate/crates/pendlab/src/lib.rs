//! Exact verification laboratory for the PEND partition function — the
//! number of partitions of `n` in which no even part appears exactly once.
//!
//! The library builds truncated power series over pluggable coefficient
//! rings (arbitrary-precision integers, the field of two elements, and
//! word-sized prime residues), derives the PEND generating function and its
//! companion eta-quotient sequences, and checks congruence families,
//! theta-function identities, and a Hecke-style coefficient recurrence by
//! exhaustive scans at desk scale. All verdicts come from exact arithmetic;
//! nothing is sampled or approximated.
//!
//! Layering, bottom to top:
//!
//! * [`ring`] — coefficient-ring contexts ([`ring::Exact`], [`ring::Parity`],
//!   [`ring::Residue`]).
//! * [`series`] — truncated series arithmetic, eta factors, eta-quotient
//!   expansion, and cross-backend reduction.
//! * [`partitions`] — brute-force partition enumeration and the named
//!   coefficient tables (`pend`, `a`, `p`).
//! * [`theta`] — two-variable theta specializations and the triple-product
//!   cross-check.
//! * [`newman`] — the coefficient recurrence, its eigenvalue fit, and
//!   fixed 60-bit replication moduli.
//! * [`families`] — arithmetic-progression congruence families and their
//!   verdicts over a coefficient table.
//! * [`cache`] — a small binary on-disk format for computed tables.
//! * [`verify`] — campaign drivers that bundle the above into deterministic,
//!   serializable reports.

pub mod cache;
pub mod families;
pub mod newman;
pub mod partitions;
pub mod ring;
pub mod series;
pub mod theta;
pub mod verify;

pub use families::{CaseLabel, FamilyReport, FamilyStatus, PrimeCase, ProgressionFamily};
pub use newman::{AlphaFit, NewmanParams};
pub use partitions::{CoefficientTable, Partition, TableKind};
pub use ring::{CoeffRing, Exact, Parity, Residue};
pub use series::{EtaQuotient, Reduce, ResidueView, Series};
pub use theta::ThetaSpecialization;

/// Truncated series with arbitrary-precision integer coefficients.
pub type ExactSeries = series::Series<ring::Exact>;
/// Truncated series over the field of two elements.
pub type ParitySeries = series::Series<ring::Parity>;
/// Truncated series modulo a runtime word-sized modulus.
pub type ResidueSeries = series::Series<ring::Residue>;

/// Coefficient table holding exact integers.
pub type ExactTable = partitions::CoefficientTable<ring::Exact>;
/// Coefficient table holding parities.
pub type ParityTable = partitions::CoefficientTable<ring::Parity>;
/// Coefficient table holding residues.
pub type ResidueTable = partitions::CoefficientTable<ring::Residue>;
