//! Exact census engine for abc-style radical inequalities.
//!
//! For each integer `c >= 3` the engine enumerates every coprime split
//! `c = a + b` with `a < b`, decides two radical inequalities exactly for a
//! rational exponent parameter ε = p/q, and aggregates the results:
//!
//! * `N(c)`  — splits with `c^(p+q) < R(c)^p · (R(a)·R(b))^q`, the integer
//!   form of `c < R(c)^(ε/(1+ε)) · R(a)^(1/(1+ε)) · R(b)^(1/(1+ε))`;
//! * `N₁(c)` — splits with `c^q < R(abc)^(p+q)`, the integer form of the
//!   abc-style bound `c < R(abc)^(1+ε)`;
//! * `G(c)`  — the geometric mean of `R(a·b·c)` over all splits, and the
//!   ratio `G(c) / (R(c)^(1-ε) · c²)` whose minimum over a scanned range is
//!   the empirical envelope for the constant κ_ε.
//!
//! Here `R(n)` is the radical of `n` (the product of its distinct prime
//! divisors) and `φ(n)` the Euler totient; there are exactly `φ(c)/2`
//! coprime splits of `c`.
//!
//! Counts are always exact: a double-precision log filter handles the bulk
//! of the comparisons and anything inside its safety margin falls back to
//! arbitrary-precision integer powers. Real-valued statistics (densities,
//! geometric means, quality) are double precision and never feed back into
//! a count.

pub mod census;
pub mod decomposition;
pub mod inequality;
pub mod report;
pub mod tables;
pub mod verify;

pub use census::{
    census_row, density1_rolling_mean, estimate_kappa, find_hits, scan_range, CensusError,
    CensusRow, CensusTables, Hit, KappaEstimate, ROLLING_WINDOW,
};
pub use decomposition::{
    count_decompositions, enumerate_decompositions, gcd, Decomposition, DomainError,
};
pub use inequality::{
    abc_quality, evaluate, exact_thm1, exact_thm2, fast_filter_thm1, satisfies_thm1,
    satisfies_thm2, Epsilon, EpsilonError, FilterVerdict, TripleVerdict,
};
pub use tables::{
    build_radical_table, build_totient_table, radical_by_factorization, RadicalTable,
    TableError, TableFormatError, TableKind, TableSet, TotientTable, MAX_TABLE_LIMIT,
};
