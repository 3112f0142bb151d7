//! Exact decision of the two per-split radical inequalities.
//!
//! With ε = p/q in lowest terms, both inequalities reduce to integer power
//! comparisons with bounded exponents:
//!
//! * `c < R(c)^(ε/(1+ε)) · R(a)^(1/(1+ε)) · R(b)^(1/(1+ε))`
//!   ⟺ `c^(p+q) < R(c)^p · (R(a)·R(b))^q`
//! * `c < R(abc)^(1+ε)`
//!   ⟺ `c^q < R(abc)^(p+q)`
//!
//! Verdicts are strict: equality counts as "not satisfied". A
//! double-precision log comparison decides the easy cases; anything whose
//! log-gap falls inside a conservative rounding margin is re-decided with
//! arbitrary-precision integer powers, so no verdict ever depends on
//! floating-point luck.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{gcd, Decomposition};

/// Default cap on the reduced denominator of ε.
pub const DEFAULT_DENOMINATOR_CAP: u64 = 64;

/// The exponent parameter ε as an exact rational p/q with
/// `0 < p < q <= 64` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Epsilon {
    p: u64,
    q: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpsilonError {
    #[error("epsilon numerator must be positive")]
    ZeroNumerator,
    #[error("epsilon denominator must be positive")]
    ZeroDenominator,
    #[error("epsilon must lie in (0,1): got {p}/{q}")]
    NotProper { p: u64, q: u64 },
    #[error("epsilon denominator {q} exceeds the cap {cap} after reduction")]
    DenominatorTooLarge { q: u64, cap: u64 },
    #[error("epsilon must be written as \"p/q\", two base-10 integers: {0:?}")]
    Syntax(String),
}

impl Epsilon {
    /// Reduce p/q and validate `0 < p < q <= cap`.
    pub fn with_cap(p: u64, q: u64, cap: u64) -> Result<Self, EpsilonError> {
        if q == 0 {
            return Err(EpsilonError::ZeroDenominator);
        }
        if p == 0 {
            return Err(EpsilonError::ZeroNumerator);
        }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        if p >= q {
            return Err(EpsilonError::NotProper { p, q });
        }
        if q > cap {
            return Err(EpsilonError::DenominatorTooLarge { q, cap });
        }
        Ok(Epsilon { p, q })
    }

    pub fn new(p: u64, q: u64) -> Result<Self, EpsilonError> {
        Self::with_cap(p, q, DEFAULT_DENOMINATOR_CAP)
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// p + q, the largest exponent either exact test needs.
    fn exponent_sum(&self) -> u64 {
        self.p + self.q
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Epsilon {
    type Err = EpsilonError;

    fn from_str(s: &str) -> Result<Self, EpsilonError> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| EpsilonError::Syntax(s.to_string()))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| EpsilonError::Syntax(s.to_string()))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| EpsilonError::Syntax(s.to_string()))?;
        Epsilon::new(p, q)
    }
}

/// Outcome of the double-precision pre-filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVerdict {
    Holds,
    Fails,
    Ambiguous,
}

/// Per-split verdict pair plus the reporting-only quality statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleVerdict {
    pub thm1: bool,
    pub thm2: bool,
    /// `log c / log R(abc)`; above `1 + ε` exactly when `thm2` fails.
    pub quality: f64,
    pub exact_fallback_used: bool,
}

/// Conservative margin on the log-gap below which the float path must not
/// decide: 64 machine epsilons per unit of `(p+q) · log c`, several times
/// the worst accumulated rounding of the few flops involved.
#[inline]
fn margin(eps: Epsilon, ln_c: f64) -> f64 {
    64.0 * f64::EPSILON * eps.exponent_sum() as f64 * ln_c
}

/// Log-space filter for `c^(p+q) < R(c)^p (R(a) R(b))^q`.
#[inline]
pub(crate) fn filter_thm1_from_logs(
    ln_c: f64,
    ln_rc: f64,
    ln_rab: f64,
    eps: Epsilon,
) -> FilterVerdict {
    let diff =
        eps.p as f64 * ln_rc + eps.q as f64 * ln_rab - eps.exponent_sum() as f64 * ln_c;
    let delta = margin(eps, ln_c);
    if diff > delta {
        FilterVerdict::Holds
    } else if diff < -delta {
        FilterVerdict::Fails
    } else {
        FilterVerdict::Ambiguous
    }
}

/// Log-space filter for `c^q < R(abc)^(p+q)`.
#[inline]
pub(crate) fn filter_thm2_from_logs(ln_c: f64, ln_rabc: f64, eps: Epsilon) -> FilterVerdict {
    let diff = eps.exponent_sum() as f64 * ln_rabc - eps.q as f64 * ln_c;
    let delta = margin(eps, ln_c);
    if diff > delta {
        FilterVerdict::Holds
    } else if diff < -delta {
        FilterVerdict::Fails
    } else {
        FilterVerdict::Ambiguous
    }
}

/// Exact integer-power decision of `c^(p+q) < R(c)^p · (R(a)·R(b))^q`.
pub fn exact_thm1(d: &Decomposition, eps: Epsilon) -> bool {
    let lhs = BigUint::from(d.c).pow(eps.exponent_sum() as u32);
    let rhs = BigUint::from(d.rad_c).pow(eps.p as u32)
        * (BigUint::from(d.rad_a) * BigUint::from(d.rad_b)).pow(eps.q as u32);
    lhs < rhs
}

/// Exact integer-power decision of `c^q < R(abc)^(p+q)`.
pub fn exact_thm2(d: &Decomposition, eps: Epsilon) -> bool {
    let lhs = BigUint::from(d.c).pow(eps.q as u32);
    let rhs = (BigUint::from(d.rad_a) * BigUint::from(d.rad_b) * BigUint::from(d.rad_c))
        .pow(eps.exponent_sum() as u32);
    lhs < rhs
}

/// Float pre-filter for the first inequality; never returns a definite
/// verdict the exact path would contradict.
pub fn fast_filter_thm1(d: &Decomposition, eps: Epsilon) -> FilterVerdict {
    let ln_c = (d.c as f64).ln();
    let ln_rc = (d.rad_c as f64).ln();
    let ln_rab = ((d.rad_a * d.rad_b) as f64).ln();
    filter_thm1_from_logs(ln_c, ln_rc, ln_rab, eps)
}

/// Strict truth of `c^(p+q) < R(c)^p (R(a) R(b))^q`, decided exactly.
pub fn satisfies_thm1(d: &Decomposition, eps: Epsilon) -> bool {
    match fast_filter_thm1(d, eps) {
        FilterVerdict::Holds => true,
        FilterVerdict::Fails => false,
        FilterVerdict::Ambiguous => exact_thm1(d, eps),
    }
}

/// Strict truth of `c^q < R(abc)^(p+q)`, decided exactly.
pub fn satisfies_thm2(d: &Decomposition, eps: Epsilon) -> bool {
    let ln_c = (d.c as f64).ln();
    let ln_rabc = ((d.rad_a as f64).ln() + (d.rad_b as f64).ln()) + (d.rad_c as f64).ln();
    match filter_thm2_from_logs(ln_c, ln_rabc, eps) {
        FilterVerdict::Holds => true,
        FilterVerdict::Fails => false,
        FilterVerdict::Ambiguous => exact_thm2(d, eps),
    }
}

/// `log c / log R(abc)`, the standard merit statistic. Reporting only —
/// counts always come from the exact comparisons.
pub fn abc_quality(d: &Decomposition) -> f64 {
    let ln_rabc = ((d.rad_a as f64).ln() + (d.rad_b as f64).ln()) + (d.rad_c as f64).ln();
    (d.c as f64).ln() / ln_rabc
}

/// Decide both inequalities and the quality statistic in one pass.
pub fn evaluate(d: &Decomposition, eps: Epsilon) -> TripleVerdict {
    let ln_c = (d.c as f64).ln();
    let ln_rc = (d.rad_c as f64).ln();
    let ln_ra = (d.rad_a as f64).ln();
    let ln_rb = (d.rad_b as f64).ln();
    let ln_rabc = (ln_ra + ln_rb) + ln_rc;
    let mut exact_fallback_used = false;

    let thm1 = match filter_thm1_from_logs(ln_c, ln_rc, ((d.rad_a * d.rad_b) as f64).ln(), eps)
    {
        FilterVerdict::Holds => true,
        FilterVerdict::Fails => false,
        FilterVerdict::Ambiguous => {
            exact_fallback_used = true;
            exact_thm1(d, eps)
        }
    };
    let thm2 = match filter_thm2_from_logs(ln_c, ln_rabc, eps) {
        FilterVerdict::Holds => true,
        FilterVerdict::Fails => false,
        FilterVerdict::Ambiguous => {
            exact_fallback_used = true;
            exact_thm2(d, eps)
        }
    };

    debug_assert!(!thm1 || thm2, "first inequality must imply the abc bound");
    TripleVerdict {
        thm1,
        thm2,
        quality: ln_c / ln_rabc,
        exact_fallback_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::enumerate_decompositions;
    use crate::tables::{build_radical_table, RadicalTable};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn radicals() -> &'static RadicalTable {
        static TABLE: OnceLock<RadicalTable> = OnceLock::new();
        TABLE.get_or_init(|| build_radical_table(2_048).unwrap())
    }

    fn decomp(a: u64, b: u64, c: u64) -> Decomposition {
        assert_eq!(a + b, c);
        enumerate_decompositions(c, radicals())
            .unwrap()
            .find(|d| d.a == a)
            .expect("not a coprime split")
    }

    fn eps(p: u64, q: u64) -> Epsilon {
        Epsilon::new(p, q).unwrap()
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!("1/2".parse::<Epsilon>().unwrap(), eps(1, 2));
        // Reduction happens before validation.
        assert_eq!("2/4".parse::<Epsilon>().unwrap(), eps(1, 2));
        assert_eq!("21/28".parse::<Epsilon>().unwrap(), eps(3, 4));

        assert_eq!(
            "5/4".parse::<Epsilon>(),
            Err(EpsilonError::NotProper { p: 5, q: 4 })
        );
        assert_eq!("3/3".parse::<Epsilon>(), Err(EpsilonError::NotProper { p: 1, q: 1 }));
        assert_eq!("0/3".parse::<Epsilon>(), Err(EpsilonError::ZeroNumerator));
        assert_eq!("1/0".parse::<Epsilon>(), Err(EpsilonError::ZeroDenominator));
        assert_eq!(
            "1/65".parse::<Epsilon>(),
            Err(EpsilonError::DenominatorTooLarge { q: 65, cap: 64 })
        );
        // 2/130 reduces to 1/65 and still exceeds the cap.
        assert_eq!(
            "2/130".parse::<Epsilon>(),
            Err(EpsilonError::DenominatorTooLarge { q: 65, cap: 64 })
        );
        assert!(matches!(
            "half".parse::<Epsilon>(),
            Err(EpsilonError::Syntax(_))
        ));
        assert!(matches!("1.5".parse::<Epsilon>(), Err(EpsilonError::Syntax(_))));
        assert_eq!(eps(1, 2).to_string(), "1/2");
    }

    #[test]
    fn thm1_examples() {
        // 10^3 = 1000 < 10 * 21^2 = 4410
        assert!(satisfies_thm1(&decomp(3, 7, 10), eps(1, 2)));
        // 10^3 = 1000 >= 10 * 3^2 = 90
        assert!(!satisfies_thm1(&decomp(1, 9, 10), eps(1, 2)));
        // 3^3 = 27 >= 3 * 2^2 = 12
        assert!(!satisfies_thm1(&decomp(1, 2, 3), eps(1, 2)));
    }

    #[test]
    fn thm2_examples() {
        // 9^4 = 6561 < 6^5 = 7776
        assert!(satisfies_thm2(&decomp(1, 8, 9), eps(1, 4)));
        // 9^5 = 59049 >= 6^6 = 46656
        assert!(!satisfies_thm2(&decomp(1, 8, 9), eps(1, 5)));
        // 3^2 = 9 < 6^3 = 216
        assert!(satisfies_thm2(&decomp(1, 2, 3), eps(1, 2)));
    }

    #[test]
    fn exact_matches_direct_integer_arithmetic() {
        // Small enough to check against plain u128 powers.
        let d = decomp(3, 7, 10);
        let e = eps(1, 2);
        assert_eq!(exact_thm1(&d, e), 1000u128 < 10 * 21 * 21);
        assert_eq!(exact_thm2(&d, e), 100u128 < 210u128.pow(3));
    }

    #[test]
    fn equality_counts_as_not_satisfied() {
        // Fabricated radicals forcing an exact tie in both tests:
        // c^q = 9^2 = 81 and R(abc)^(p+q) = ... choose rads so products match.
        let tie = Decomposition {
            a: 1,
            b: 8,
            c: 9,
            rad_a: 1,
            rad_b: 9,
            rad_c: 9,
        };
        let e = eps(1, 2);
        // thm1: 9^3 = 729 vs 9^1 * 9^2 = 729 — a tie, so strictly-less fails.
        assert!(!exact_thm1(&tie, e));
        // The float filter must refuse to decide a tie.
        assert_eq!(fast_filter_thm1(&tie, e), FilterVerdict::Ambiguous);
        assert!(!satisfies_thm1(&tie, e));
    }

    #[test]
    fn fast_filter_examples() {
        assert_eq!(
            fast_filter_thm1(&decomp(3, 7, 10), eps(1, 2)),
            FilterVerdict::Holds
        );
        assert_eq!(
            fast_filter_thm1(&decomp(1, 9, 10), eps(1, 2)),
            FilterVerdict::Fails
        );
    }

    #[test]
    fn quality_examples() {
        let q1 = abc_quality(&decomp(1, 2, 3));
        assert!((q1 - 3f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!((q1 - 0.6131).abs() < 5e-5);

        let q2 = abc_quality(&decomp(1, 8, 9));
        assert!((q2 - 9f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!((q2 - 1.2263).abs() < 5e-5);

        // R(3 * 125 * 128) = 3 * 5 * 2 = 30.
        let t = build_radical_table(128).unwrap();
        let d = enumerate_decompositions(128, &t)
            .unwrap()
            .find(|d| d.a == 3)
            .unwrap();
        let q3 = abc_quality(&d);
        assert!((q3 - 128f64.ln() / 30f64.ln()).abs() < 1e-12);
        assert!((q3 - 1.4266).abs() < 5e-5);
    }

    #[test]
    fn verdict_reports_fallback() {
        let tie = Decomposition {
            a: 1,
            b: 8,
            c: 9,
            rad_a: 1,
            rad_b: 9,
            rad_c: 9,
        };
        assert!(evaluate(&tie, eps(1, 2)).exact_fallback_used);
        assert!(!evaluate(&decomp(3, 7, 10), eps(1, 2)).exact_fallback_used);
    }

    /// All splits of all c in [3, max]; used to sweep invariants.
    fn all_decomps(max: u64) -> impl Iterator<Item = Decomposition> + 'static {
        (3..=max).flat_map(|c| enumerate_decompositions(c, radicals()).unwrap())
    }

    #[test]
    fn filter_never_contradicts_exact_small_sweep() {
        let ladder = [eps(1, 4), eps(1, 3), eps(1, 2), eps(2, 3), eps(3, 4)];
        for d in all_decomps(300) {
            for &e in &ladder {
                match fast_filter_thm1(&d, e) {
                    FilterVerdict::Holds => assert!(exact_thm1(&d, e), "{d:?} {e}"),
                    FilterVerdict::Fails => assert!(!exact_thm1(&d, e), "{d:?} {e}"),
                    FilterVerdict::Ambiguous => {}
                }
            }
        }
    }

    proptest! {
        // Shrinking satisfying set: satisfied at a larger ε implies
        // satisfied at any smaller one.
        #[test]
        fn thm1_monotone_in_eps(c in 3u64..=1500, a_seed in 1u64..u64::MAX, i in 0usize..4) {
            let ladder = [eps(1, 4), eps(1, 3), eps(1, 2), eps(2, 3), eps(3, 4)];
            let splits: Vec<_> = enumerate_decompositions(c, radicals()).unwrap().collect();
            let d = splits[(a_seed % splits.len() as u64) as usize];
            let (lo, hi) = (ladder[i], ladder[i + 1]);
            if satisfies_thm1(&d, hi) {
                prop_assert!(satisfies_thm1(&d, lo));
            }
            // Contrapositive: false below stays false above whenever R(c) < c.
            if !satisfies_thm1(&d, lo) && d.rad_c < d.c {
                prop_assert!(!satisfies_thm1(&d, hi));
            }
        }

        // Growing satisfying set for the abc-style bound.
        #[test]
        fn thm2_monotone_in_eps(c in 3u64..=1500, a_seed in 1u64..u64::MAX, i in 0usize..4) {
            let ladder = [eps(1, 4), eps(1, 3), eps(1, 2), eps(2, 3), eps(3, 4)];
            let splits: Vec<_> = enumerate_decompositions(c, radicals()).unwrap().collect();
            let d = splits[(a_seed % splits.len() as u64) as usize];
            if satisfies_thm2(&d, ladder[i]) {
                prop_assert!(satisfies_thm2(&d, ladder[i + 1]));
            }
        }

        // The first inequality is strictly stronger at equal ε.
        #[test]
        fn thm1_implies_thm2(c in 3u64..=1500, a_seed in 1u64..u64::MAX, i in 0usize..5) {
            let ladder = [eps(1, 4), eps(1, 3), eps(1, 2), eps(2, 3), eps(3, 4)];
            let splits: Vec<_> = enumerate_decompositions(c, radicals()).unwrap().collect();
            let d = splits[(a_seed % splits.len() as u64) as usize];
            let e = ladder[i];
            if satisfies_thm1(&d, e) {
                prop_assert!(satisfies_thm2(&d, e));
            }
            let v = evaluate(&d, e);
            prop_assert_eq!(v.thm1, satisfies_thm1(&d, e));
            prop_assert_eq!(v.thm2, satisfies_thm2(&d, e));
        }

        // Quality sits above 1+ε exactly when the abc-style bound fails,
        // away from the float-resolution boundary.
        #[test]
        fn quality_bridges_thm2(c in 3u64..=1500, a_seed in 1u64..u64::MAX, i in 0usize..5) {
            let ladder = [eps(1, 4), eps(1, 3), eps(1, 2), eps(2, 3), eps(3, 4)];
            let splits: Vec<_> = enumerate_decompositions(c, radicals()).unwrap().collect();
            let d = splits[(a_seed % splits.len() as u64) as usize];
            let e = ladder[i];
            let q = abc_quality(&d);
            let boundary = 1.0 + e.as_f64();
            if (q - boundary).abs() > 1e-9 {
                prop_assert_eq!(!satisfies_thm2(&d, e), q > boundary);
            }
        }
    }
}
