//! Enumeration of the coprime splits `c = a + b`, `a < b`, `gcd(a, b) = 1`.
//!
//! For `c >= 3` there are exactly `phi(c)/2` such splits, one per
//! `a in [1, (c-1)/2]` with `gcd(a, c) = 1` (equivalent to `gcd(a, b) = 1`
//! since `b = c - a`). The stream yields them in ascending `a`.

use serde::Serialize;
use thiserror::Error;

use crate::tables::{RadicalTable, TotientTable};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("c must be at least 3, got {0}; no split with a < b exists below 3")]
    CTooSmall(u64),
    #[error("c = {c} exceeds the table limit {limit}")]
    TableTooSmall { c: u64, limit: u64 },
}

/// One split `c = a + b` with its radicals cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub rad_a: u64,
    pub rad_b: u64,
    pub rad_c: u64,
}

impl Decomposition {
    /// `R(abc) = R(a) R(b) R(c)`: the factors are pairwise coprime, so the
    /// radical of the product is the product of the radicals.
    pub fn rad_abc(&self) -> u128 {
        self.rad_a as u128 * self.rad_b as u128 * self.rad_c as u128
    }
}

/// Binary GCD on u64; allocation-free, `O(log)` word ops.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Ascending-`a` stream over the coprime splits of `c`.
pub struct Decompositions<'a> {
    c: u64,
    rad_c: u64,
    next_a: u64,
    step: u64,
    half: u64,
    radicals: &'a RadicalTable,
}

impl Iterator for Decompositions<'_> {
    type Item = Decomposition;

    fn next(&mut self) -> Option<Decomposition> {
        let values = self.radicals.values();
        while self.next_a <= self.half {
            let a = self.next_a;
            self.next_a += self.step;
            if gcd(a, self.c) == 1 {
                let b = self.c - a;
                return Some(Decomposition {
                    a,
                    b,
                    c: self.c,
                    rad_a: values[a as usize],
                    rad_b: values[b as usize],
                    rad_c: self.rad_c,
                });
            }
        }
        None
    }
}

/// Stream every split of `c` in ascending `a`; exactly `phi(c)/2` items.
pub fn enumerate_decompositions(
    c: u64,
    radicals: &RadicalTable,
) -> Result<Decompositions<'_>, DomainError> {
    if c < 3 {
        return Err(DomainError::CTooSmall(c));
    }
    if c > radicals.limit() {
        return Err(DomainError::TableTooSmall {
            c,
            limit: radicals.limit(),
        });
    }
    // Even c never has an even coprime a, so step over them.
    let step = if c.is_multiple_of(2) { 2 } else { 1 };
    Ok(Decompositions {
        c,
        rad_c: radicals.values()[c as usize],
        next_a: 1,
        step,
        half: (c - 1) / 2,
        radicals,
    })
}

/// Split count `phi(c)/2`, straight from the totient table — no enumeration.
pub fn count_decompositions(c: u64, totients: &TotientTable) -> Result<u64, DomainError> {
    if c < 3 {
        return Err(DomainError::CTooSmall(c));
    }
    if c > totients.limit() {
        return Err(DomainError::TableTooSmall {
            c,
            limit: totients.limit(),
        });
    }
    // phi(c) is even for every c >= 3.
    Ok(totients.values()[c as usize] / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{build_radical_table, build_totient_table};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn radicals() -> &'static RadicalTable {
        static TABLE: OnceLock<RadicalTable> = OnceLock::new();
        TABLE.get_or_init(|| build_radical_table(4_096).unwrap())
    }

    fn totients() -> &'static TotientTable {
        static TABLE: OnceLock<TotientTable> = OnceLock::new();
        TABLE.get_or_init(|| build_totient_table(4_096).unwrap())
    }

    fn pairs_of(c: u64) -> Vec<(u64, u64)> {
        enumerate_decompositions(c, radicals())
            .unwrap()
            .map(|d| (d.a, d.b))
            .collect()
    }

    #[test]
    fn smallest_cases() {
        assert_eq!(pairs_of(3), vec![(1, 2)]);
        assert_eq!(pairs_of(10), vec![(1, 9), (3, 7)]);
        assert_eq!(pairs_of(9), vec![(1, 8), (2, 7), (4, 5)]);
    }

    #[test]
    fn counts_without_enumeration() {
        assert_eq!(count_decompositions(4, totients()).unwrap(), 1);
        assert_eq!(count_decompositions(9, totients()).unwrap(), 3);
        assert_eq!(count_decompositions(10, totients()).unwrap(), 2);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            enumerate_decompositions(2, radicals()),
            Err(DomainError::CTooSmall(2))
        ));
        assert!(matches!(
            count_decompositions(1, totients()),
            Err(DomainError::CTooSmall(1))
        ));
        assert!(matches!(
            enumerate_decompositions(10_000, radicals()),
            Err(DomainError::TableTooSmall { c: 10_000, .. })
        ));
        assert!(matches!(
            count_decompositions(10_000, totients()),
            Err(DomainError::TableTooSmall { c: 10_000, .. })
        ));
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(5, 0), 5);
        assert_eq!(gcd(1, 999), 1);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(35, 64), 1);
        assert_eq!(gcd(2u64.pow(40), 2u64.pow(20) * 3), 2u64.pow(20));
    }

    // Every yielded item satisfies the full invariant set, exhaustively for
    // small c.
    #[test]
    fn invariants_exhaustive_to_2000() {
        for c in 3..=2000u64 {
            let mut last_a = 0;
            for d in enumerate_decompositions(c, radicals()).unwrap() {
                assert_eq!(d.a + d.b, c);
                assert!(d.a < d.b);
                assert!(d.a > last_a, "ascending a order");
                last_a = d.a;
                assert_eq!(gcd(d.a, d.b), 1);
                // The two filter formulations agree.
                assert_eq!(gcd(d.a, d.c) == 1, gcd(d.a, c - d.a) == 1);
                assert_eq!(d.rad_a, crate::tables::radical_by_factorization(d.a));
                assert_eq!(d.rad_b, crate::tables::radical_by_factorization(d.b));
                assert_eq!(d.rad_c, crate::tables::radical_by_factorization(d.c));
                assert_eq!(
                    d.rad_abc(),
                    crate::tables::radical_by_factorization(d.a * d.b * d.c) as u128
                );
            }
        }
    }

    proptest! {
        // Stream length equals phi(c)/2.
        #[test]
        fn stream_length_is_half_totient(c in 3u64..=4_096) {
            let n = enumerate_decompositions(c, radicals()).unwrap().count() as u64;
            prop_assert_eq!(n, count_decompositions(c, totients()).unwrap());
        }

        // gcd agrees with the subtraction-free Euclid definition.
        #[test]
        fn gcd_matches_euclid(a in 0u64..=1_000_000, b in 0u64..=1_000_000) {
            let (mut x, mut y) = (a, b);
            while y != 0 {
                let t = y;
                y = x % y;
                x = t;
            }
            prop_assert_eq!(gcd(a, b), x);
        }
    }
}
