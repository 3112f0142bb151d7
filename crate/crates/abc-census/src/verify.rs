//! Self-check suites pitting each fast path against an independent oracle.
//!
//! Every suite reports how many checks ran and the first counterexample if
//! one exists. The oracles are deliberately slow and simple: trial
//! division instead of sieves, full big-integer comparisons instead of the
//! float filter.

use crate::decomposition::{count_decompositions, enumerate_decompositions, gcd};
use crate::inequality::{
    exact_thm1, exact_thm2, fast_filter_thm1, satisfies_thm1, satisfies_thm2, Epsilon,
    FilterVerdict,
};
use crate::tables::{
    build_radical_table, build_totient_table, radical_by_factorization,
    totient_by_factorization, TableError,
};

/// Outcome of one suite.
#[derive(Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checked: u64,
    pub failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// The five ε values the comparator suites sweep.
pub fn epsilon_ladder() -> [Epsilon; 5] {
    [
        Epsilon::new(1, 4).unwrap(),
        Epsilon::new(1, 3).unwrap(),
        Epsilon::new(1, 2).unwrap(),
        Epsilon::new(2, 3).unwrap(),
        Epsilon::new(3, 4).unwrap(),
    ]
}

/// Sieve radicals must equal trial-division radicals for every index.
pub fn radical_sieve_vs_trial_division(limit: u64) -> Result<SuiteReport, TableError> {
    let table = build_radical_table(limit)?;
    let mut checked = 0;
    for n in 1..=limit {
        let sieved = table.values()[n as usize];
        let oracle = radical_by_factorization(n);
        checked += 1;
        if sieved != oracle {
            return Ok(SuiteReport {
                name: "radical-sieve-vs-trial-division",
                checked,
                failure: Some(format!("n={n}: sieve={sieved}, trial-division={oracle}")),
            });
        }
    }
    Ok(SuiteReport {
        name: "radical-sieve-vs-trial-division",
        checked,
        failure: None,
    })
}

/// The divisor sums of the sieved totients must reproduce the identity
/// `sum over d | n of phi(d) = n`.
pub fn totient_divisor_sum(limit: u64) -> Result<SuiteReport, TableError> {
    let table = build_totient_table(limit)?;
    let phi = table.values();
    let mut checked = 0;
    for n in 1..=limit {
        let mut sum = 0u64;
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                sum += phi[d as usize];
                let other = n / d;
                if other != d {
                    sum += phi[other as usize];
                }
            }
            d += 1;
        }
        checked += 1;
        if sum != n {
            return Ok(SuiteReport {
                name: "totient-divisor-sum",
                checked,
                failure: Some(format!("n={n}: divisor sum {sum} != {n}")),
            });
        }
    }
    Ok(SuiteReport {
        name: "totient-divisor-sum",
        checked,
        failure: None,
    })
}

/// Enumerated split counts must equal phi(c)/2, with phi recomputed by
/// trial-division factorization rather than the sieve.
pub fn decomposition_count_vs_totient(limit: u64) -> Result<SuiteReport, TableError> {
    let radicals = build_radical_table(limit.max(3))?;
    let totients = build_totient_table(limit.max(3))?;
    let mut checked = 0;
    for c in 3..=limit.max(3) {
        let enumerated = enumerate_decompositions(c, &radicals).unwrap().count() as u64;
        let from_table = count_decompositions(c, &totients).unwrap();
        let from_oracle = totient_by_factorization(c) / 2;
        checked += 1;
        if enumerated != from_oracle || from_table != from_oracle {
            return Ok(SuiteReport {
                name: "decomposition-count-vs-totient",
                checked,
                failure: Some(format!(
                    "c={c}: enumerated={enumerated}, table={from_table}, oracle={from_oracle}"
                )),
            });
        }
    }
    Ok(SuiteReport {
        name: "decomposition-count-vs-totient",
        checked,
        failure: None,
    })
}

/// The float filter must never contradict the exact big-integer path, and
/// the two-tier deciders must equal the pure exact deciders everywhere.
pub fn comparator_float_vs_exact(c_max: u64) -> Result<SuiteReport, TableError> {
    let radicals = build_radical_table(c_max.max(3))?;
    let mut checked = 0;
    for c in 3..=c_max.max(3) {
        for d in enumerate_decompositions(c, &radicals).unwrap() {
            for eps in epsilon_ladder() {
                checked += 1;
                let exact1 = exact_thm1(&d, eps);
                match fast_filter_thm1(&d, eps) {
                    FilterVerdict::Holds if !exact1 => {
                        return Ok(fail_comparator(checked, &format!(
                            "filter says holds, exact says fails: ({},{},{}) eps={eps}",
                            d.a, d.b, d.c
                        )));
                    }
                    FilterVerdict::Fails if exact1 => {
                        return Ok(fail_comparator(checked, &format!(
                            "filter says fails, exact says holds: ({},{},{}) eps={eps}",
                            d.a, d.b, d.c
                        )));
                    }
                    _ => {}
                }
                if satisfies_thm1(&d, eps) != exact1 {
                    return Ok(fail_comparator(checked, &format!(
                        "two-tier first-inequality verdict diverges at ({},{},{}) eps={eps}",
                        d.a, d.b, d.c
                    )));
                }
                if satisfies_thm2(&d, eps) != exact_thm2(&d, eps) {
                    return Ok(fail_comparator(checked, &format!(
                        "two-tier abc-bound verdict diverges at ({},{},{}) eps={eps}",
                        d.a, d.b, d.c
                    )));
                }
            }
        }
    }
    Ok(SuiteReport {
        name: "comparator-float-vs-exact",
        checked,
        failure: None,
    })
}

fn fail_comparator(checked: u64, msg: &str) -> SuiteReport {
    SuiteReport {
        name: "comparator-float-vs-exact",
        checked,
        failure: Some(msg.to_string()),
    }
}

/// Per-triple radical product: pairwise coprime parts multiply
/// (`R(abc) = R(a) R(b) R(c)`, cross-checked by trial division on the full
/// product for small c) and stay strictly below `R(c) · c²`.
pub fn radical_product_bound(c_max: u64) -> Result<SuiteReport, TableError> {
    let radicals = build_radical_table(c_max.max(3))?;
    let mut checked = 0;
    for c in 3..=c_max.max(3) {
        let cc = c as u128;
        for d in enumerate_decompositions(c, &radicals).unwrap() {
            checked += 1;
            if gcd(d.a, d.b) != 1 || gcd(d.a, d.c) != 1 || gcd(d.b, d.c) != 1 {
                return Ok(fail_bound(checked, &format!(
                    "parts not pairwise coprime: ({},{},{})",
                    d.a, d.b, d.c
                )));
            }
            let product = d.rad_abc();
            if product != radical_by_factorization(d.a * d.b * d.c) as u128 {
                return Ok(fail_bound(checked, &format!(
                    "R(a)R(b)R(c) != R(abc) at ({},{},{})",
                    d.a, d.b, d.c
                )));
            }
            if product >= d.rad_c as u128 * cc * cc {
                return Ok(fail_bound(checked, &format!(
                    "R(abc) = {product} not < R(c)c^2 at ({},{},{})",
                    d.a, d.b, d.c
                )));
            }
        }
    }
    Ok(SuiteReport {
        name: "radical-product-bound",
        checked,
        failure: None,
    })
}

fn fail_bound(checked: u64, msg: &str) -> SuiteReport {
    SuiteReport {
        name: "radical-product-bound",
        checked,
        failure: Some(msg.to_string()),
    }
}

/// Run every suite at sizes scaled to `max` (heavier suites are capped).
pub fn run_all(max: u64) -> Result<Vec<SuiteReport>, TableError> {
    Ok(vec![
        radical_sieve_vs_trial_division(max)?,
        totient_divisor_sum(max.min(20_000))?,
        decomposition_count_vs_totient(max.min(10_000))?,
        comparator_float_vs_exact(max.min(2_000))?,
        radical_product_bound(max.min(2_000))?,
    ])
}
