//! The acceptance criteria as runnable checks, each reporting one pass/fail
//! row. Output is deterministic; timings are left to the caller.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::eta::{eta_quotient_expansion, EtaQuotient};
use crate::k3cases::{
    eigenform_check, eigenform_check_series, find_case, global_inverse, modularity_reports, seed_cases,
};
use crate::orbifold::{
    cyclic_hilb_oracle, half_norm, jtp_sum, nakajima_coefficient, nakajima_multivariate, nakajima_specialized,
};
use crate::qseries::QSeries;
use crate::refine::{chi_y_series, hodge_series_y, k3_hodge_polynomial, zbir_euler_consistency, LaurentPoly};
use crate::rootsys::{ade_data, order_for_coefficients, strange_formula_residual, theta_eta_identity_residual, AdeType};

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Criteria ids that can be run.
pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Description of the criterion that is not run at this scale.
pub const EXCLUDED: &str =
    "full case table beyond the seed rows, pole checks for Xiao 38/69, Hecke eigenspace dimension, elliptic genus";

/// Seed for the random vectors of the rigid-substack criterion.
pub const RIGID_SEED: u64 = 0x5eed_0009;

fn name_of(id: u32) -> &'static str {
    match id {
        1 => "A_n local series equals 1/eta (n = 1..8, through q^100)",
        2 => "theta functions equal their eta quotients",
        3 => "strange formula residual vanishes",
        4 => "triple product sum equals eta(2tau)^2/eta(tau) through q^100",
        5 => "cyclic oracle equals the orbifold series (k = 2, 3; length 12)",
        6 => "global eta products: weight, valuation, level, congruences, strata",
        7 => "cusp orders: order 1 at inf and 0, valence total",
        8 => "Hecke eigenforms and negative control",
        9 => "rigid substack coefficient is 1",
        10 => "chi_y, Hodge and birational refinements",
        _ => "unknown criterion",
    }
}

/// Runs one criterion; errors inside a criterion count as failure.
pub fn run_criterion(id: u32) -> CriterionResult {
    let outcome = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name: name_of(id), pass, detail }
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&id| run_criterion(id)).collect()
}

/// Fixed-width table rows for a set of results.
pub fn format_table(results: &[CriterionResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{:>2}  {}  {}  [{}]\n",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    s.push_str(&format!("11  EXCL  {EXCLUDED}\n"));
    s
}

fn failures<T: std::fmt::Display>(bad: &[T]) -> (bool, String) {
    if bad.is_empty() {
        (true, "all pass".into())
    } else {
        (false, format!("failed: {}", bad.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")))
    }
}

pub(crate) fn c1() -> Result<(bool, String)> {
    let order = Rational64::from_integer(101) - Rational64::new(1, 24);
    let eta_inv = eta_quotient_expansion(&EtaQuotient::eta_power(1, -1), order);
    let bad: Vec<String> = (1..=8usize)
        .into_par_iter()
        .map(|n| nakajima_specialized(AdeType::A(n), order).map(|s| (n, s == eta_inv)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| format!("A{n}"))
        .collect();
    Ok(failures(&bad))
}

/// Types and coefficient counts for the theta identity.
pub fn theta_targets() -> Vec<(AdeType, i64)> {
    let mut v: Vec<(AdeType, i64)> = (1..=5).map(|n| (AdeType::A(n), 60)).collect();
    v.extend((4..=8).map(|n| (AdeType::D(n), 60)));
    v.push((AdeType::E6, 40));
    v.push((AdeType::E7, 40));
    v.push((AdeType::E8, 25));
    v
}

pub(crate) fn c2() -> Result<(bool, String)> {
    let bad: Vec<String> = theta_targets()
        .into_par_iter()
        .map(|(t, count)| {
            let res = theta_eta_identity_residual(t, order_for_coefficients(t, count)?)?;
            Ok((t, res.is_zero()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(t, _)| t.to_string())
        .collect();
    Ok(failures(&bad))
}

/// A1..A12, D4..D12, E6, E7, E8.
pub fn strange_targets() -> Vec<AdeType> {
    AdeType::all_up_to(12)
}

pub(crate) fn c3() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for t in strange_targets() {
        if strange_formula_residual(t)? != Rational64::from_integer(0) {
            bad.push(t.to_string());
        }
    }
    Ok(failures(&bad))
}

pub(crate) fn c4() -> Result<(bool, String)> {
    let order = Rational64::from_integer(101);
    let eq = EtaQuotient::new([(2, 2), (1, -1)])?;
    let ok = jtp_sum(order) == eta_quotient_expansion(&eq, order);
    Ok((ok, if ok { "exact below q^101".into() } else { "mismatch".into() }))
}

pub(crate) fn c5() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for k in [2usize, 3] {
        if cyclic_hilb_oracle(k, 12)? != nakajima_multivariate(AdeType::A(k - 1), 12)? {
            bad.push(format!("k={k}"));
        }
    }
    Ok(failures(&bad))
}

pub(crate) fn c6() -> Result<(bool, String)> {
    let reports = modularity_reports(&seed_cases(), 51, 51)?;
    let names = ["weight_half_euler", "valuation_one", "multipliers_divide_level", "kohler_congruences", "stratification_product"];
    let mut bad = Vec::new();
    for r in &reports {
        for n in names {
            if !r.check(n).is_some_and(|c| c.pass) {
                bad.push(format!("xiao {} {n}", r.xiao));
            }
        }
    }
    let (pass, detail) = failures(&bad);
    Ok((pass, format!("{} cases; {detail}", reports.len())))
}

pub(crate) fn c7() -> Result<(bool, String)> {
    let reports = modularity_reports(&seed_cases(), 2, 1)?;
    let mut bad = Vec::new();
    for r in &reports {
        for n in ["order_one_at_inf_and_zero", "valence_total"] {
            // the first check only exists for integer weight
            if let Some(c) = r.check(n) {
                if !c.pass {
                    bad.push(format!("xiao {} {n}", r.xiao));
                }
            } else if r.weight.is_integer() {
                bad.push(format!("xiao {} {n} missing", r.xiao));
            }
        }
    }
    Ok(failures(&bad))
}

/// Xiao numbers checked for the eigenform property.
pub const EIGEN_CASES: [u32; 6] = [1, 2, 3, 5, 8, 15];

/// Primes up to 13.
pub const EIGEN_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

pub(crate) fn c8() -> Result<(bool, String)> {
    let cases = seed_cases();
    let mut bad = Vec::new();
    for x in EIGEN_CASES {
        let case = find_case(&cases, x).expect("seed case present");
        let r = eigenform_check(case, &EIGEN_PRIMES, 101)?;
        if !r.passed() {
            bad.push(format!("xiao {x}"));
        }
    }
    // negative control: bump a(2) of the Z/7 form
    let case = find_case(&cases, 8).expect("seed case present");
    let f = eta_quotient_expansion(&global_inverse(case)?, Rational64::from_integer(101));
    let bumped = &f + &QSeries::monomial(BigInt::one(), Rational64::from_integer(2), f.order());
    let control = eigenform_check_series(&bumped, 3, &BigInt::from(-7), &[2], 7)?;
    if control.iter().find(|c| c.name == "hecke_T2").is_none_or(|c| c.pass) {
        bad.push("negative control did not fail".into());
    }
    let (pass, detail) = failures(&bad);
    Ok((pass, format!("{} cases, negative control fails; {detail}", EIGEN_CASES.len())))
}

/// Types for the rigid-substack criterion.
pub fn rigid_targets() -> Vec<AdeType> {
    vec![
        AdeType::A(1),
        AdeType::A(2),
        AdeType::A(3),
        AdeType::A(4),
        AdeType::D(4),
        AdeType::D(5),
        AdeType::E6,
        AdeType::E7,
        AdeType::E8,
    ]
}

/// `count` random vectors with entries in `[-5, 5]` per type, from a fixed seed.
pub fn rigid_vectors(t: AdeType, count: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t.rank() as u64) << 8 ^ t.group_order());
    (0..count).map(|_| (0..t.rank()).map(|_| rng.gen_range(-5..=5)).collect()).collect()
}

pub(crate) fn c9() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for t in rigid_targets() {
        let data = ade_data(t)?;
        for mu in rigid_vectors(t, 100, RIGID_SEED) {
            if nakajima_coefficient(t, &mu, half_norm(&data, &mu))? != BigInt::one() {
                bad.push(format!("{t} {mu:?}"));
            }
        }
    }
    Ok(failures(&bad))
}

pub(crate) fn c10() -> Result<(bool, String)> {
    let cases = seed_cases();
    let trivial = find_case(&cases, 0).expect("trivial case present");
    let mut bad = Vec::new();
    let chi = chi_y_series(trivial, 20)?;
    let delta_inv = eta_quotient_expansion(&EtaQuotient::eta_power(1, -24), Rational64::from_integer(20));
    if chi.eval_y_one() != delta_inv {
        bad.push("chi_y at y=1".to_string());
    }
    let k3 = LaurentPoly::from_terms([(-1, BigInt::from(2)), (0, BigInt::from(20)), (1, BigInt::from(2))]);
    if chi.coeff(0) != k3 {
        bad.push("chi_y q^0".into());
    }
    if hodge_series_y(2).coeffs[1] != k3_hodge_polynomial() {
        bad.push("hodge t^1".into());
    }
    for c in &cases {
        if !zbir_euler_consistency(c, 51) {
            bad.push(format!("zbir xiao {}", c.xiao));
        }
    }
    Ok(failures(&bad))
}
