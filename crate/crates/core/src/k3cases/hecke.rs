use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::One;
use serde::Serialize;

use super::{global_inverse, CaseRecord};
use crate::arith::{gcd, is_prime, kronecker_prime};
use crate::error::{Error, Result};
use crate::eta::{eta_quotient_expansion, eta_quotient_metadata};
use crate::qseries::{Exponent, QSeries};

use super::report::Check;

/// `(T_p f)(n) = a(pn) + chi_D(p) p^(w-1) a(n/p)`, valid below `floor(order/p)`.
pub fn hecke_apply(f: &QSeries, p: u64, weight: i64, disc: &BigInt) -> Result<QSeries> {
    if f.denom() != 1 {
        return Err(Error::NonIntegerGrid);
    }
    if !is_prime(p) {
        return Err(Error::Unsupported(format!("{p} is not prime")));
    }
    if weight < 1 {
        return Err(Error::Unsupported(format!("weight {weight} < 1")));
    }
    let out_order = Exponent::from_integer(Integer::div_floor(&f.order().floor().to_integer(), &(p as i64)));
    let chi = kronecker_prime(disc, p);
    let scale = BigInt::from(chi) * BigInt::from(p).pow((weight - 1) as u32);
    let pi = p as i64;
    let mut terms = Vec::new();
    for n in 1..*out_order.numer() {
        let mut c = f.coeff_int(pi * n);
        if n % pi == 0 {
            c += &scale * f.coeff_int(n / pi);
        }
        terms.push((Exponent::from_integer(n), c));
    }
    // negative and zero exponents carry no coefficients for forms supported on n >= 1
    Ok(QSeries::from_terms(terms, out_order))
}

/// Result of an eigenform test.
#[derive(Clone, Debug, Serialize)]
pub struct EigenReport {
    pub xiao: Option<u32>,
    pub weight: i64,
    pub character_discriminant: String,
    pub checks: Vec<Check>,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Tests `T_p f = a(p) f` for each listed prime not dividing `level`, and
/// `a(mn) = a(m) a(n)` for coprime `m, n` with `mn` below the order.
pub fn eigenform_check_series(f: &QSeries, weight: i64, disc: &BigInt, primes: &[u64], level: u64) -> Result<Vec<Check>> {
    if f.coeff_int(1) != BigInt::one() {
        return Err(Error::Unsupported("series is not normalized (a(1) != 1)".into()));
    }
    let mut checks = Vec::new();
    for &p in primes {
        if level % p == 0 {
            continue;
        }
        let tp = hecke_apply(f, p, weight, disc)?;
        let ap = f.coeff_int(p as i64);
        let rhs = f.scale(&ap).truncate(tp.order());
        let bad = tp.mismatches(&rhs);
        checks.push(Check::new(
            format!("hecke_T{p}"),
            bad.is_empty(),
            if bad.is_empty() {
                format!("T_{p} f = {ap} f below q^{}", tp.order())
            } else {
                format!("T_{p} f differs from {ap} f at q^{}", bad[0])
            },
        ));
    }
    let top = f.order().ceil().to_integer();
    let mut failure = None;
    'outer: for m in 2..top {
        for n in m + 1..top {
            if m * n >= top {
                break;
            }
            if gcd(m as u64, n as u64) == 1 && f.coeff_int(m * n) != f.coeff_int(m) * f.coeff_int(n) {
                failure = Some((m, n));
                break 'outer;
            }
        }
    }
    checks.push(Check::new(
        "multiplicative".into(),
        failure.is_none(),
        match failure {
            None => format!("a(mn) = a(m)a(n) for coprime mn < {top}"),
            Some((m, n)) => format!("a({}) != a({m})a({n})", m * n),
        },
    ));
    Ok(checks)
}

/// Eigenform test of `Z_{X,G}^{-1}` through exponents below `order`.
pub fn eigenform_check(case: &CaseRecord, primes: &[u64], order: i64) -> Result<EigenReport> {
    let inv = global_inverse(case)?;
    let meta = eta_quotient_metadata(&inv, case.k);
    if !meta.integer_weight {
        return Err(Error::Unsupported(format!(
            "xiao {}: half-integral weight {} has no Hecke theory here",
            case.xiao, meta.weight
        )));
    }
    let disc = meta.character_discriminant.clone().expect("integer weight has a character");
    let f = eta_quotient_expansion(&inv, Rational64::from_integer(order));
    let weight = meta.weight.to_integer();
    let checks = eigenform_check_series(&f, weight, &disc, primes, case.k)?;
    Ok(EigenReport { xiao: Some(case.xiao), weight, character_discriminant: disc.to_string(), checks })
}
