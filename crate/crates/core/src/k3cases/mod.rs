//! Symplectic quotients of K3 surfaces: the case table, assembly of the
//! global series `Z_{X,G}` as an eta quotient, and the checks run against it.

mod hecke;
mod report;

pub use hecke::{eigenform_check, eigenform_check_series, hecke_apply, EigenReport};
pub use report::{modularity_report, modularity_reports, Check, CaseReport};

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::eta::{eta_product_coefficients, eta_quotient_expansion, EtaQuotient};
use crate::orbifold::{local_eta_quotient, nakajima_specialized};
use crate::qseries::{Exponent, QSeries};
use crate::rootsys::AdeType;

/// The bundled table of abelian cases.
pub const SEED_CASES: &str = include_str!("../../data/seed_cases.txt");

/// One group action: `X/G` has singular points of the listed types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRecord {
    pub xiao: u32,
    pub group_label: String,
    /// `|G|`.
    pub k: u64,
    /// One entry per singular point.
    pub singularities: Vec<AdeType>,
    /// Euler characteristic of the smooth locus of `X/G`.
    pub a: i64,
    /// `e(X/G) = a + r`.
    pub euler_quotient: i64,
}

impl CaseRecord {
    /// Builds and validates a record.
    pub fn new(xiao: u32, group_label: &str, k: u64, singularities: Vec<AdeType>) -> std::result::Result<Self, String> {
        if k == 0 {
            return Err("group order must be positive".into());
        }
        for t in &singularities {
            let ki = t.group_order();
            if k % ki != 0 {
                return Err(format!("stabilizer order {ki} of {t} does not divide k = {k}"));
            }
        }
        let a = Rational64::new(24, k as i64)
            - singularities.iter().map(|t| Rational64::new(1, t.group_order() as i64)).sum::<Rational64>();
        if !a.is_integer() || a < Rational64::zero() {
            return Err(format!("a = 24/k - sum 1/k_i = {a} is not a nonnegative integer"));
        }
        let euler = Rational64::new(24, k as i64)
            + singularities
                .iter()
                .map(|t| Rational64::from_integer(t.rank() as i64 + 1) - Rational64::new(1, t.group_order() as i64))
                .sum::<Rational64>();
        if euler != Rational64::from_integer(24) {
            return Err(format!("24/k + sum (n_i + 1 - 1/k_i) = {euler}, expected 24"));
        }
        let a = a.to_integer();
        Ok(CaseRecord {
            xiao,
            group_label: group_label.to_string(),
            k,
            euler_quotient: a + singularities.len() as i64,
            singularities,
            a,
        })
    }

    /// Number of singular points.
    pub fn r(&self) -> usize {
        self.singularities.len()
    }

    /// Singularities grouped as `mult*Type`, in first-seen order.
    pub fn singularity_summary(&self) -> String {
        let mut groups: Vec<(AdeType, usize)> = Vec::new();
        for &t in &self.singularities {
            match groups.iter_mut().find(|(u, _)| *u == t) {
                Some(g) => g.1 += 1,
                None => groups.push((t, 1)),
            }
        }
        groups
            .iter()
            .map(|(t, m)| if *m == 1 { t.to_string() } else { format!("{m}*{t}") })
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for CaseRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{};{}", self.xiao, self.group_label, self.k, self.singularity_summary())
    }
}

fn parse_singularities(field: &str) -> std::result::Result<Vec<AdeType>, String> {
    let mut out = Vec::new();
    for tok in field.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (mult, ty) = match tok.split_once('*') {
            Some((m, t)) => (m.trim().parse::<usize>().map_err(|_| format!("bad multiplicity in `{tok}`"))?, t),
            None => (1, tok),
        };
        let t: AdeType = ty.parse().map_err(|e: Error| e.to_string())?;
        out.extend(std::iter::repeat_n(t, mult));
    }
    Ok(out)
}

/// Parses a case file: `xiao;group;k;sing` per line, `#` comments.
pub fn load_cases(text: &str) -> Result<Vec<CaseRecord>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fail = |invariant: String| Error::InvalidCase { line, invariant };
        let fields: Vec<&str> = body.split(';').collect();
        if fields.len() != 4 {
            return Err(fail(format!("expected 4 `;`-separated fields, found {}", fields.len())));
        }
        let xiao: u32 = fields[0].trim().parse().map_err(|_| fail("xiao number must be an integer".into()))?;
        if xiao > 81 {
            return Err(fail(format!("xiao number {xiao} out of range 0..81")));
        }
        let k: u64 = fields[2].trim().parse().map_err(|_| fail("group order must be an integer".into()))?;
        let sing = parse_singularities(fields[3]).map_err(fail)?;
        out.push(CaseRecord::new(xiao, fields[1].trim(), k, sing).map_err(fail)?);
    }
    Ok(out)
}

/// The bundled cases, sorted by Xiao number.
pub fn seed_cases() -> Vec<CaseRecord> {
    let mut v = load_cases(SEED_CASES).expect("bundled case table is valid");
    v.sort_by_key(|c| c.xiao);
    v
}

/// Looks up a case by Xiao number.
pub fn find_case(cases: &[CaseRecord], xiao: u32) -> Option<&CaseRecord> {
    cases.iter().find(|c| c.xiao == xiao)
}

/// `Z_{X,G} = eta(k tau)^(-a) prod_i Z_(Delta_i)(k tau / k_i)` as an eta quotient.
pub fn assemble_global(case: &CaseRecord) -> Result<EtaQuotient> {
    let mut z = EtaQuotient::eta_power(case.k, -case.a);
    for &t in &case.singularities {
        let ki = t.group_order();
        if case.k % ki != 0 {
            return Err(Error::Unsupported(format!("multiplier k/k_i = {}/{ki} is not an integer", case.k)));
        }
        z = z.mul(&local_eta_quotient(t)?.rescale(case.k / ki));
    }
    Ok(z)
}

/// `Z_{X,G}^{-1}`, the modular form of the main statement.
pub fn global_inverse(case: &CaseRecord) -> Result<EtaQuotient> {
    Ok(assemble_global(case)?.recip())
}

/// `sum_n e(Hilb^n(X)^G) q^n` for `n < len`, built from the strata: the free
/// part via `prod (1 - q^(km))^(-a)` and each singular orbit via its local
/// series in `q^(k/k_i)`.
pub fn stratification_product(case: &CaseRecord, len: usize) -> Result<Vec<BigInt>> {
    let free = eta_product_coefficients(&EtaQuotient::eta_power(1, -case.a), len);
    let mut acc = vec![BigInt::zero(); len];
    for (i, c) in free.into_iter().enumerate() {
        if (i as u64) * case.k < len as u64 {
            acc[i * case.k as usize] = c;
        }
    }
    for &t in &case.singularities {
        let step = (case.k / t.group_order()) as usize;
        let local_len = len.div_ceil(step);
        let local = nakajima_specialized(t, Rational64::from_integer(local_len as i64) - Rational64::new(1, 24))?
            .shift(Rational64::new(1, 24));
        let mut next = vec![BigInt::zero(); len];
        for n in 0..local_len {
            let c = local.coeff_int(n as i64);
            if c.is_zero() {
                continue;
            }
            for (j, a) in acc.iter().enumerate().take(len - n * step) {
                if !a.is_zero() {
                    next[n * step + j] += &c * a;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Compares `q Z_{X,G}` from the eta quotient with the stratification
/// product below `q^len`; returns the exponents where they differ.
pub fn stratification_mismatches(case: &CaseRecord, len: usize) -> Result<Vec<Exponent>> {
    let strat = stratification_product(case, len)?;
    let o = Rational64::from_integer(len as i64);
    let lhs = QSeries::from_integer_steps(Rational64::zero(), strat, o);
    let z = eta_quotient_expansion(&assemble_global(case)?, o - Rational64::one()).shift(Rational64::one());
    Ok(lhs.mismatches(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(line: &str) -> CaseRecord {
        load_cases(line).unwrap().remove(0)
    }

    #[test]
    fn record_examples() {
        let c = case("1;Z/2;2;8*A1");
        assert_eq!((c.a, c.euler_quotient), (8, 16));
        let c = case("0;trivial;1;");
        assert_eq!((c.a, c.r()), (24, 0));
        let c = case("8;Z/7;7;3*A6");
        assert_eq!((c.a, c.euler_quotient), (3, 6));
    }

    #[test]
    fn rejects_bad_rows() {
        let e = load_cases("# header\n11;Z/2xZ/4;8;4*A3,6*A1").unwrap_err();
        match e {
            Error::InvalidCase { line, invariant } => {
                assert_eq!(line, 2);
                assert!(invariant.contains("a = 24/k"), "{invariant}");
            }
            other => panic!("{other}"),
        }
        assert!(load_cases("1;Z/2;2").is_err());
        assert!(load_cases("1;Z/2;3;8*A1").is_err());
        assert!(load_cases("1;Z/2;2;8*B1").is_err());
        assert!(load_cases("99;Z/2;2;8*A1").is_err());
    }

    #[test]
    fn seed_table_is_valid() {
        let cases = seed_cases();
        assert_eq!(cases.len(), 13);
        let xs: Vec<u32> = cases.iter().map(|c| c.xiao).collect();
        assert_eq!(xs, vec![0, 1, 2, 3, 4, 5, 7, 8, 11, 14, 15, 19, 25]);
    }

    #[test]
    fn assembly_examples() {
        let cases = seed_cases();
        let inv = |x: u32| global_inverse(find_case(&cases, x).unwrap()).unwrap().to_string();
        assert_eq!(inv(0), "1^24");
        assert_eq!(inv(1), "1^8 2^8");
        assert_eq!(inv(2), "1^6 3^6");
        assert_eq!(inv(3), "2^12");
        assert_eq!(inv(4), "1^4 2^2 4^4");
        assert_eq!(inv(8), "1^3 7^3");
    }

    #[test]
    fn stratification_matches() {
        for c in seed_cases() {
            assert!(stratification_mismatches(&c, 30).unwrap().is_empty(), "xiao {}", c.xiao);
        }
    }

    #[test]
    fn display_round_trip() {
        for c in seed_cases() {
            assert_eq!(case(&c.to_string()), c);
        }
    }
}
