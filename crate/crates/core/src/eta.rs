//! Dedekind eta quotients `prod_m eta(m tau)^(r_m)`: expansion, weight,
//! level conditions, character and orders of vanishing at the cusps of
//! `Gamma_0(N)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{divisors, euler_phi, fundamental_discriminant, gamma0_index, gcd};
use crate::error::{Error, Result};
use crate::qseries::{ceil_rat, Exponent, QSeries};

/// A finite product of rescaled eta functions, stored as multiplier -> exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    factors: BTreeMap<u64, i64>,
}

impl EtaQuotient {
    /// Builds a quotient, merging repeated multipliers and dropping zero exponents.
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(factors: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, r) in factors {
            if m == 0 {
                return Err(Error::Parse("eta multiplier must be positive".into()));
            }
            *map.entry(m).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        Ok(EtaQuotient { factors: map })
    }

    /// The empty product.
    pub fn one() -> Self {
        Self::default()
    }

    /// `eta(m tau)^r`.
    pub fn eta_power(m: u64, r: i64) -> Self {
        Self::new([(m, r)]).expect("positive multiplier")
    }

    pub fn factors(&self) -> &BTreeMap<u64, i64> {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Half the exponent sum.
    pub fn weight(&self) -> Rational64 {
        Rational64::new(self.factors.values().sum::<i64>(), 2)
    }

    /// `sum m r_m`.
    pub fn sum_m_r(&self) -> i64 {
        self.factors.iter().map(|(&m, &r)| m as i64 * r).sum()
    }

    /// Lowest exponent of the expansion, `(1/24) sum m r_m`.
    pub fn valuation(&self) -> Exponent {
        Exponent::new(self.sum_m_r(), 24)
    }

    pub fn mul(&self, other: &EtaQuotient) -> EtaQuotient {
        Self::new(self.factors.iter().chain(other.factors.iter()).map(|(&m, &r)| (m, r)))
            .expect("multipliers already positive")
    }

    pub fn recip(&self) -> EtaQuotient {
        self.pow(-1)
    }

    pub fn pow(&self, e: i64) -> EtaQuotient {
        Self::new(self.factors.iter().map(|(&m, &r)| (m, r * e))).expect("positive")
    }

    /// Substitution `tau -> t tau`: every multiplier is scaled by `t`.
    pub fn rescale(&self, t: u64) -> EtaQuotient {
        Self::new(self.factors.iter().map(|(&m, &r)| (m * t, r))).expect("positive")
    }

    /// True when every multiplier divides `level`.
    pub fn multipliers_divide(&self, level: u64) -> bool {
        self.factors.keys().all(|&m| level % m == 0)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|(m, r)| format!("{m}^{r}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// Parses whitespace-separated `m^r` tokens, e.g. `1^8 2^8` or `2^2 1^-1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Self::one());
        }
        let mut factors = Vec::new();
        for tok in s.split_whitespace() {
            let (m, r) = tok
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("eta token `{tok}` is not of the form m^r")))?;
            let m: u64 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplier in `{tok}`")))?;
            let r: i64 = r
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
            factors.push((m, r));
        }
        Self::new(factors)
    }
}

/// Multiplies `coeffs` in place by `(1 - q^j)^r`, truncated to its length.
fn apply_factor(coeffs: &mut [BigInt], j: usize, r: i64) {
    let len = coeffs.len();
    if j >= len {
        return;
    }
    for _ in 0..r.unsigned_abs() {
        if r > 0 {
            for i in (j..len).rev() {
                let t = coeffs[i - j].clone();
                coeffs[i] -= t;
            }
        } else {
            for i in j..len {
                let t = coeffs[i - j].clone();
                coeffs[i] += t;
            }
        }
    }
}

/// Coefficients of `prod_m prod_{n>=1} (1 - q^(m n))^(r_m)` for exponents `0..len`.
pub fn eta_product_coefficients(eq: &EtaQuotient, len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    if len == 0 {
        return c;
    }
    c[0] = BigInt::one();
    for (&m, &r) in eq.factors() {
        let m = m as usize;
        let mut j = m;
        while j < len {
            apply_factor(&mut c, j, r);
            j += m;
        }
    }
    c
}

/// `eta(tau) = q^(1/24) prod (1 - q^n)` to the given order.
pub fn eta_expansion(order: Exponent) -> QSeries {
    eta_quotient_expansion(&EtaQuotient::eta_power(1, 1), order)
}

/// Expansion of an eta quotient to the given order.
pub fn eta_quotient_expansion(eq: &EtaQuotient, order: Exponent) -> QSeries {
    let v = eq.valuation();
    let len = ceil_rat(order - v).max(0) as usize;
    QSeries::from_integer_steps(v, eta_product_coefficients(eq, len), order)
}

/// Weight, level and character data of an eta quotient at a given level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularMeta {
    pub level: u64,
    #[serde(serialize_with = "ser_rat")]
    pub weight: Rational64,
    pub integer_weight: bool,
    /// Multipliers that fail to divide the level (empty when all divide).
    pub nondividing: Vec<u64>,
    pub sum_m_r: i64,
    pub sum_m_r_mod24: i64,
    /// `sum (level/m) r_m`, present only when every multiplier divides the level.
    pub sum_level_over_m_r: Option<i64>,
    pub sum_level_over_m_r_mod24: Option<i64>,
    /// `prod m^(r_m)`.
    #[serde(serialize_with = "ser_bigrat")]
    pub s_value: BigRational,
    /// Discriminant of the quadratic character, for integer weight only.
    #[serde(serialize_with = "ser_opt_big")]
    pub character_discriminant: Option<BigInt>,
    pub multiplier_system: bool,
}

impl ModularMeta {
    pub fn level_divisibility_ok(&self) -> bool {
        self.nondividing.is_empty()
    }

    /// Both congruences `sum m r_m = 0` and `sum (N/m) r_m = 0 (mod 24)`.
    pub fn congruences_ok(&self) -> bool {
        self.sum_m_r_mod24 == 0 && self.sum_level_over_m_r_mod24 == Some(0)
    }

    /// Character discriminant rendered as a string ("undefined" for half-integral weight).
    pub fn character_label(&self) -> String {
        match &self.character_discriminant {
            Some(d) => d.to_string(),
            None => "undefined for half-integral weight".into(),
        }
    }
}

fn ser_rat<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_bigrat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_opt_big<S: serde::Serializer>(r: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Computes the standard modularity data of an eta quotient at `level`.
pub fn eta_quotient_metadata(eq: &EtaQuotient, level: u64) -> ModularMeta {
    assert!(level >= 1, "level must be positive");
    let weight = eq.weight();
    let integer_weight = weight.is_integer();
    let nondividing: Vec<u64> = eq.factors().keys().copied().filter(|m| level % m != 0).collect();
    let sum_m_r = eq.sum_m_r();
    let sum_level = if nondividing.is_empty() {
        Some(eq.factors().iter().map(|(&m, &r)| (level / m) as i64 * r).sum::<i64>())
    } else {
        None
    };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&m, &r) in eq.factors() {
        let p = BigInt::from(m).pow(r.unsigned_abs() as u32);
        if r > 0 {
            num *= p;
        } else {
            den *= p;
        }
    }
    let s_value = BigRational::new(num.clone(), den.clone());
    let character_discriminant = if integer_weight {
        // (-1)^k s up to rational squares: use num * den
        let sign = if weight.to_integer() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        Some(fundamental_discriminant(&(sign * num * den)))
    } else {
        None
    };
    ModularMeta {
        level,
        weight,
        integer_weight,
        nondividing,
        sum_m_r,
        sum_m_r_mod24: sum_m_r.rem_euclid(24),
        sum_level_over_m_r: sum_level,
        sum_level_over_m_r_mod24: sum_level.map(|s| s.rem_euclid(24)),
        s_value,
        character_discriminant,
        multiplier_system: !integer_weight,
    }
}

/// A cusp `a/c` of `Gamma_0(N)` with `c | N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cusp {
    pub numer: u64,
    pub denom: u64,
    pub level: u64,
}

impl Cusp {
    /// Denominator `N` represents `i infinity`.
    pub fn is_infinity(&self) -> bool {
        self.denom == self.level
    }

    /// Denominator 1 represents the cusp `0`.
    pub fn is_zero(&self) -> bool {
        self.denom == 1
    }

    /// Width of the cusp: `N / (c^2, N)`.
    pub fn width(&self) -> u64 {
        self.level / gcd(self.denom * self.denom, self.level)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Order of vanishing at one cusp class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspOrder {
    pub cusp: Cusp,
    pub order: Rational64,
}

/// Inequivalent cusps of `Gamma_0(N)`: for each `c | N`, `phi(gcd(c, N/c))` classes.
pub fn gamma0_cusps(level: u64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for c in divisors(level) {
        let g = gcd(c, level / c);
        for r in 0..g {
            if gcd(r, g) != 1 {
                continue;
            }
            let mut a = r;
            while gcd(a, c) != 1 {
                a += g;
            }
            out.push(Cusp { numer: a, denom: c, level });
        }
    }
    out
}

/// Orders of vanishing of an eta quotient at every cusp class of `Gamma_0(N)`,
/// measured in the local parameter at each cusp.
pub fn cusp_orders(eq: &EtaQuotient, level: u64) -> Result<Vec<CuspOrder>> {
    if let Some(&m) = eq.factors().keys().find(|&&m| level % m != 0) {
        return Err(Error::LevelIncompatible { multiplier: m, level });
    }
    Ok(gamma0_cusps(level)
        .into_iter()
        .map(|cusp| {
            let c = cusp.denom;
            let mut acc = Rational64::zero();
            for (&m, &r) in eq.factors() {
                let g = gcd(c, m) as i64;
                acc += Rational64::new(g * g * r, m as i64);
            }
            let order = acc * Rational64::new(level as i64, 24 * c as i64 * gcd(c, level / c) as i64);
            CuspOrder { cusp, order }
        })
        .collect())
}

/// Sum of the orders over all cusp classes.
pub fn total_cusp_order(orders: &[CuspOrder]) -> Rational64 {
    orders.iter().map(|o| o.order).sum()
}

/// `weight * [SL_2(Z) : Gamma_0(N)] / 12`, the valence-formula total.
pub fn valence_total(weight: Rational64, level: u64) -> Rational64 {
    weight * Rational64::from_integer(gamma0_index(level) as i64) / 12
}

/// Number of classes with denominator `c`, i.e. `phi(gcd(c, N/c))`.
pub fn cusp_class_count(c: u64, level: u64) -> u64 {
    euler_phi(gcd(c, level / c))
}

/// True when every cusp order is nonnegative.
pub fn is_holomorphic_at_cusps(orders: &[CuspOrder]) -> bool {
    orders.iter().all(|o| !o.order.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn q(s: &str) -> EtaQuotient {
        s.parse().unwrap()
    }

    /// prod (1 - q^n)^e by naive polynomial multiplication, exponents < len.
    fn naive_power(e: usize, len: usize) -> Vec<i64> {
        let mut c = vec![0i64; len];
        c[0] = 1;
        for n in 1..len {
            for _ in 0..e {
                let mut next = c.clone();
                for i in n..len {
                    next[i] -= c[i - n];
                }
                c = next;
            }
        }
        c
    }

    #[test]
    fn parse_and_display() {
        let e = q("2^8 1^8");
        assert_eq!(e.to_string(), "1^8 2^8");
        assert_eq!(q("1^-1 2^2").to_string(), "1^-1 2^2");
        assert_eq!(q("1^3 1^-3"), EtaQuotient::one());
        assert!("1^x".parse::<EtaQuotient>().is_err());
        assert!("0^1".parse::<EtaQuotient>().is_err());
        assert!("12".parse::<EtaQuotient>().is_err());
    }

    #[test]
    fn eta_pentagonal() {
        let e = eta_expansion(int(8));
        let expect = QSeries::from_terms(
            [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)]
                .iter()
                .map(|&(n, c)| (Exponent::new(24 * n + 1, 24), BigInt::from(c))),
            int(8),
        );
        assert_eq!(e, expect);
        assert_eq!(e.coeff(Exponent::new(1, 24)), BigInt::one());
        // generalized pentagonal numbers k(3k-1)/2 carry (-1)^k
        let long = eta_expansion(int(200));
        for k in -12i64..=12 {
            let n = k * (3 * k - 1) / 2;
            if n < 199 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(long.coeff(Exponent::new(24 * n + 1, 24)), BigInt::from(sign));
            }
        }
        assert_eq!(long.len(), (-12i64..=12).filter(|k| k * (3 * k - 1) / 2 < 200).count());
    }

    #[test]
    fn eta_squared_two_ways() {
        let e = eta_expansion(int(30));
        let sq = &e * &e;
        assert_eq!(sq, eta_quotient_expansion(&q("1^2"), sq.order()));
    }

    #[test]
    fn discriminant_form() {
        let d = eta_quotient_expansion(&q("1^24"), int(4));
        let expect = QSeries::from_integer_steps(
            int(1),
            vec![BigInt::from(1), BigInt::from(-24), BigInt::from(252)],
            int(4),
        );
        assert_eq!(d, expect);
        let naive = naive_power(24, 40);
        let long = eta_quotient_expansion(&q("1^24"), int(41));
        for n in 0..40 {
            assert_eq!(long.coeff_int(n as i64 + 1), BigInt::from(naive[n]));
        }
    }

    #[test]
    fn valuation_formula() {
        assert_eq!(q("1^8 2^8").valuation(), int(1));
        let s = eta_quotient_expansion(&q("1^8 2^8"), int(10));
        assert_eq!(s.valuation(), Some(int(1)));
    }

    #[test]
    fn triangular_numbers() {
        let s = eta_quotient_expansion(&q("2^2 1^-1"), int(7));
        let expect = QSeries::from_terms(
            [0i64, 1, 3, 6].iter().map(|&n| (Exponent::new(8 * n + 1, 8), BigInt::one())),
            int(7),
        );
        assert_eq!(s, expect);
    }

    #[test]
    fn rescaled_eta_matches_direct() {
        let base = eta_expansion(int(60));
        for m in 1..6u64 {
            let direct = eta_quotient_expansion(&EtaQuotient::eta_power(m, 1), int(60 * m as i64));
            assert_eq!(base.rescale(int(m as i64)), direct);
        }
        // non-integral rescale k/k_i
        let s = Exponent::new(7, 3);
        let r = base.rescale(s);
        assert_eq!(r.order(), int(140));
        assert_eq!(r.coeff(Exponent::new(7, 72)), BigInt::one());
    }

    #[test]
    fn generic_route_agrees() {
        // product of rescaled eta powers via series arithmetic
        let eq = q("1^-3 2^5 4^-2 6^1");
        let order = int(25);
        let eta = eta_expansion(int(40));
        let mut acc = QSeries::one(int(100));
        for (&m, &r) in eq.factors() {
            acc = &acc * &eta.rescale(int(m as i64)).pow(r).unwrap();
        }
        let direct = eta_quotient_expansion(&eq, order);
        assert!(acc.order() >= order);
        assert_eq!(acc.truncate(order), direct);
    }

    #[test]
    fn metadata_examples() {
        let m = eta_quotient_metadata(&q("1^8 2^8"), 2);
        assert_eq!(m.weight, int(8));
        assert!(m.integer_weight);
        assert_eq!(m.sum_m_r, 24);
        assert_eq!(m.sum_level_over_m_r, Some(24));
        assert!(m.congruences_ok());
        assert_eq!(m.s_value, BigRational::from_integer(BigInt::from(256)));
        assert_eq!(m.character_discriminant, Some(BigInt::one()));

        let m = eta_quotient_metadata(&q("1^24"), 1);
        assert_eq!(m.weight, int(12));
        assert!(m.congruences_ok());

        let m = eta_quotient_metadata(&q("1^4 2^2 4^4"), 4);
        assert_eq!(m.weight, int(5));
        assert!(m.congruences_ok());
        assert_eq!(m.character_discriminant, Some(BigInt::from(-4)));

        let m = eta_quotient_metadata(&q("1^3 7^3"), 7);
        assert_eq!(m.character_discriminant, Some(BigInt::from(-7)));
    }

    #[test]
    fn metadata_half_integral_and_bad_level() {
        let m = eta_quotient_metadata(&q("2^2 1^-1"), 2);
        assert_eq!(m.weight, Rational64::new(1, 2));
        assert!(m.multiplier_system);
        assert_eq!(m.character_discriminant, None);
        let m = eta_quotient_metadata(&q("1^8 2^8"), 3);
        assert_eq!(m.nondividing, vec![2]);
        assert!(!m.level_divisibility_ok());
        assert_eq!(m.sum_level_over_m_r, None);
    }

    fn order_at(orders: &[CuspOrder], pred: impl Fn(&Cusp) -> bool) -> Rational64 {
        orders.iter().find(|o| pred(&o.cusp)).unwrap().order
    }

    #[test]
    fn cusp_orders_examples() {
        let o = cusp_orders(&q("1^8 2^8"), 2).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(order_at(&o, Cusp::is_infinity), int(1));
        assert_eq!(order_at(&o, Cusp::is_zero), int(1));

        let o = cusp_orders(&q("1^24"), 1).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].order, int(1));

        let o = cusp_orders(&q("2^12"), 4).unwrap();
        assert_eq!(o.len(), 3);
        for c in &o {
            assert_eq!(c.order, int(1), "cusp {}", c.cusp);
        }
        assert_eq!(total_cusp_order(&o), valence_total(int(6), 4));
        assert_eq!(o.iter().find(|c| c.cusp.denom == 2).unwrap().cusp.to_string(), "1/2");
    }

    #[test]
    fn cusp_orders_reject_bad_level() {
        assert_eq!(
            cusp_orders(&q("1^8 2^8"), 3),
            Err(Error::LevelIncompatible { multiplier: 2, level: 3 })
        );
    }

    #[test]
    fn cusp_classes_counted() {
        for n in 1..60u64 {
            let cusps = gamma0_cusps(n);
            let expect: u64 = divisors(n).iter().map(|&c| cusp_class_count(c, n)).sum();
            assert_eq!(cusps.len() as u64, expect);
            // representatives are distinct and reduced
            for c in &cusps {
                assert_eq!(gcd(c.numer, c.denom), 1);
            }
        }
        // Gamma_0(8): inf, 0, 1/2, 1/4 ; Gamma_0(9): four cusps incl. 1/3, 2/3
        assert_eq!(gamma0_cusps(8).len(), 4);
        let nine: Vec<String> = gamma0_cusps(9).iter().map(|c| c.to_string()).collect();
        assert_eq!(nine, vec!["0", "1/3", "2/3", "inf"]);
    }

    #[test]
    fn cusp_orders_are_additive() {
        let a = q("1^4 2^2 4^4");
        let b = q("2^12");
        let oa = cusp_orders(&a, 4).unwrap();
        let ob = cusp_orders(&b, 4).unwrap();
        let oab = cusp_orders(&a.mul(&b), 4).unwrap();
        for ((x, y), z) in oa.iter().zip(&ob).zip(&oab) {
            assert_eq!(x.order + y.order, z.order);
        }
        assert_eq!(a.mul(&b).weight(), a.weight() + b.weight());
    }
}
