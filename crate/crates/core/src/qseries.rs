//! Truncated Laurent series in `q` with exact integer coefficients.
//!
//! Exponents live on the grid `(1/D)·Z` for a positive integer `D`. A series
//! carries an `order`: every coefficient strictly below it is exact, nothing
//! at or above it is known. The grid denominator is kept in lowest terms, so
//! two series that represent the same truncated expansion compare equal.
//!
//! Order propagation follows the valuation-aware rules:
//!
//! * `a + b` is valid below `min(a.order, b.order)`;
//! * `a * b` is valid below `min(a.order + val(b), b.order + val(a))`;
//! * `1 / a` is valid below `a.order - 2 val(a)`;
//!
//! where `val` is the lowest exponent carrying a nonzero coefficient (or the
//! order itself for a series that is zero to its precision).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::lcm;
use crate::error::{Error, Result};

/// Exact rational exponent.
pub type Exponent = Rational64;

/// A truncated series `sum c_g q^(g/D) + O(q^order)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    denom: u64,
    order: Exponent,
    terms: BTreeMap<i64, BigInt>,
}

/// `ceil(x)` for a rational.
pub(crate) fn ceil_rat(x: Exponent) -> i64 {
    x.ceil().to_integer()
}

/// Number of integer grid points `g` (with step 1/denom) strictly below `order`.
fn grid_bound(order: Exponent, denom: u64) -> i64 {
    // largest g with g/denom < order, plus one
    ceil_rat(order * Exponent::from_integer(denom as i64))
}

impl QSeries {
    /// The zero series known to `order`.
    pub fn zero(order: Exponent) -> Self {
        QSeries { denom: 1, order, terms: BTreeMap::new() }
    }

    /// The constant series 1 known to `order` (zero if `order <= 0`).
    pub fn one(order: Exponent) -> Self {
        Self::monomial(BigInt::one(), Exponent::zero(), order)
    }

    pub fn monomial(coeff: BigInt, exponent: Exponent, order: Exponent) -> Self {
        Self::from_terms([(exponent, coeff)], order)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed; terms at or above `order` are dropped.
    pub fn from_terms<I>(terms: I, order: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigInt)>,
    {
        let collected: Vec<(Exponent, BigInt)> =
            terms.into_iter().filter(|(e, c)| *e < order && !c.is_zero()).collect();
        let denom = collected
            .iter()
            .fold(1u64, |d, (e, _)| lcm(d, *e.denom() as u64));
        let mut map: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in collected {
            let g = e.numer() * (denom as i64 / e.denom());
            *map.entry(g).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut s = QSeries { denom, order, terms: map };
        s.normalize();
        s
    }

    /// Builds `sum_i coeffs[i] q^(offset + i)`.
    pub fn from_integer_steps(offset: Exponent, coeffs: Vec<BigInt>, order: Exponent) -> Self {
        Self::from_terms(
            coeffs
                .into_iter()
                .enumerate()
                .map(|(i, c)| (offset + Exponent::from_integer(i as i64), c)),
            order,
        )
    }

    /// Builds a series directly from grid indices on step `1/denom`.
    pub fn from_grid<I>(denom: u64, terms: I, order: Exponent) -> Self
    where
        I: IntoIterator<Item = (i64, BigInt)>,
    {
        assert!(denom > 0, "grid denominator must be positive");
        let bound = grid_bound(order, denom);
        let mut map: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (g, c) in terms {
            if g < bound && !c.is_zero() {
                *map.entry(g).or_insert_with(BigInt::zero) += c;
            }
        }
        map.retain(|_, c| !c.is_zero());
        let mut s = QSeries { denom, order, terms: map };
        s.normalize();
        s
    }

    /// Reduces the grid denominator to the smallest one carrying every term.
    fn normalize(&mut self) {
        let d = self.denom as i64;
        let g = self.terms.keys().fold(d, |acc, &k| acc.gcd(&k));
        if g > 1 {
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, c)| (k / g, c))
                .collect();
            self.denom /= g as u64;
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn order(&self) -> Exponent {
        self.order
    }

    /// Stored grid indices and coefficients (exponent = index / denom).
    pub fn grid_terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    /// Nonzero terms as `(exponent, coefficient)`, sorted by exponent.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        let d = self.denom as i64;
        self.terms.iter().map(move |(&g, c)| (Exponent::new(g, d), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms()
            .next()
            .map(|(e, _)| e)
    }

    /// Valuation, or the order for a series that vanishes to its precision.
    pub fn valuation_or_order(&self) -> Exponent {
        self.valuation().unwrap_or(self.order)
    }

    /// Coefficient of `q^e` (zero when off-grid or absent).
    ///
    /// Panics if `e` is not below the order, since that coefficient is unknown.
    pub fn coeff(&self, e: Exponent) -> BigInt {
        assert!(e < self.order, "coefficient at {e} requested beyond order {}", self.order);
        let scaled = e * Exponent::from_integer(self.denom as i64);
        if !scaled.is_integer() {
            return BigInt::zero();
        }
        self.terms.get(&scaled.to_integer()).cloned().unwrap_or_default()
    }

    /// Coefficient of `q^n` for an integer `n`.
    pub fn coeff_int(&self, n: i64) -> BigInt {
        self.coeff(Exponent::from_integer(n))
    }

    /// Lowers the order to `order` (no-op when already lower).
    pub fn truncate(&self, order: Exponent) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let bound = grid_bound(order, self.denom);
        let terms = self.terms.range(..bound).map(|(&g, c)| (g, c.clone())).collect();
        let mut s = QSeries { denom: self.denom, order, terms };
        s.normalize();
        s
    }

    /// Multiplication by `q^e`.
    pub fn shift(&self, e: Exponent) -> Self {
        Self::from_terms(self.terms().map(|(x, c)| (x + e, c.clone())), self.order + e)
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self::from_grid(
            self.denom,
            self.terms.iter().map(|(&g, c)| (g, c * factor)),
            self.order,
        )
    }

    /// Grid indices rescaled to the finer grid `d` (a multiple of `self.denom`).
    fn indices_on(&self, d: u64) -> Vec<(i64, &BigInt)> {
        let f = (d / self.denom) as i64;
        self.terms.iter().map(|(&g, c)| (g * f, c)).collect()
    }

    /// True when both series have the same coefficients below the smaller order.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let o = self.order.min(other.order);
        self.truncate(o) == other.truncate(o)
    }

    /// Exponents below the common order where the two series differ.
    pub fn mismatches(&self, other: &QSeries) -> Vec<Exponent> {
        let o = self.order.min(other.order);
        let diff = &self.truncate(o) - &other.truncate(o);
        diff.terms().map(|(e, _)| e).collect()
    }

    /// Substitution `q -> q^s` (i.e. `tau -> s tau`) for a positive rational `s`.
    pub fn rescale(&self, s: Exponent) -> Self {
        assert!(s > Exponent::zero(), "rescale factor must be positive");
        Self::from_terms(self.terms().map(|(e, c)| (e * s, c.clone())), self.order * s)
    }

    /// Multiplicative inverse; the leading coefficient must be +1 or -1.
    pub fn inverse(&self) -> Result<Self> {
        let (&g0, lead) = self.terms.iter().next().ok_or(Error::ZeroSeries)?;
        if lead.abs() != BigInt::one() {
            return Err(Error::NotInvertible(lead.to_string()));
        }
        let v = Exponent::new(g0, self.denom as i64);
        let order = self.order - v * 2;
        // b has grid indices -g0 + i with (-g0 + i)/d < order
        let count = grid_bound(order, self.denom) + g0;
        let count = count.max(0) as usize;
        let tail: Vec<(usize, &BigInt)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(&g, c)| ((g - g0) as usize, c))
            .collect();
        let mut b: Vec<BigInt> = Vec::with_capacity(count);
        for i in 0..count {
            if i == 0 {
                b.push(lead.clone());
                continue;
            }
            let mut acc = BigInt::zero();
            for &(j, a) in &tail {
                if j > i {
                    break;
                }
                acc += a * &b[i - j];
            }
            // lead is a unit equal to its own inverse
            b.push(-(acc * lead));
        }
        Ok(Self::from_grid(
            self.denom,
            b.into_iter().enumerate().map(|(i, c)| (i as i64 - g0, c)),
            order,
        ))
    }

    /// Integer power; negative exponents go through `inverse`.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc: Option<QSeries> = None;
        let mut n = e as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        // a^0 carries the relative precision of a
        Ok(acc.unwrap_or_else(|| QSeries::one(self.order - self.valuation_or_order())))
    }

    /// Text rendering `c*q^(e) + ... + O(q^(order))` with exact fractions.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// JSON rendering `{"denom", "order", "terms": [[g, "c"], ...]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(g, c)| json!([g, c.to_string()]))
            .collect();
        json!({
            "denom": self.denom,
            "order": format!("{}/{}", self.order.numer(), self.order.denom()),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("series JSON: {m}"));
        let denom = v["denom"].as_u64().filter(|&d| d > 0).ok_or_else(|| bad("denom"))?;
        let order = parse_rational(v["order"].as_str().ok_or_else(|| bad("order"))?)?;
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let g = t[0].as_i64().ok_or_else(|| bad("grid index"))?;
            let c: BigInt = t[1]
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("coefficient"))?;
            terms.push((g, c));
        }
        Ok(Self::from_grid(denom, terms, order))
    }
}

/// Parses `p`, `p/q` or `a+p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Exponent> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((a, b)) = s.split_once('+') {
        if !a.trim().is_empty() {
            return Ok(parse_rational(a)? + parse_rational(b)?);
        }
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| err())?;
            let q: i64 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            Ok(Exponent::new(p, q))
        }
        None => Ok(Exponent::from_integer(s.parse().map_err(|_| err())?)),
    }
}

fn fmt_exp(e: Exponent) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if first {
                write!(f, "{}*q^({})", c, fmt_exp(e))?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*q^({})", -c, fmt_exp(e))?;
            } else {
                write!(f, " + {}*q^({})", c, fmt_exp(e))?;
            }
        }
        if first {
            write!(f, "O(q^({}))", fmt_exp(self.order))
        } else {
            write!(f, " + O(q^({}))", fmt_exp(self.order))
        }
    }
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        let d = lcm(self.denom, rhs.denom);
        let order = self.order.min(rhs.order);
        QSeries::from_grid(
            d,
            self.indices_on(d)
                .into_iter()
                .chain(rhs.indices_on(d))
                .map(|(g, c)| (g, c.clone())),
            order,
        )
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries {
            denom: self.denom,
            order: self.order,
            terms: self.terms.iter().map(|(&g, c)| (g, -c)).collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;

    fn mul(self, rhs: &QSeries) -> QSeries {
        let order = (self.order + rhs.valuation_or_order())
            .min(rhs.order + self.valuation_or_order());
        if self.is_zero() || rhs.is_zero() {
            return QSeries::zero(order);
        }
        let d = lcm(self.denom, rhs.denom);
        let a = self.indices_on(d);
        let b = rhs.indices_on(d);
        let bound = grid_bound(order, d);
        let base = a[0].0 + b[0].0;
        if bound <= base {
            return QSeries::zero(order);
        }
        let span = (bound - base) as usize;
        let mut acc = vec![BigInt::zero(); span];
        for &(ga, ca) in &a {
            if ga + b[0].0 >= bound {
                break;
            }
            for &(gb, cb) in &b {
                let g = ga + gb;
                if g >= bound {
                    break;
                }
                acc[(g - base) as usize] += ca * cb;
            }
        }
        QSeries::from_grid(
            d,
            acc.into_iter().enumerate().map(|(i, c)| (base + i as i64, c)),
            order,
        )
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Float preview of a coefficient, for human-readable tables only.
pub fn approx(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    fn int(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn poly(coeffs: &[i64], order: i64) -> QSeries {
        QSeries::from_integer_steps(
            int(0),
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            int(order),
        )
    }

    #[test]
    fn add_cancels() {
        let a = poly(&[1, 1], 3);
        let b = poly(&[1, -1], 3);
        assert_eq!(&a + &b, poly(&[2], 3));
        assert_eq!(&a + &QSeries::zero(int(3)), a);
    }

    #[test]
    fn add_reconciles_grids() {
        let a = QSeries::monomial(BigInt::one(), r(1, 24), int(1));
        let b = QSeries::monomial(BigInt::one(), r(1, 8), int(1));
        let s = &a + &b;
        assert_eq!(s.denom(), 24);
        assert_eq!(s.grid_terms().keys().copied().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn mul_small_cases() {
        assert_eq!(&poly(&[1, 1], 3) * &poly(&[1, -1], 3), poly(&[1, 0, -1], 3));
        let qinv = QSeries::monomial(BigInt::one(), int(-1), int(5));
        let q = QSeries::monomial(BigInt::one(), int(1), int(5));
        let p = &qinv * &q;
        assert_eq!(p.coeff_int(0), BigInt::one());
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn mul_finite_product() {
        // (1-q)(1-q^2)(1-q^3) = 1 - q - q^2 + q^4 + q^5 - q^6
        let mut acc = QSeries::one(int(4));
        for n in 1..=3usize {
            let mut c = vec![0i64; n + 1];
            c[0] = 1;
            c[n] = -1;
            acc = &acc * &poly(&c, 4);
        }
        assert_eq!(acc, poly(&[1, -1, -1, 0], 4));
        assert_eq!(acc.order(), int(4));
    }

    #[test]
    fn mul_order_is_valuation_aware() {
        let a = QSeries::from_terms([(int(-1), BigInt::one()), (int(0), BigInt::one())], int(3));
        let b = poly(&[1, 2, 3], 3);
        // min(3 + 0, 3 + (-1)) = 2
        assert_eq!((&a * &b).order(), int(2));
    }

    #[test]
    fn inverse_geometric() {
        let inv = poly(&[1, -1], 4).inverse().unwrap();
        assert_eq!(inv, poly(&[1, 1, 1, 1], 4));
    }

    #[test]
    fn inverse_negates_valuation() {
        let a = QSeries::from_terms([(int(-1), BigInt::one()), (int(0), BigInt::from(3))], int(4));
        let b = a.inverse().unwrap();
        assert_eq!(b.valuation(), Some(int(1)));
        assert_eq!(b.order(), int(6));
    }

    #[test]
    fn inverse_of_discriminant() {
        // brute force prod (1-q^m)^24 to q^4, times q
        let mut c = vec![BigInt::zero(); 5];
        c[0] = BigInt::one();
        for m in 1..5 {
            for _ in 0..24 {
                for i in (m..5).rev() {
                    let t = c[i - m].clone();
                    c[i] -= t;
                }
            }
        }
        let delta = QSeries::from_integer_steps(int(1), c, int(5));
        let inv = delta.inverse().unwrap();
        let expect = QSeries::from_integer_steps(
            int(-1),
            [1, 24, 324, 3200].iter().map(|&x| BigInt::from(x)).collect(),
            int(3),
        );
        assert_eq!(inv, expect);
    }

    #[test]
    fn inverse_rejects_non_unit() {
        let a = poly(&[2, 1], 4);
        assert!(matches!(a.inverse(), Err(Error::NotInvertible(_))));
        assert!(matches!(QSeries::zero(int(3)).inverse(), Err(Error::ZeroSeries)));
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(poly(&[1, 1], 2).rescale(int(2)), poly(&[1, 0, 1, 0], 4));
        let a = QSeries::monomial(BigInt::one(), r(1, 24), int(1));
        let b = a.rescale(int(24));
        assert_eq!(b, QSeries::monomial(BigInt::one(), int(1), int(24)));
        assert_eq!(b.denom(), 1);
    }

    #[test]
    fn text_and_json() {
        let a = QSeries::from_terms([(r(1, 24), BigInt::one()), (r(25, 24), BigInt::from(-1))], int(2));
        assert_eq!(a.to_text(), "1*q^(1/24) - 1*q^(25/24) + O(q^(2))");
        let j = a.to_json();
        assert_eq!(j["denom"], 24);
        assert_eq!(j["order"], "2/1");
        assert_eq!(j["terms"][1][1], "-1");
        assert_eq!(QSeries::from_json(&j).unwrap(), a);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("7+1/8").unwrap(), r(57, 8));
        assert_eq!(parse_rational("-3/6").unwrap(), r(-1, 2));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    fn arb_series() -> impl Strategy<Value = QSeries> {
        (
            prop::sample::select(vec![1i64, 2, 3, 8, 24]),
            prop::collection::vec((-6i64..30, -5i64..6), 0..12),
            0i64..40,
        )
            .prop_map(|(d, terms, ord)| {
                let order = Exponent::new(ord, d).max(int(1));
                QSeries::from_grid(d as u64, terms.into_iter().map(|(g, c)| (g, BigInt::from(c))), order)
            })
    }

    fn arb_unit_series() -> impl Strategy<Value = QSeries> {
        (arb_series(), -3i64..3, prop::bool::ANY).prop_map(|(s, v, neg)| {
            let lead = if neg { -1 } else { 1 };
            let v = Exponent::from_integer(v);
            // put a unit strictly below everything else
            let low = s.valuation_or_order().min(int(0)) - v.abs() - int(1);
            &QSeries::monomial(BigInt::from(lead), low, s.order()) + &s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c))));
            prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c))));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_unit_series()) {
            let b = a.inverse().unwrap();
            prop_assert_eq!(b.valuation(), a.valuation().map(|v| -v));
            let p = &a * &b;
            prop_assert_eq!(p.clone(), QSeries::one(p.order()));
        }

        #[test]
        fn rescale_is_multiplicative(a in arb_series(), b in arb_series(), num in 1i64..6, den in 1i64..6) {
            let s = Exponent::new(num, den);
            prop_assert_eq!((&a * &b).rescale(s), &a.rescale(s) * &b.rescale(s));
        }

        #[test]
        fn truncation_is_sound(a in arb_unit_series(), b in arb_series(), cut in 1i64..10) {
            // lower-precision inputs give a prefix of the higher-precision product
            let lo_a = a.truncate(a.order() - Exponent::new(cut, 3));
            let full = &a * &b;
            let lo = &lo_a * &b;
            prop_assert!(lo.order() <= full.order());
            prop_assert_eq!(full.truncate(lo.order()), lo);
        }

        #[test]
        fn json_round_trip(a in arb_series()) {
            prop_assert_eq!(QSeries::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
