//! Refinements of the Euler characteristic series: the weak Jacobi form
//! `phi_{-2,1}`, the chi_y-genus series of the fixed loci, the Hodge series
//! of the Hilbert schemes of a K3 surface, and the Euler shadow of the
//! birational-class formula.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eta::{eta_product_coefficients, eta_quotient_expansion, EtaQuotient};
use crate::k3cases::{assemble_global, CaseRecord};
use crate::qseries::QSeries;

/// A Laurent polynomial in `y` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_terms([(0, c)])
    }

    pub fn monomial(c: i64, e: i64) -> Self {
        Self::from_terms([(e, BigInt::from(c))])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(it: I) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in it {
            *terms.entry(e).or_insert_with(BigInt::zero) += c;
        }
        terms.retain(|_, c: &mut BigInt| !c.is_zero());
        LaurentPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Value at `y = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Invariant under `y -> 1/y`.
    pub fn is_palindromic(&self) -> bool {
        self.terms.iter().all(|(e, c)| self.terms.get(&-e) == Some(c))
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        Self::from_terms(self.terms.iter().chain(&o.terms).map(|(e, c)| (*e, c.clone())))
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())).chain(o.terms.iter().map(|(e, c)| (*e, -c))))
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                *out.entry(a + b).or_insert_with(BigInt::zero) += x * y;
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPoly { terms: out }
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    /// Exact quotient `self / d`; fails unless `d` divides `self` over the integers.
    pub fn div_exact(&self, d: &LaurentPoly) -> Result<LaurentPoly> {
        let dmin = d.min_degree().ok_or(Error::InexactDivision)?;
        let dmax = d.max_degree().expect("nonzero");
        let lead = d.coeff(dmax);
        let mut rem = self.clone();
        let mut q: BTreeMap<i64, BigInt> = BTreeMap::new();
        while let Some(top) = rem.max_degree() {
            let c = rem.coeff(top);
            let (quot, r) = c.div_rem(&lead);
            if !r.is_zero() || top - dmax < self.min_degree().unwrap_or(0) - dmin {
                return Err(Error::InexactDivision);
            }
            let shift = top - dmax;
            q.insert(shift, quot.clone());
            let step = LaurentPoly::from_terms(d.terms.iter().map(|(e, x)| (e + shift, x * &quot)));
            rem = rem.sub(&step);
        }
        Ok(LaurentPoly { terms: q })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([e, c.to_string()])).collect())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match e {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*y")?,
                _ => write!(f, "{mag}*y^{e}")?,
            }
        }
        Ok(())
    }
}

/// A series in integer powers of `q` whose coefficients are Laurent
/// polynomials in `y`, valid strictly below `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiSeries {
    terms: BTreeMap<i64, LaurentPoly>,
    order: i64,
}

impl JacobiSeries {
    pub fn new<I: IntoIterator<Item = (i64, LaurentPoly)>>(it: I, order: i64) -> Self {
        let mut terms: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, p) in it {
            if e < order {
                let entry = terms.entry(e).or_default();
                *entry = entry.add(&p);
            }
        }
        terms.retain(|_, p| !p.is_zero());
        JacobiSeries { terms, order }
    }

    /// Lifts a q-series on the integer grid.
    pub fn from_qseries(s: &QSeries) -> Result<Self> {
        if s.denom() != 1 || !s.order().is_integer() {
            return Err(Error::NonIntegerGrid);
        }
        Ok(Self::new(
            s.grid_terms().iter().map(|(g, c)| (*g, LaurentPoly::constant(c.clone()))),
            s.order().to_integer(),
        ))
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Coefficient of `q^n`; panics at or beyond the order.
    pub fn coeff(&self, n: i64) -> LaurentPoly {
        assert!(n < self.order, "coefficient q^{n} is beyond the order {}", self.order);
        self.terms.get(&n).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<i64, LaurentPoly> {
        &self.terms
    }

    /// Product with the sharp order rule used for q-series.
    pub fn mul(&self, o: &JacobiSeries) -> JacobiSeries {
        let va = self.valuation().unwrap_or(self.order);
        let vb = o.valuation().unwrap_or(o.order);
        let order = (self.order + vb).min(o.order + va);
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if a + b < order {
                    let entry = out.entry(a + b).or_default();
                    *entry = entry.add(&x.mul(y));
                }
            }
        }
        JacobiSeries::new(out, order)
    }

    /// Multiplies every coefficient by a fixed Laurent polynomial.
    pub fn scale(&self, p: &LaurentPoly) -> JacobiSeries {
        JacobiSeries::new(self.terms.iter().map(|(e, c)| (*e, c.mul(p))), self.order)
    }

    /// `q -> q^k`.
    pub fn rescale(&self, k: i64) -> JacobiSeries {
        assert!(k > 0, "rescale factor must be positive");
        JacobiSeries::new(self.terms.iter().map(|(e, c)| (e * k, c.clone())), self.order * k)
    }

    /// Exact quotient by a series, dividing each coefficient step exactly by
    /// the leading coefficient of the divisor.
    pub fn div_exact(&self, d: &JacobiSeries) -> Result<JacobiSeries> {
        let vd = d.valuation().ok_or(Error::ZeroSeries)?;
        let lead = d.coeff(vd);
        let vn = self.valuation().unwrap_or(self.order);
        let order = (self.order - vd).min(d.order + vn - 2 * vd);
        let vq = vn - vd;
        let mut q: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for i in vq..order {
            // coefficient of q^(i + vd) in self minus known contributions
            let mut acc = self.terms.get(&(i + vd)).cloned().unwrap_or_default();
            for (j, dj) in d.terms.range(vd + 1..) {
                let idx = i + vd - j;
                if idx < vq {
                    break;
                }
                if let Some(qi) = q.get(&idx) {
                    acc = acc.sub(&dj.mul(qi));
                }
            }
            let c = acc.div_exact(&lead)?;
            if !c.is_zero() {
                q.insert(i, c);
            }
        }
        Ok(JacobiSeries::new(q, order))
    }

    /// Specialization `y = 1`.
    pub fn eval_y_one(&self) -> QSeries {
        QSeries::from_terms(
            self.terms.iter().map(|(e, c)| (Rational64::from_integer(*e), c.eval_one())),
            Rational64::from_integer(self.order),
        )
    }

    pub fn is_palindromic(&self) -> bool {
        self.terms.values().all(LaurentPoly::is_palindromic)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "terms": self.terms.iter().map(|(e, c)| json!([e, c.to_json()])).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for JacobiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.terms {
            writeln!(f, "q^{e}: {c}")?;
        }
        write!(f, "O(q^{})", self.order)
    }
}

/// `y^-1 (1 - y)^2 = y^-1 - 2 + y`.
pub fn y_prefactor() -> LaurentPoly {
    LaurentPoly::from_terms([(-1, BigInt::one()), (0, BigInt::from(-2)), (1, BigInt::one())])
}

/// `(y - 2 + y^-1) prod_n (1 - y q^n)^2 (1 - y^-1 q^n)^2 (1 - q^n)^-4`, below `q^order`.
pub fn weak_jacobi_phi_m2_1(order: i64) -> JacobiSeries {
    let len = order.max(0) as usize;
    let mut c: Vec<LaurentPoly> = eta_product_coefficients(&EtaQuotient::eta_power(1, -4), len)
        .into_iter()
        .map(LaurentPoly::constant)
        .collect();
    for n in 1..len {
        for y_exp in [1i64, -1] {
            for _ in 0..2 {
                for i in (n..len).rev() {
                    let t = c[i - n].mul(&LaurentPoly::monomial(1, y_exp));
                    c[i] = c[i].sub(&t);
                }
            }
        }
    }
    let pre = y_prefactor();
    JacobiSeries::new(c.into_iter().enumerate().map(|(i, p)| (i as i64, p.mul(&pre))), order)
}

/// `y^-1 (1 - y)^2 Z_{X,G}(q) / phi_{-2,1}(q^k, y)` below `q^order`.
pub fn chi_y_series(case: &CaseRecord, order: i64) -> Result<JacobiSeries> {
    let z = eta_quotient_expansion(&assemble_global(case)?, Rational64::from_integer(order));
    let num = JacobiSeries::from_qseries(&z)?.scale(&y_prefactor());
    let k = case.k as i64;
    // the quotient is valid below min(order, phi order * k - 1)
    let phi = weak_jacobi_phi_m2_1(Integer::div_ceil(&(order + 1), &k)).rescale(k);
    num.div_exact(&phi)
}

/// Weight of the Jacobi form attached to the chi_y series of a case,
/// `10 - (1/2) sum rank(Delta_i)`. Recorded only; not verified.
pub fn chi_y_jacobi_weight(case: &CaseRecord) -> Rational64 {
    Rational64::from_integer(10) - Rational64::new(case.singularities.iter().map(|t| t.rank() as i64).sum(), 2)
}

/// A polynomial in `u, v`.
pub type BiPoly = BTreeMap<(u32, u32), BigInt>;

/// Hodge numbers `h^{p,q}` of a K3 surface.
pub const K3_HODGE: [[i64; 3]; 3] = [[1, 0, 1], [0, 20, 0], [1, 0, 1]];

/// Series in `t` with coefficients in `Z[u, v]`, valid below `t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeSeries {
    pub coeffs: Vec<BiPoly>,
}

impl HodgeSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients at `u = v = 1`.
    pub fn eval_one(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|p| p.values().sum()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.coeffs.len(),
            "terms": self.coeffs.iter().enumerate().map(|(n, p)| {
                json!([n, p.iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| json!([a, b, c.to_string()])).collect::<Vec<_>>()])
            }).collect::<Vec<_>>(),
        })
    }
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `prod_m prod_(p,q) (1 - u^(p+m-1) v^(q+m-1) t^m)^(-(-1)^(p+q) h^(p,q))` for a
/// K3 surface, below `t^order`.
pub fn hodge_series_y(order: usize) -> HodgeSeries {
    let mut c: Vec<BiPoly> = vec![BiPoly::new(); order];
    if order == 0 {
        return HodgeSeries { coeffs: c };
    }
    c[0].insert((0, 0), BigInt::one());
    for m in 1..order {
        for (p, row) in K3_HODGE.iter().enumerate() {
            for (q, &h) in row.iter().enumerate() {
                if h == 0 {
                    continue;
                }
                // every K3 Hodge number sits at even p + q, so the exponent is -h
                assert!((p + q) % 2 == 0);
                let (du, dv) = ((p + m - 1) as u32, (q + m - 1) as u32);
                // (1 - x t^m)^(-h) = sum_j C(h + j - 1, j) x^j t^(mj)
                let mut next = vec![BiPoly::new(); order];
                for (i, poly) in c.iter().enumerate() {
                    for (&(a, b), coef) in poly {
                        let mut j = 0usize;
                        while i + m * j < order {
                            let w = binom(h as u64 + j as u64 - 1, j as u64) * coef;
                            let key = (a + du * j as u32, b + dv * j as u32);
                            *next[i + m * j].entry(key).or_insert_with(BigInt::zero) += w;
                            j += 1;
                        }
                    }
                }
                c = next;
            }
        }
    }
    HodgeSeries { coeffs: c }
}

/// The polynomial `sum h^{p,q} u^p v^q` of a K3 surface.
pub fn k3_hodge_polynomial() -> BiPoly {
    let mut out = BiPoly::new();
    for (p, row) in K3_HODGE.iter().enumerate() {
        for (q, &h) in row.iter().enumerate() {
            if h != 0 {
                out.insert((p as u32, q as u32), BigInt::from(h));
            }
        }
    }
    out
}

/// Checks that `(q^-k prod (1 - q^(km))^-24) (q^k prod (1 - q^(km))^24) = 1`
/// below `q^order`.
pub fn zbir_euler_consistency(case: &CaseRecord, order: i64) -> bool {
    zbir_euler_consistency_with_exponent(case, order, 24)
}

/// The same product with the second factor's exponent replaced by `exponent`.
pub fn zbir_euler_consistency_with_exponent(case: &CaseRecord, order: i64, exponent: i64) -> bool {
    let k = case.k as i64;
    let len = order.max(0) as usize;
    let o = Rational64::from_integer;
    // orders order - k and order + k make the product valid below q^order
    let zbir = QSeries::from_integer_steps(
        o(-k),
        eta_product_coefficients(&EtaQuotient::eta_power(case.k, -24), len),
        o(order - k),
    );
    let delta = QSeries::from_integer_steps(
        o(k),
        eta_product_coefficients(&EtaQuotient::eta_power(case.k, exponent), len),
        o(order + k),
    );
    &zbir * &delta == QSeries::one(o(order))
}
