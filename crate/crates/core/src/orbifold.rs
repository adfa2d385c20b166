//! Local partition functions `Z_Delta` of `[C^2/G_Delta]`, computed three
//! ways (eta quotient, theta over eta, specialized orbifold lattice sum), the
//! multivariate orbifold series for small rank, coefficient extraction, and a
//! brute-force count of monomial ideals for cyclic groups.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::eta::{eta_product_coefficients, eta_quotient_expansion, EtaQuotient};
use crate::lattice::{for_each_vector, Decomposition, EnumBudget, Rat};
use crate::qseries::{ceil_rat, Exponent, QSeries};
use crate::rootsys::{ade_data, polyhedral_of, theta_series_with_budget, AdeType, RootSystemData};

/// Which construction of the local series to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Eta,
    Theta,
    Nakajima,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Route::Eta),
            "theta" => Ok(Route::Theta),
            "nakajima" => Ok(Route::Nakajima),
            other => Err(Error::Parse(format!("unknown route `{other}`"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Eta => "eta",
            Route::Theta => "theta",
            Route::Nakajima => "nakajima",
        })
    }
}

/// The eta quotient of the local series: `1/eta` for A types,
/// `eta(2tau)^2 eta(4E tau) / (eta(tau) eta(2E tau) eta(2F tau) eta(2V tau))`
/// otherwise.
pub fn local_eta_quotient(t: AdeType) -> Result<EtaQuotient> {
    let t = ade_data(t)?.type_tag;
    match polyhedral_of(t) {
        None => Ok(EtaQuotient::eta_power(1, -1)),
        Some(p) => EtaQuotient::new([
            (2, 2),
            (4 * p.edges, 1),
            (1, -1),
            (2 * p.edges, -1),
            (2 * p.faces, -1),
            (2 * p.vertices, -1),
        ]),
    }
}

pub fn local_z_eta(t: AdeType, order: Exponent) -> Result<QSeries> {
    Ok(eta_quotient_expansion(&local_eta_quotient(t)?, order))
}

/// `theta_Delta(tau) / eta(k tau)^(n+1)`.
pub fn local_z_theta(t: AdeType, order: Exponent) -> Result<QSeries> {
    local_z_theta_with_budget(t, order, EnumBudget::from_env())
}

pub fn local_z_theta_with_budget(t: AdeType, order: Exponent, budget: EnumBudget) -> Result<QSeries> {
    let data = ade_data(t)?;
    let k = data.group_order as i64;
    let n1 = data.rank as i64 + 1;
    let theta = theta_series_with_budget(t, order + Rational64::new(k * n1, 24), budget)?;
    let denom = eta_quotient_expansion(&EtaQuotient::eta_power(k as u64, -n1), order - data.min_exponent());
    Ok((&theta * &denom).truncate(order))
}

/// `q^(-1/24) prod (1 - q^(km))^(-n-1) sum_m q^((m|zeta) + (k/2)(m|m))`, the
/// orbifold series under `q_i -> q^(d_i)`.
pub fn nakajima_specialized(t: AdeType, order: Exponent) -> Result<QSeries> {
    nakajima_specialized_with_budget(t, order, EnumBudget::from_env())
}

pub fn nakajima_specialized_with_budget(t: AdeType, order: Exponent, budget: EnumBudget) -> Result<QSeries> {
    let data = ade_data(t)?;
    let inner = order + Rational64::new(1, 24);
    let len = ceil_rat(inner).max(0) as usize;
    let lattice = specialized_lattice_sum(&data, len, budget)?;
    let k = data.group_order as usize;
    let mut colored = vec![BigInt::zero(); len];
    for (j, c) in colored_partition_counts(data.rank + 1, len.div_ceil(k)).into_iter().enumerate() {
        if j * k < len {
            colored[j * k] = c;
        }
    }
    let mut prod = vec![BigInt::zero(); len];
    for (i, a) in colored.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (j, b) in lattice.iter().enumerate().take(len - i) {
            if b != &0 {
                prod[i + j] += a * b;
            }
        }
    }
    Ok(QSeries::from_integer_steps(Rational64::new(-1, 24), prod, order))
}

/// Counts of `m` with `(m|zeta) + (k/2)(m|m) = e` for `0 <= e < len`.
fn specialized_lattice_sum(data: &RootSystemData, len: usize, budget: EnumBudget) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; len];
    if len == 0 {
        return Ok(counts);
    }
    let dec = Decomposition::new(&data.cartan).expect("Cartan matrices are positive definite");
    let k = data.group_order as i128;
    // (k/2)|m + zeta/k|^2 = e + (zeta|zeta)/2k, so bound |x|^2 by 2(len + min)/k
    let min = data.zeta_norm() / Rat::from_integer(2 * k);
    let bound = (Rat::from_integer(len as i128) + min) * Rat::new(2, k);
    let c = &data.cartan;
    let d = &data.highest_root;
    for_each_vector(&dec, &data.theta_shift(), bound, budget, |m, _| {
        let mut md: i128 = 0;
        let mut mcm: i128 = 0;
        for i in 0..m.len() {
            md += (m[i] * d[i]) as i128;
            for j in 0..m.len() {
                mcm += (m[i] * c[i][j] * m[j]) as i128;
            }
        }
        let e = md + k * mcm / 2;
        if (0..len as i128).contains(&e) {
            counts[e as usize] += 1;
        }
    })?;
    Ok(counts)
}

/// The local series by the chosen route.
pub fn local_z(t: AdeType, order: Exponent, route: Route) -> Result<QSeries> {
    match route {
        Route::Eta => local_z_eta(t, order),
        Route::Theta => local_z_theta(t, order),
        Route::Nakajima => nakajima_specialized(t, order),
    }
}

/// `p_c(j)` for `0 <= j < len`: coefficients of `prod (1 - q^m)^(-c)`.
pub fn colored_partition_counts(c: usize, len: usize) -> Vec<BigInt> {
    eta_product_coefficients(&EtaQuotient::eta_power(1, -(c as i64)), len)
}

/// Half the norm `(1/2) mu^T C mu`, an integer for root lattices.
pub fn half_norm(data: &RootSystemData, mu: &[i64]) -> i64 {
    let n = data.rank;
    let mut s = 0i64;
    for i in 0..n {
        for j in 0..n {
            s += mu[i] * data.cartan[i][j] * mu[j];
        }
    }
    debug_assert!(s % 2 == 0);
    s / 2
}

/// Coefficient of `q_1^(mu_1) ... q_n^(mu_n) Q^e` in the orbifold series:
/// `p_(n+1)(e - (1/2) mu^T C mu)`, zero when the argument is negative.
pub fn nakajima_coefficient(t: AdeType, mu: &[i64], e: i64) -> Result<BigInt> {
    let data = ade_data(t)?;
    if mu.len() != data.rank {
        return Err(Error::Parse(format!("{t} needs a vector of length {}, got {}", data.rank, mu.len())));
    }
    let arg = e - half_norm(&data, mu);
    if arg < 0 {
        return Ok(BigInt::zero());
    }
    let arg = arg as usize;
    Ok(colored_partition_counts(data.rank + 1, arg + 1).swap_remove(arg))
}

/// A series in `q_0, ..., q_n` with integer coefficients, truncated by total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    rank: usize,
    terms: BTreeMap<Vec<u64>, BigInt>,
    total_degree_bound: u64,
}

impl MultiSeries {
    /// Empty series in `rank + 1` variables.
    pub fn new(rank: usize, total_degree_bound: u64) -> Self {
        MultiSeries { rank, terms: BTreeMap::new(), total_degree_bound }
    }

    /// Adds `c` at the multidegree; ignored beyond the degree bound.
    pub fn add(&mut self, degree: Vec<u64>, c: BigInt) {
        assert_eq!(degree.len(), self.rank + 1, "multidegree length");
        if degree.iter().sum::<u64>() > self.total_degree_bound || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(degree).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, degree: &[u64]) -> BigInt {
        self.terms.get(degree).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u64>, BigInt> {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn total_degree_bound(&self) -> u64 {
        self.total_degree_bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Permutes the variables: variable `i` becomes variable `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> MultiSeries {
        let mut out = MultiSeries::new(self.rank, self.total_degree_bound);
        for (deg, c) in &self.terms {
            let mut d = vec![0; deg.len()];
            for (i, &x) in deg.iter().enumerate() {
                d[perm[i]] = x;
            }
            out.add(d, c.clone());
        }
        out
    }

    /// Sets `q_i = q^(w_i)`, returning coefficients of `q^0 .. q^bound`.
    pub fn specialize(&self, weights: &[u64]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.total_degree_bound as usize + 1];
        for (deg, c) in &self.terms {
            let e: u64 = deg.iter().zip(weights).map(|(a, b)| a * b).sum();
            if let Some(slot) = out.get_mut(e as usize) {
                *slot += c;
            }
        }
        out
    }
}

/// The orbifold series `prod (1 - Q^m)^(-n-1) sum_mu q^mu Q^((1/2) mu^T C mu)`
/// with `Q = q_0^(d_0) ... q_n^(d_n)`, `d_0 = 1`, truncated at total degree
/// `bound`. Only ranks 1 and 2 are expanded.
pub fn nakajima_multivariate(t: AdeType, bound: u64) -> Result<MultiSeries> {
    let data = ade_data(t)?;
    let n = data.rank;
    if n > 2 {
        return Err(Error::RankTooLarge(n));
    }
    let mut dims = vec![1u64];
    dims.extend(data.highest_root.iter().map(|&x| x as u64));
    // m_0 = j, so j never exceeds the bound even when mu lowers the degree
    let jmax = bound;
    let colored = colored_partition_counts(n + 1, jmax as usize + 1);
    let b = bound as i64;
    let mut out = MultiSeries::new(n, bound);
    let mut mu = vec![-b; n];
    loop {
        let h = half_norm(&data, &mu);
        for j in h.max(0)..=jmax as i64 {
            let degree: Vec<i64> = std::iter::once(j)
                .chain((0..n).map(|i| j * dims[i + 1] as i64 + mu[i]))
                .collect();
            if degree.iter().any(|&x| x < 0) || degree.iter().sum::<i64>() > b {
                continue;
            }
            out.add(degree.into_iter().map(|x| x as u64).collect(), colored[(j - h) as usize].clone());
        }
        // odometer over the box [-b, b]^n
        let mut i = 0;
        while i < n {
            mu[i] += 1;
            if mu[i] <= b {
                break;
            }
            mu[i] = -b;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(out)
}

/// Convention for the color of the box `(i, j)` in the cyclic oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coloring {
    /// `(i - j) mod k`: the weight of `x^i y^j` under `(x, y) -> (w x, w^-1 y)`.
    RowMinusColumn,
    /// `(j - i) mod k`.
    ColumnMinusRow,
}

/// Upper limit on the oracle's length bound.
pub const ORACLE_MAX_LENGTH: usize = 30;

/// Counts monomial ideals of colength at most `bound` in `C[x, y]` by the
/// multiplicities of the characters of `Z/k` in the quotient.
pub fn cyclic_hilb_oracle(k: usize, bound: usize) -> Result<MultiSeries> {
    cyclic_hilb_oracle_with(k, bound, Coloring::RowMinusColumn)
}

pub fn cyclic_hilb_oracle_with(k: usize, bound: usize, coloring: Coloring) -> Result<MultiSeries> {
    if bound > ORACLE_MAX_LENGTH {
        return Err(Error::OracleBound(bound));
    }
    if k < 2 {
        return Err(Error::Unsupported(format!("cyclic group order {k} (need k >= 2)")));
    }
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut colors = vec![0u64; k];
    walk_partitions(0, bound, bound, k, coloring, &mut colors, &mut counts);
    let mut out = MultiSeries::new(k - 1, bound as u64);
    for (deg, c) in counts {
        out.add(deg, BigInt::from(c));
    }
    Ok(out)
}

/// Adds rows of length at most `max_part` starting at row `row`, with `left`
/// boxes still available; records every partial partition.
fn walk_partitions(
    row: usize,
    max_part: usize,
    left: usize,
    k: usize,
    coloring: Coloring,
    colors: &mut Vec<u64>,
    counts: &mut BTreeMap<Vec<u64>, u64>,
) {
    *counts.entry(colors.clone()).or_insert(0) += 1;
    for len in 1..=max_part.min(left) {
        // row `row` gets boxes (row, 0) .. (row, len - 1)
        let col = len - 1;
        let c = match coloring {
            Coloring::RowMinusColumn => (row as i64 - col as i64).rem_euclid(k as i64),
            Coloring::ColumnMinusRow => (col as i64 - row as i64).rem_euclid(k as i64),
        } as usize;
        colors[c] += 1;
        walk_partitions(row + 1, len, left - len, k, coloring, colors, counts);
        // the next iteration extends this row by one box
    }
    for col in 0..max_part.min(left) {
        let c = match coloring {
            Coloring::RowMinusColumn => (row as i64 - col as i64).rem_euclid(k as i64),
            Coloring::ColumnMinusRow => (col as i64 - row as i64).rem_euclid(k as i64),
        } as usize;
        colors[c] -= 1;
    }
}

/// `sum_j q^(2j^2 + j + 1/8)` to `order`.
pub fn jtp_sum(order: Exponent) -> QSeries {
    let mut terms = Vec::new();
    let lim = ceil_rat(order).max(0);
    let mut j: i64 = 0;
    // 2j^2 + j grows in |j|; walk both signs until past the order
    while 2 * j * j - j.abs() < lim + 1 {
        for s in if j == 0 { vec![0] } else { vec![j, -j] } {
            terms.push((Rational64::new(8 * (2 * s * s + s) + 1, 8), BigInt::one()));
        }
        j += 1;
    }
    QSeries::from_terms(terms, order)
}

/// `sum_n e(Hilb^n(Y)^H) q^(2n)` for a D or E type, assembled by
/// stratifying `Y/H`: the open part has Euler characteristic `-1` and
/// the three orbifold points are `[C^2/Z_a]` for `a` in `(p, q, r)`.
pub fn y_quotient_series(t: AdeType, order: i64) -> Result<Vec<BigInt>> {
    let data = ade_data(t)?;
    let p = data.polyhedral.ok_or_else(|| Error::Unsupported(format!("{t} has no polyhedral data")))?;
    let len = order.max(0) as usize;
    // free part: prod (1 - q^m)^(+1), substituted q -> q^(2M)
    let open = eta_product_coefficients(&EtaQuotient::eta_power(1, 1), len);
    let mut acc = spread(&open, 2 * p.m as usize, len);
    let (pp, qq, rr) = p.pqr;
    for a in [pp, qq, rr] {
        // punctual A_(a-1) series, from the specialized orbifold sum
        let local = nakajima_specialized(AdeType::A(a as usize - 1), Rational64::from_integer(len as i64))?;
        let shifted = local.shift(Rational64::new(1, 24));
        let coeffs: Vec<BigInt> = (0..len as i64).map(|i| shifted.coeff_int(i)).collect();
        let factor = spread(&coeffs, (2 * p.m / a) as usize, len);
        acc = mul_dense(&acc, &factor, len);
    }
    Ok(acc)
}

fn spread(c: &[BigInt], step: usize, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in c.iter().enumerate() {
        if i * step < len {
            out[i * step] = x.clone();
        }
    }
    out
}

fn mul_dense(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `sum_j sum_n e(Hilb^n(Y)^H) q^(2n + j + 2j^2) - q^(1/24) Z_Delta`, through
/// integer exponents below `order`. Zero when the recombination holds.
pub fn recombination_residual(t: AdeType, order: i64) -> Result<QSeries> {
    let y = y_quotient_series(t, order)?;
    let mut lhs = vec![BigInt::zero(); order.max(0) as usize];
    for (n, c) in y.iter().enumerate() {
        if n % 2 != 0 || c.is_zero() {
            // only even powers occur
            assert!(c.is_zero(), "odd power in Y/H series");
            continue;
        }
        let base = n as i64;
        let mut j: i64 = 0;
        loop {
            let mut any = false;
            for s in if j == 0 { vec![0] } else { vec![j, -j] } {
                let e = base + s + 2 * s * s;
                if e < order {
                    lhs[e as usize] += c;
                    any = true;
                }
            }
            if !any {
                break;
            }
            j += 1;
        }
    }
    let o = Rational64::from_integer(order);
    let lhs = QSeries::from_integer_steps(Rational64::zero(), lhs, o);
    let rhs = local_z_eta(t, o - Rational64::new(1, 24))?.shift(Rational64::new(1, 24));
    Ok(&lhs - &rhs)
}
