//! Simply laced root systems: Cartan matrices, highest roots, the dual vector
//! `zeta = C^-1 d`, the binary polyhedral group order `k`, and the shifted
//! theta function of the root lattice.
//!
//! Node orderings:
//! * `A_n`: the chain `1 - 2 - ... - n`.
//! * `D_n`: the chain `1 - ... - (n-2)`, with both leaves `n-1` and `n`
//!   attached to node `n-2`.
//! * `E_6, E_7, E_8`: Bourbaki numbering, i.e. the chain `1 - 3 - 4 - 5 - ...`
//!   with node `2` attached to node `4`.
//!
//! Coordinates of `zeta` depend on this ordering; `k`, `(zeta|zeta)` and the
//! theta series do not.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::eta::{eta_quotient_expansion, EtaQuotient};
use crate::lattice::{bilinear, for_each_vector, solve, Decomposition, EnumBudget, Rat};
use crate::qseries::{Exponent, QSeries};

/// An ADE Dynkin type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdeType {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
}

impl AdeType {
    /// Validated constructor for the families.
    pub fn a(n: usize) -> Result<Self> {
        if n >= 1 {
            Ok(AdeType::A(n))
        } else {
            Err(Error::InvalidType(format!("A{n}")))
        }
    }

    pub fn d(n: usize) -> Result<Self> {
        if n >= 4 {
            Ok(AdeType::D(n))
        } else {
            Err(Error::InvalidType(format!("D{n}")))
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            AdeType::A(n) => Self::a(n),
            AdeType::D(n) => Self::d(n),
            e => Ok(e),
        }
    }

    pub fn rank(self) -> usize {
        match self {
            AdeType::A(n) | AdeType::D(n) => n,
            AdeType::E6 => 6,
            AdeType::E7 => 7,
            AdeType::E8 => 8,
        }
    }

    /// Order of the binary polyhedral group attached to the type.
    pub fn group_order(self) -> u64 {
        match self {
            AdeType::A(n) => n as u64 + 1,
            AdeType::D(n) => 4 * (n as u64 - 2),
            AdeType::E6 => 24,
            AdeType::E7 => 48,
            AdeType::E8 => 120,
        }
    }

    pub fn is_a(self) -> bool {
        matches!(self, AdeType::A(_))
    }

    /// Every valid type of rank at most `max_rank`, in a fixed order.
    pub fn all_up_to(max_rank: usize) -> Vec<AdeType> {
        let mut v: Vec<AdeType> = (1..=max_rank).map(AdeType::A).collect();
        v.extend((4..=max_rank).map(AdeType::D));
        for e in [AdeType::E6, AdeType::E7, AdeType::E8] {
            if e.rank() <= max_rank {
                v.push(e);
            }
        }
        v
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(n) => write!(f, "A{n}"),
            AdeType::D(n) => write!(f, "D{n}"),
            AdeType::E6 => f.write_str("E6"),
            AdeType::E7 => f.write_str("E7"),
            AdeType::E8 => f.write_str("E8"),
        }
    }
}

impl FromStr for AdeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidType(t.to_string());
        let mut chars = t.chars();
        let family = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        match (family, n) {
            ('A', n) if n >= 1 => Ok(AdeType::A(n)),
            ('D', n) if n >= 4 => Ok(AdeType::D(n)),
            ('E', 6) => Ok(AdeType::E6),
            ('E', 7) => Ok(AdeType::E7),
            ('E', 8) => Ok(AdeType::E8),
            _ => Err(bad()),
        }
    }
}

impl Serialize for AdeType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Edge, face and vertex counts of the polyhedral decomposition of the sphere
/// attached to a D or E type, with `M = 2E` and `(p, q, r) = (M/E, M/F, M/V)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Polyhedral {
    pub edges: u64,
    pub faces: u64,
    pub vertices: u64,
    pub m: u64,
    pub pqr: (u64, u64, u64),
}

impl Polyhedral {
    fn from_efv(edges: u64, faces: u64, vertices: u64) -> Self {
        let m = 2 * edges;
        Polyhedral { edges, faces, vertices, m, pqr: (m / edges, m / faces, m / vertices) }
    }

    /// `pE = qF = rV = M` and `E + F + V = 2 + M`.
    pub fn is_consistent(&self) -> bool {
        let (p, q, r) = self.pqr;
        p * self.edges == self.m
            && q * self.faces == self.m
            && r * self.vertices == self.m
            && self.edges + self.faces + self.vertices == 2 + self.m
    }
}

/// Everything needed about one root system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystemData {
    pub type_tag: AdeType,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub highest_root: Vec<i64>,
    pub zeta: Vec<Rat>,
    pub group_order: u64,
    pub polyhedral: Option<Polyhedral>,
}

fn cartan_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    c
}

/// Root data for a type, with every structural invariant checked.
pub fn ade_data(t: AdeType) -> Result<RootSystemData> {
    let t = t.validate()?;
    let n = t.rank();
    let (edges, highest_root, polyhedral): (Vec<(usize, usize)>, Vec<i64>, Option<Polyhedral>) = match t {
        AdeType::A(_) => ((0..n - 1).map(|i| (i, i + 1)).collect(), vec![1; n], None),
        AdeType::D(_) => {
            let mut e: Vec<(usize, usize)> = (0..n - 3).map(|i| (i, i + 1)).collect();
            e.push((n - 3, n - 2));
            e.push((n - 3, n - 1));
            let mut d = vec![2i64; n];
            d[0] = 1;
            d[n - 2] = 1;
            d[n - 1] = 1;
            let nn = n as u64;
            (e, d, Some(Polyhedral::from_efv(nn - 2, 2, nn - 2)))
        }
        AdeType::E6 | AdeType::E7 | AdeType::E8 => {
            // Bourbaki 1-3, 3-4, 4-5, ..., 2-4 (0-indexed)
            let mut e = vec![(0, 2), (2, 3), (1, 3)];
            e.extend((3..n - 1).map(|i| (i, i + 1)));
            let (d, efv) = match t {
                AdeType::E6 => (vec![1, 2, 2, 3, 2, 1], (6, 4, 4)),
                AdeType::E7 => (vec![2, 2, 3, 4, 3, 2, 1], (12, 8, 6)),
                _ => (vec![2, 3, 4, 6, 5, 4, 3, 2], (30, 20, 12)),
            };
            (e, d, Some(Polyhedral::from_efv(efv.0, efv.1, efv.2)))
        }
    };
    let cartan = cartan_from_edges(n, &edges);
    let zeta = solve(&cartan, &highest_root).expect("Cartan matrices are nonsingular");
    let group_order = 1 + highest_root.iter().map(|x| (x * x) as u64).sum::<u64>();
    let data = RootSystemData { type_tag: t, rank: n, cartan, highest_root, zeta, group_order, polyhedral };
    debug_assert!(data.invariant_failures().is_empty(), "{:?}", data.invariant_failures());
    Ok(data)
}

impl RootSystemData {
    /// `(u|v) = u^T C v`.
    pub fn form(&self, u: &[Rat], v: &[Rat]) -> Rat {
        bilinear(&self.cartan, u, v)
    }

    /// `(zeta|zeta)`.
    pub fn zeta_norm(&self) -> Rat {
        self.form(&self.zeta, &self.zeta)
    }

    /// Smallest exponent of the theta series, `(zeta|zeta) / 2k`.
    pub fn min_exponent(&self) -> Exponent {
        to_exponent(self.zeta_norm() / Rat::from_integer(2 * self.group_order as i128))
    }

    /// `zeta / k`, the shift of the theta lattice sum.
    pub fn theta_shift(&self) -> Vec<Rat> {
        let k = Rat::from_integer(self.group_order as i128);
        self.zeta.iter().map(|z| z / k).collect()
    }

    /// Names of the structural invariants that fail (empty when all hold).
    pub fn invariant_failures(&self) -> Vec<&'static str> {
        let n = self.rank;
        let c = &self.cartan;
        let mut bad = Vec::new();
        let shape_ok = (0..n).all(|i| {
            c[i][i] == 2 && (0..n).all(|j| c[i][j] == c[j][i] && (i == j || c[i][j] == 0 || c[i][j] == -1))
        });
        if !shape_ok {
            bad.push("cartan shape");
        }
        if !crate::lattice::is_positive_definite(c) {
            bad.push("positive definite");
        }
        let cz_ok = (0..n).all(|i| {
            let row: Rat = (0..n).map(|j| Rat::from_integer(c[i][j] as i128) * self.zeta[j]).sum();
            row == Rat::from_integer(self.highest_root[i] as i128)
        });
        if !cz_ok {
            bad.push("C zeta = d");
        }
        let d: Vec<Rat> = self.highest_root.iter().map(|&x| Rat::from_integer(x as i128)).collect();
        let zd = self.form(&self.zeta, &d);
        if Rat::from_integer(self.group_order as i128) != Rat::from_integer(1) + zd {
            bad.push("k = 1 + (zeta|d)");
        }
        if self.group_order != self.type_tag.group_order() {
            bad.push("group order");
        }
        if let Some(p) = self.polyhedral {
            if !p.is_consistent() {
                bad.push("polyhedral relations");
            }
            if self.group_order != 2 * p.m {
                bad.push("k = 2M");
            }
        }
        bad
    }
}

pub(crate) fn to_exponent(r: Rat) -> Exponent {
    Exponent::new(
        i64::try_from(*r.numer()).expect("exponent numerator fits in i64"),
        i64::try_from(*r.denom()).expect("exponent denominator fits in i64"),
    )
}

fn to_rat(e: Exponent) -> Rat {
    Rat::new(*e.numer() as i128, *e.denom() as i128)
}

/// `(k(n+1) - 1)/24 - (zeta|zeta)/2k`, which vanishes for every type.
pub fn strange_formula_residual(t: AdeType) -> Result<Rational64> {
    let data = ade_data(t)?;
    let k = data.group_order as i64;
    let lhs = Rational64::new(k * (data.rank as i64 + 1) - 1, 24);
    Ok(lhs - data.min_exponent())
}

/// `sum_m q^((k/2) |m + shift|^2)` over `m` in the root lattice, to `order`.
pub fn shifted_theta(data: &RootSystemData, shift: &[Rat], order: Exponent, budget: EnumBudget) -> Result<QSeries> {
    let dec = Decomposition::new(&data.cartan).expect("Cartan matrices are positive definite");
    let half_k = Rat::new(data.group_order as i128, 2);
    let order_r = to_rat(order);
    let mut counts: BTreeMap<Rat, u64> = BTreeMap::new();
    for_each_vector(&dec, shift, order_r / half_k, budget, |_, norm| {
        let e = half_k * norm;
        if e < order_r {
            *counts.entry(e).or_insert(0) += 1;
        }
    })?;
    Ok(QSeries::from_terms(counts.into_iter().map(|(e, c)| (to_exponent(e), BigInt::from(c))), order))
}

/// The shifted theta function of the root lattice to `order`, with the
/// enumeration budget taken from the environment.
pub fn theta_series(t: AdeType, order: Exponent) -> Result<QSeries> {
    theta_series_with_budget(t, order, EnumBudget::from_env())
}

pub fn theta_series_with_budget(t: AdeType, order: Exponent, budget: EnumBudget) -> Result<QSeries> {
    let data = ade_data(t)?;
    shifted_theta(&data, &data.theta_shift(), order, budget)
}

/// The eta quotient claimed to equal the theta function:
/// `eta((n+1)tau)^(n+1) / eta(tau)` for `A_n`, and
/// `eta(2tau)^2 eta(4E tau)^(n+2) / (eta(tau) eta(2E tau) eta(2F tau) eta(2V tau))`
/// for D and E types.
pub fn theta_eta_quotient(t: AdeType) -> Result<EtaQuotient> {
    let t = t.validate()?;
    let n = t.rank() as i64;
    match polyhedral_of(t) {
        None => EtaQuotient::new([(n as u64 + 1, n + 1), (1, -1)]),
        Some(p) => EtaQuotient::new([
            (2, 2),
            (4 * p.edges, n + 2),
            (1, -1),
            (2 * p.edges, -1),
            (2 * p.faces, -1),
            (2 * p.vertices, -1),
        ]),
    }
}

pub(crate) fn polyhedral_of(t: AdeType) -> Option<Polyhedral> {
    let n = t.rank() as u64;
    match t {
        AdeType::A(_) => None,
        AdeType::D(_) => Some(Polyhedral::from_efv(n - 2, 2, n - 2)),
        AdeType::E6 => Some(Polyhedral::from_efv(6, 4, 4)),
        AdeType::E7 => Some(Polyhedral::from_efv(12, 8, 6)),
        AdeType::E8 => Some(Polyhedral::from_efv(30, 20, 12)),
    }
}

/// Theta series minus its eta quotient; the zero series when the identity holds.
pub fn theta_eta_identity_residual(t: AdeType, order: Exponent) -> Result<QSeries> {
    theta_eta_identity_residual_with_budget(t, order, EnumBudget::from_env())
}

pub fn theta_eta_identity_residual_with_budget(t: AdeType, order: Exponent, budget: EnumBudget) -> Result<QSeries> {
    let theta = theta_series_with_budget(t, order, budget)?;
    let eta = eta_quotient_expansion(&theta_eta_quotient(t)?, order);
    Ok(&theta - &eta)
}

/// Order reaching the first `count` grid coefficients above the minimal
/// exponent of the theta function.
pub fn order_for_coefficients(t: AdeType, count: i64) -> Result<Exponent> {
    Ok(ade_data(t)?.min_exponent() + Exponent::from_integer(count))
}
