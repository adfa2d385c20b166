//! Exact enumeration of shifted lattice vectors under a positive definite
//! integral quadratic form.
//!
//! The form is decomposed as `x^T C x = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`
//! over the rationals, and coordinates are fixed from the last one down, each
//! range cut by the remaining radius (Fincke–Pohst). All comparisons are
//! exact; no floating point is involved.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational used inside the enumerator.
pub type Rat = Ratio<i128>;

/// Default number of vectors an enumeration may produce.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "ETAFORGE_ENUM_BUDGET";

/// Cap on the number of lattice vectors a single enumeration may emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBudget(pub u64);

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget(DEFAULT_BUDGET)
    }
}

impl EnumBudget {
    /// Budget from `ETAFORGE_ENUM_BUDGET`, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(EnumBudget)
            .unwrap_or_default()
    }
}

/// Rational LDL^T-style decomposition of a positive definite Gram matrix.
#[derive(Clone, Debug)]
pub struct Decomposition {
    n: usize,
    /// `q[i][i]` holds `d_i`; `q[i][j]` for `j > i` holds `mu_ij`.
    q: Vec<Vec<Rat>>,
}

impl Decomposition {
    /// Returns `None` when the matrix is not positive definite.
    pub fn new(gram: &[Vec<i64>]) -> Option<Self> {
        let n = gram.len();
        let mut q: Vec<Vec<Rat>> = gram
            .iter()
            .map(|row| row.iter().map(|&x| Rat::from_integer(x as i128)).collect())
            .collect();
        for i in 0..n {
            if !q[i][i].is_positive() {
                return None;
            }
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] = q[i][j] / q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = q[k][i] * q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        Some(Decomposition { n, q })
    }

    /// The pivots `d_i`.
    pub fn pivots(&self) -> Vec<Rat> {
        (0..self.n).map(|i| self.q[i][i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.n
    }
}

/// Nearest integer to a rational (ties toward +infinity).
fn round_rat(x: Rat) -> i128 {
    (x + Rat::new(1, 2)).floor().to_integer()
}

struct Walker<'a, F> {
    dec: &'a Decomposition,
    shift: &'a [Rat],
    bound: Rat,
    budget: u64,
    emitted: u64,
    m: Vec<i64>,
    x: Vec<Rat>,
    visit: F,
}

impl<F: FnMut(&[i64], Rat)> Walker<'_, F> {
    /// Fixes coordinate `i` given coordinates above it and the norm used so far.
    fn descend(&mut self, i: usize, used: Rat) -> Result<()> {
        let q = &self.dec.q;
        let mut t = self.shift[i];
        for j in i + 1..self.dec.n {
            t += q[i][j] * self.x[j];
        }
        // need d_i (m_i + t)^2 <= bound - used
        let room = (self.bound - used) / q[i][i];
        if room.is_negative() {
            return Ok(());
        }
        let centre = round_rat(-t);
        // walk upward from the centre, then downward
        for dir in [1i128, -1] {
            let mut m = if dir == 1 { centre } else { centre - 1 };
            loop {
                let y = Rat::from_integer(m) + t;
                if y * y > room {
                    break;
                }
                let here = used + q[i][i] * y * y;
                self.m[i] = m as i64;
                self.x[i] = Rat::from_integer(m) + self.shift[i];
                if i == 0 {
                    self.emitted += 1;
                    if self.emitted > self.budget {
                        return Err(Error::BudgetExceeded { budget: self.budget, reached: self.emitted });
                    }
                    (self.visit)(&self.m, here);
                } else {
                    self.descend(i - 1, here)?;
                }
                m += dir;
            }
        }
        Ok(())
    }
}

/// Calls `visit(m, N)` for every integer vector `m` with
/// `N = (m + shift)^T C (m + shift) <= bound`, where `C` is the decomposed Gram
/// matrix. Returns the number of vectors visited.
pub fn for_each_vector<F>(
    dec: &Decomposition,
    shift: &[Rat],
    bound: Rat,
    budget: EnumBudget,
    visit: F,
) -> Result<u64>
where
    F: FnMut(&[i64], Rat),
{
    assert_eq!(shift.len(), dec.n, "shift dimension mismatch");
    if dec.n == 0 {
        let mut visit = visit;
        if !bound.is_negative() {
            visit(&[], Rat::zero());
            return Ok(1);
        }
        return Ok(0);
    }
    let mut w = Walker {
        dec,
        shift,
        bound,
        budget: budget.0,
        emitted: 0,
        m: vec![0; dec.n],
        x: vec![Rat::zero(); dec.n],
        visit,
    };
    w.descend(dec.n - 1, Rat::zero())?;
    Ok(w.emitted)
}

/// `u^T C v` for rational vectors.
pub fn bilinear(gram: &[Vec<i64>], u: &[Rat], v: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c != 0 {
                acc += Rat::from_integer(c as i128) * u[i] * v[j];
            }
        }
    }
    acc
}

/// Solves `C x = b` exactly by Gaussian elimination; `None` when singular.
pub fn solve(gram: &[Vec<i64>], b: &[i64]) -> Option<Vec<Rat>> {
    let n = gram.len();
    let mut a: Vec<Vec<Rat>> = gram
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r: Vec<Rat> = row.iter().map(|&x| Rat::from_integer(x as i128)).collect();
            r.push(Rat::from_integer(bi as i128));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in col..=n {
                    let t = f * a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n]).collect())
}

/// True for a symmetric matrix with positive pivots.
pub fn is_positive_definite(gram: &[Vec<i64>]) -> bool {
    let n = gram.len();
    let symmetric = (0..n).all(|i| (0..n).all(|j| gram[i][j] == gram[j][i]));
    symmetric && Decomposition::new(gram).is_some()
}
