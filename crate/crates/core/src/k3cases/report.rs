use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{global_inverse, stratification_mismatches, CaseRecord};
use crate::error::Result;
use crate::eta::{cusp_orders, eta_quotient_expansion, eta_quotient_metadata, total_cusp_order, valence_total};

/// One named pass/fail line of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: String, pass: bool, detail: String) -> Self {
        Check { name, pass, detail }
    }
}

/// Modularity data and checks for one case.
#[derive(Clone, Debug)]
pub struct CaseReport {
    pub xiao: u32,
    pub group_label: String,
    /// `Z_{X,G}^{-1}` in `m^r` notation.
    pub eta_quotient: String,
    pub weight: Rational64,
    pub level: u64,
    pub valuation: Rational64,
    pub cusp_orders: Vec<(String, Rational64)>,
    pub checks: Vec<Check>,
    pub expansion: Value,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "xiao": self.xiao,
            "group": self.group_label,
            "eta_quotient": self.eta_quotient,
            "weight": rat_json(self.weight),
            "level": self.level,
            "valuation": rat_json(self.valuation),
            "cusp_orders": self.cusp_orders.iter()
                .map(|(c, o)| json!({"cusp": c, "order": rat_json(*o)}))
                .collect::<Vec<_>>(),
            "checks": self.checks,
            "expansion": self.expansion,
        })
    }
}

/// Integers as JSON numbers, other rationals as `"p/q"` strings.
fn rat_json(r: Rational64) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(r.to_string())
    }
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check::new(name.to_string(), pass, detail)
}

/// Runs every structural check on `Z_{X,G}^{-1}` at level `k`; the
/// q-expansion is taken below `q^order` and the stratification comparison
/// below `q^strat_len`.
pub fn modularity_report(case: &CaseRecord, order: i64, strat_len: usize) -> Result<CaseReport> {
    let inv = global_inverse(case)?;
    let level = case.k;
    let meta = eta_quotient_metadata(&inv, level);
    let mut checks = Vec::new();

    let half_e = Rational64::new(case.euler_quotient, 2);
    checks.push(check(
        "weight_half_euler",
        meta.weight == half_e,
        format!("weight {} vs e(X/G)/2 = {half_e}", meta.weight),
    ));

    let expansion = eta_quotient_expansion(&inv, Rational64::from_integer(order.max(2)));
    let valuation = inv.valuation();
    let series_val = expansion.valuation();
    checks.push(check(
        "valuation_one",
        valuation == Rational64::from_integer(1) && series_val == Some(valuation),
        format!("valuation {valuation}, leading coefficient {}", expansion.coeff(valuation)),
    ));

    checks.push(check(
        "multipliers_divide_level",
        meta.level_divisibility_ok(),
        if meta.level_divisibility_ok() {
            format!("all multipliers divide {level}")
        } else {
            format!("multipliers {:?} do not divide {level}", meta.nondividing)
        },
    ));

    if meta.integer_weight {
        checks.push(check(
            "kohler_congruences",
            meta.congruences_ok(),
            format!(
                "sum m r = {} (mod 24: {}), sum (N/m) r mod 24 = {:?}",
                meta.sum_m_r, meta.sum_m_r_mod24, meta.sum_level_over_m_r_mod24
            ),
        ));
    } else {
        checks.push(check(
            "kohler_congruences",
            true,
            format!("informational (half-integral weight): sum m r mod 24 = {}", meta.sum_m_r_mod24),
        ));
    }

    let orders = cusp_orders(&inv, level)?;
    let at = |inf: bool| {
        orders
            .iter()
            .find(|o| if inf { o.cusp.is_infinity() } else { o.cusp.is_zero() })
            .map(|o| o.order)
    };
    let (o_inf, o_zero) = (at(true), at(false));
    if meta.integer_weight {
        let one = Some(Rational64::from_integer(1));
        checks.push(check(
            "order_one_at_inf_and_zero",
            o_inf == one && o_zero == one,
            format!("order at inf {:?}, at 0 {:?}", o_inf.map(|r| r.to_string()), o_zero.map(|r| r.to_string())),
        ));
    }
    let total = total_cusp_order(&orders);
    let valence = valence_total(meta.weight, level);
    checks.push(check(
        "valence_total",
        total == valence,
        format!("sum of cusp orders {total}, weight * index / 12 = {valence}"),
    ));
    let cusp_form = orders.iter().all(|o| o.order > Rational64::from_integer(0));
    checks.push(check(
        "vanishes_at_all_cusps",
        cusp_form,
        if cusp_form { "positive order at every cusp".into() } else { "some cusp has order <= 0".into() },
    ));

    let bad = stratification_mismatches(case, strat_len)?;
    checks.push(check(
        "stratification_product",
        bad.is_empty(),
        if bad.is_empty() {
            format!("agrees with the eta quotient below q^{strat_len}")
        } else {
            format!("differs at q^{}", bad[0])
        },
    ));

    Ok(CaseReport {
        xiao: case.xiao,
        group_label: case.group_label.clone(),
        eta_quotient: inv.to_string(),
        weight: meta.weight,
        level,
        valuation,
        cusp_orders: orders.iter().map(|o| (o.cusp.to_string(), o.order)).collect(),
        checks,
        expansion: expansion.to_json(),
    })
}

/// Reports for many cases, computed in parallel and returned in input order.
pub fn modularity_reports(cases: &[CaseRecord], order: i64, strat_len: usize) -> Result<Vec<CaseReport>> {
    cases.par_iter().map(|c| modularity_report(c, order, strat_len)).collect()
}
