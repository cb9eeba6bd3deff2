//! Twin-Fock Cauchy-Schwarz ratios on an `(N, 2m)` grid.

use bosent::witnesses::{twin_fock_csi_approx, twin_fock_csi_exact};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub n: usize,
    pub order_2m: usize,
    pub exact: f64,
    /// `exp(epsilon^2 N / 2)` with `epsilon = 2m/N`.
    pub approx: Option<f64>,
    /// `|exact - approx| / exact`
    pub rel_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Table {
    pub rows: Vec<Fig1Row>,
}

pub const CSV_HEADER: &str = "n,order_2m,exact,approx,rel_dev";

/// Rows sorted by `(N, 2m)`. Every `N` must be even and every order `2m`
/// even with `2 <= 2m <= N/2`.
pub fn run_fig1(ns: &[usize], orders: &[usize], include_approx: bool) -> Result<Fig1Table, CliError> {
    if ns.is_empty() || orders.is_empty() {
        return Err(CliError::Input("fig1 needs at least one N and one order".into()));
    }
    let mut ns = ns.to_vec();
    let mut orders = orders.to_vec();
    ns.sort_unstable();
    ns.dedup();
    orders.sort_unstable();
    orders.dedup();
    let mut rows = Vec::new();
    for &n in &ns {
        for &order in &orders {
            if n % 2 != 0 || order % 2 != 0 || order == 0 || 2 * order > n {
                return Err(CliError::Input(format!(
                    "(N, 2m) = ({n}, {order}): N and 2m must be even with 2 <= 2m <= N/2"
                )));
            }
            let m = order / 2;
            let exact = twin_fock_csi_exact(n, m).map_err(|e| CliError::Input(format!("(N, 2m) = ({n}, {order}): {e}")))?;
            let approx = include_approx
                .then(|| twin_fock_csi_approx(n, m))
                .transpose()
                .map_err(|e| CliError::Input(e.to_string()))?;
            rows.push(Fig1Row { n, order_2m: order, exact, approx, rel_dev: approx.map(|a| (exact - a).abs() / exact) });
        }
    }
    Ok(Fig1Table { rows })
}

impl Fig1Table {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        use crate::render::{opt, sig15};
        self.rows
            .iter()
            .map(|r| vec![r.n.to_string(), r.order_2m.to_string(), sig15(r.exact), opt(r.approx), opt(r.rel_dev)])
            .collect()
    }
}
