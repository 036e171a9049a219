//! Per-transaction latency and energy reports.

use iiot_energy::radio::{breakdown, LatencyEnergyBreakdown, Term};

use crate::scenario::Config;
use crate::table::{num, Table};

/// `first`, `L_total`, `E_total`, `L_<term>` and `E_<term>` per term, then
/// `P_rr` and `lambda_tot`.
pub fn radio_header(first: &str) -> Vec<String> {
    let mut h = vec![first.to_string(), "L_total".into(), "E_total".into()];
    for term in Term::ALL {
        h.push(format!("L_{term}"));
        h.push(format!("E_{term}"));
    }
    h.extend(["P_rr".into(), "lambda_tot".into()]);
    h
}

pub fn radio_breakdown(
    cfg: &Config,
) -> Result<LatencyEnergyBreakdown, iiot_energy::radio::RadioError> {
    breakdown(&cfg.radio, &cfg.power, &cfg.dlt)
}

pub fn push_radio_row(table: &mut Table, first: String, b: &LatencyEnergyBreakdown) {
    let mut row = vec![
        first,
        num(b.total_latency().value()),
        num(b.total_energy().value()),
    ];
    for p in b.parts() {
        row.push(num(p.latency.value()));
        row.push(num(p.energy.value()));
    }
    row.extend([num(b.p_rr.value()), num(b.lambda_tot)]);
    table.push(row);
}
