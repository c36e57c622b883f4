use serde::Serialize;

use super::{localized_grid, mc_histogram, HornConfig, HornGrid};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub ip: usize,
    pub iq: usize,
    pub p_lo: f64,
    pub p_hi: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub localized: f64,
    pub localized_error: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub unflagged: usize,
    pub within_3sigma: usize,
    pub pass_fraction: f64,
    pub flagged_bins: Vec<(usize, usize)>,
    pub mc: HornGrid,
    pub localized: HornGrid,
}

/// `(mc − loc) / √(σ_mc² + σ_loc²)`, zero when both values vanish.
pub fn z_score(mc: f64, mc_err: f64, loc: f64, loc_err: f64) -> f64 {
    let d = mc - loc;
    if d == 0.0 {
        return 0.0;
    }
    d / (mc_err * mc_err + loc_err * loc_err).sqrt()
}

pub fn compare_report(cfg: &HornConfig) -> Result<CompareReport> {
    let mc = mc_histogram(cfg)?;
    let localized = localized_grid(cfg)?;
    Ok(compare_grids(mc, localized))
}

pub(crate) fn compare_grids(mc: HornGrid, localized: HornGrid) -> CompareReport {
    let g = &mc.grid;
    let (pe, qe) = (g.p_edges(), g.q_edges());
    let mut rows = Vec::with_capacity(g.bins * g.bins);
    let mut flagged_bins = Vec::new();
    let (mut unflagged, mut within) = (0, 0);
    for ip in 0..g.bins {
        for iq in 0..g.bins {
            let k = mc.index(ip, iq);
            let flagged = localized.flags[k];
            let z = z_score(mc.values[k], mc.stderr[k], localized.values[k], localized.stderr[k]);
            if flagged {
                flagged_bins.push((ip, iq));
            } else {
                unflagged += 1;
                if z.abs() <= 3.0 {
                    within += 1;
                }
            }
            rows.push(CompareRow {
                ip,
                iq,
                p_lo: pe[ip],
                p_hi: pe[ip + 1],
                q_lo: qe[iq],
                q_hi: qe[iq + 1],
                mc: mc.values[k],
                mc_stderr: mc.stderr[k],
                localized: localized.values[k],
                localized_error: localized.stderr[k],
                z,
                flagged,
            });
        }
    }
    let pass_fraction = if unflagged == 0 { 1.0 } else { within as f64 / unflagged as f64 };
    CompareReport { rows, unflagged, within_3sigma: within, pass_fraction, flagged_bins, mc, localized }
}

impl CompareReport {
    /// CSV with one row per bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p_lo,p_hi,q_lo,q_hi,mc,mc_stderr,localized,localized_error,z,flag\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.p_lo,
                r.p_hi,
                r.q_lo,
                r.q_hi,
                r.mc,
                r.mc_stderr,
                r.localized,
                r.localized_error,
                r.z,
                u8::from(r.flagged)
            ));
        }
        out
    }
}
