//! Density of `(p, q)` for `z³ + pz + q = det(z − diag(α) − R diag(β) Rᵀ)`
//! with `R` Haar-distributed in SO(3): Monte Carlo histogram, the
//! resultant-localized formula, and their comparison.
//!
//! Haar measure is parametrized by z-x-z Euler angles with density
//! `1/(2π²) dφ dψ dc` on `[0, π]² × [−1, 1]`, `c = cos θ`. Both `P` and `Q`
//! depend on `φ` (and on `ψ`) only through `cos 2φ` and `sin 2φ`, so the
//! half-range `[0, π]` covers the full circle exactly.

mod compare;
mod histogram;
mod localized;
mod rotation;

use serde::{Deserialize, Serialize};

pub use compare::{compare_report, z_score, CompareReport, CompareRow};
pub use histogram::mc_histogram;
pub use localized::{localized_grid, rho_localized, LocalizedConfig};
pub use rotation::{
    char_poly_pq, conjugate_sum, det3, mat_mul, pq_coefficients_in_c, pq_polynomials_in_c, rotation_from_euler,
    EulerAngles, Mat3,
};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub p_range: [f64; 2],
    pub q_range: [f64; 2],
    pub bins: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::InvalidInput("grid needs at least one bin per axis".into()));
        }
        for (name, r) in [("p", self.p_range), ("q", self.q_range)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[1] > r[0]) {
                return Err(Error::InvalidInput(format!("{name} range must be increasing and finite")));
            }
        }
        Ok(())
    }

    pub fn p_edges(&self) -> Vec<f64> {
        edges(self.p_range, self.bins)
    }

    pub fn q_edges(&self) -> Vec<f64> {
        edges(self.q_range, self.bins)
    }

    pub fn bin_area(&self) -> f64 {
        let n = self.bins as f64;
        (self.p_range[1] - self.p_range[0]) / n * (self.q_range[1] - self.q_range[0]) / n
    }

    /// Bin `(i_p, i_q)` containing the point, if inside the grid.
    pub fn locate(&self, p: f64, q: f64) -> Option<(usize, usize)> {
        let n = self.bins as f64;
        let fp = (p - self.p_range[0]) / (self.p_range[1] - self.p_range[0]) * n;
        let fq = (q - self.q_range[0]) / (self.q_range[1] - self.q_range[0]) * n;
        if !(fp >= 0.0 && fp < n && fq >= 0.0 && fq < n) {
            return None;
        }
        Some(((fp as usize).min(self.bins - 1), (fq as usize).min(self.bins - 1)))
    }
}

fn edges(range: [f64; 2], bins: usize) -> Vec<f64> {
    let w = (range[1] - range[0]) / bins as f64;
    let mut e: Vec<f64> = (0..=bins).map(|k| range[0] + w * k as f64).collect();
    e[bins] = range[1];
    e
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HornConfig {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub samples: u64,
    pub seed: u64,
    /// Defaults to [`default_grid`] with 20 bins per axis.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub localized: LocalizedConfig,
}

impl HornConfig {
    pub fn new(alpha: [f64; 3], beta: [f64; 3], samples: u64, seed: u64) -> Self {
        Self { alpha, beta, samples, seed, grid: None, localized: LocalizedConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("alpha", self.alpha), ("beta", self.beta)] {
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
            if e.iter().sum::<f64>().abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("{name} must sum to zero")));
            }
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        self.localized.validate()
    }

    pub fn grid(&self) -> GridSpec {
        self.grid.clone().unwrap_or_else(|| default_grid(&self.alpha, &self.beta, 20))
    }

    /// The single attainable `(p, q)` when one of the orbits is a point.
    pub fn degenerate_point(&self) -> Option<(f64, f64)> {
        let zero = |e: &[f64; 3]| e.iter().all(|&x| x == 0.0);
        if zero(&self.alpha) || zero(&self.beta) {
            let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            Some(char_poly_pq(&self.alpha, &self.beta, &id))
        } else {
            None
        }
    }
}

fn permutations3() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Range of `p` over the orbit sums.
pub(crate) fn p_extent(alpha: &[f64; 3], beta: &[f64; 3]) -> (f64, f64) {
    let base: f64 = alpha.iter().chain(beta).map(|x| x * x).sum();
    let cross: Vec<f64> =
        permutations3().iter().map(|s| (0..3).map(|i| alpha[i] * beta[s[i]]).sum::<f64>()).collect();
    let max_cross = cross.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_cross = cross.iter().cloned().fold(f64::INFINITY, f64::min);
    (-(base + 2.0 * max_cross) / 2.0, -(base + 2.0 * min_cross) / 2.0)
}

/// Bounding box of the attainable region, padded by 1% (plus a small
/// absolute margin so point-like orbits get a nondegenerate grid).
///
/// `tr C² = Σα² + Σβ² + 2 Σ_{ij} α_i β_j R_ij²` and `(R_ij²)` is doubly
/// stochastic, so `p` ranges between the permutation extremes; `|q|` is
/// bounded by the discriminant curve `27q² = −4p³` at the smallest `p`.
pub fn default_grid(alpha: &[f64; 3], beta: &[f64; 3], bins: usize) -> GridSpec {
    let (p_lo, p_hi) = p_extent(alpha, beta);
    let q_max = 2.0 * (-p_lo / 3.0).max(0.0).powf(1.5);
    let pad_p = 0.01 * (p_hi - p_lo) + 1e-3;
    let pad_q = 0.01 * q_max + 1e-3;
    GridSpec { p_range: [p_lo - pad_p, p_hi + pad_p], q_range: [-q_max - pad_q, q_max + pad_q], bins }
}

/// Per-bin results; arrays are indexed `i_p * bins + i_q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HornGrid {
    pub method: String,
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub flags: Vec<bool>,
    pub samples: u64,
    /// MC samples falling outside the grid.
    pub outside: u64,
    /// MC samples with negative discriminant beyond rounding.
    pub discriminant_violations: u64,
}

impl HornGrid {
    pub fn index(&self, ip: usize, iq: usize) -> usize {
        ip * self.grid.bins + iq
    }

    /// Σ value · area.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.bin_area()
    }

    /// CSV with columns `p_lo,p_hi,q_lo,q_hi,value,stderr,flag`.
    pub fn to_csv(&self) -> String {
        let (pe, qe) = (self.grid.p_edges(), self.grid.q_edges());
        let mut out = String::from("p_lo,p_hi,q_lo,q_hi,value,stderr,flag\n");
        for ip in 0..self.grid.bins {
            for iq in 0..self.grid.bins {
                let k = self.index(ip, iq);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    pe[ip],
                    pe[ip + 1],
                    qe[iq],
                    qe[iq + 1],
                    self.values[k],
                    self.stderr[k],
                    u8::from(self.flags[k])
                ));
            }
        }
        out
    }
}
