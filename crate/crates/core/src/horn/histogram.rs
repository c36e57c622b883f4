use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::rotation::{char_poly_pq, rotation_from_cos};
use super::{HornConfig, HornGrid};
use crate::mc::{substream, CHUNK};
use crate::Result;

struct Tally {
    counts: Vec<u64>,
    outside: u64,
    violations: u64,
}

/// `−4p³ − 27q² ≥ 0` up to rounding relative to the size of the terms.
pub(crate) fn discriminant_ok(p: f64, q: f64) -> bool {
    let (a, b) = (-4.0 * p * p * p, 27.0 * q * q);
    a - b >= -1e-9 * (a.abs() + b.abs() + 1e-300)
}

/// Histogram density of `(p, q)` under Haar-random rotations, sampling
/// `φ, ψ ~ U[0, π]` and `c = cos θ ~ U[−1, 1]`.
///
/// Standard errors are binomial, `√(n (1 − n/N)) / (N · area)`, with `n`
/// floored at 1 so that empty bins carry a nonzero uncertainty.
pub fn mc_histogram(cfg: &HornConfig) -> Result<HornGrid> {
    cfg.validate()?;
    let grid = cfg.grid();
    let cells = grid.bins * grid.bins;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let n = CHUNK.min(cfg.samples - chunk * CHUNK);
            let mut rng = substream(cfg.seed, chunk);
            let mut t = Tally { counts: vec![0; cells], outside: 0, violations: 0 };
            for _ in 0..n {
                let phi = PI * rng.gen::<f64>();
                let psi = PI * rng.gen::<f64>();
                let c = 2.0 * rng.gen::<f64>() - 1.0;
                let s = (1.0 - c * c).max(0.0).sqrt();
                let (p, q) = char_poly_pq(&cfg.alpha, &cfg.beta, &rotation_from_cos(c, s, phi, psi));
                if !discriminant_ok(p, q) {
                    t.violations += 1;
                }
                match grid.locate(p, q) {
                    Some((ip, iq)) => t.counts[ip * grid.bins + iq] += 1,
                    None => t.outside += 1,
                }
            }
            t
        })
        .collect();
    let mut counts = vec![0u64; cells];
    let (mut outside, mut violations) = (0, 0);
    for t in &tallies {
        counts.iter_mut().zip(&t.counts).for_each(|(a, b)| *a += b);
        outside += t.outside;
        violations += t.violations;
    }
    let total = cfg.samples as f64;
    let norm = total * grid.bin_area();
    let values = counts.iter().map(|&n| n as f64 / norm).collect();
    let stderr = counts
        .iter()
        .map(|&n| {
            let n = (n.max(1)) as f64;
            (n * (1.0 - n / total).max(0.0)).sqrt() / norm
        })
        .collect();
    Ok(HornGrid {
        method: "monte_carlo".into(),
        grid,
        values,
        stderr,
        flags: vec![false; cells],
        samples: cfg.samples,
        outside,
        discriminant_violations: violations,
    })
}
