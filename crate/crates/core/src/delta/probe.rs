use serde::Serialize;

use super::affine::{AffineFactorization, AffineFunction};
use super::test_fn::{Positivity, TestFunction};

/// How the codimension-2 locus `{f = g = 0}` sits relative to the region
/// where a test function is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Contact {
    /// Empty locus, or it stays a positive distance from the support.
    Apart,
    /// Touches the closure of the positivity region but not its interior,
    /// where the test function vanishes.
    Boundary,
    /// Meets the region where the test function is bounded away from zero.
    Interior,
}

/// Per-pair outcome of the geometric divergence test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Pairs `(i, j)`, `i < j`, forcing an infinite integral.
    pub divergent: Vec<(usize, usize)>,
    /// Pairs whose locus only grazes the support boundary; these are
    /// integrated with a shrinking exclusion window.
    pub touching: Vec<(usize, usize)>,
}

impl ProbeReport {
    pub fn first_divergent(&self) -> Option<(usize, usize)> {
        self.divergent.first().copied()
    }
}

pub fn divergence_probe(fac: &AffineFactorization, phi: &TestFunction) -> ProbeReport {
    let fs = fac.factors();
    let mut report = ProbeReport { divergent: Vec::new(), touching: Vec::new() };
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            match locus_contact(&fs[i], &fs[j], phi) {
                Contact::Interior => report.divergent.push((i, j)),
                Contact::Boundary => report.touching.push((i, j)),
                Contact::Apart => {}
            }
        }
    }
    report
}

/// Contact between `{f = g = 0}` and the positivity region of `phi`.
pub fn locus_contact(f: &AffineFunction, g: &AffineFunction, phi: &TestFunction) -> Contact {
    if f.is_parallel_to(g) {
        return Contact::Apart;
    }
    match phi.positivity() {
        Positivity::Everywhere => Contact::Interior,
        Positivity::OpenBox { center, half } => match zonogon_position(f, g, center, half) {
            Some(true) => Contact::Interior,
            Some(false) => Contact::Boundary,
            None => Contact::Apart,
        },
        Positivity::ClosedBox { center, half } => match zonogon_position(f, g, center, half) {
            Some(_) => Contact::Interior,
            None => Contact::Apart,
        },
    }
}

/// Whether the solution set of `f = g = 0` meets the box `center ± half`.
///
/// The image of the box under `y ↦ (∇f·y, ∇g·y)` is a zonogon; the locus
/// meets the box iff `(−f₀, −g₀)` lies in it. Returns `None` when outside,
/// `Some(true)` when in the interior (the locus crosses the open box) and
/// `Some(false)` when only on the boundary.
fn zonogon_position(f: &AffineFunction, g: &AffineFunction, center: &[f64], half: f64) -> Option<bool> {
    let gens: Vec<(f64, f64)> = f.gradient().iter().zip(g.gradient()).map(|(a, b)| (half * a, half * b)).collect();
    let mc = (
        f.gradient().iter().zip(center).map(|(a, c)| a * c).sum::<f64>(),
        g.gradient().iter().zip(center).map(|(a, c)| a * c).sum::<f64>(),
    );
    let r = (-f.offset() - mc.0, -g.offset() - mc.1);
    let mut interior = true;
    for &(gx, gy) in &gens {
        if gx == 0.0 && gy == 0.0 {
            continue;
        }
        let nu = (-gy, gx);
        let reach: f64 = gens.iter().map(|(hx, hy)| (nu.0 * hx + nu.1 * hy).abs()).sum();
        let dist = (nu.0 * r.0 + nu.1 * r.1).abs();
        let slack = 1e-12 * (reach + (nu.0.abs() + nu.1.abs()) * (r.0.abs() + r.1.abs()));
        if dist > reach + slack {
            return None;
        }
        if dist >= reach - slack {
            interior = false;
        }
    }
    Some(interior)
}
