//! Both sides of `∫dx δ(P_x) ⊗ δ(Q_x) = |J| δ(R)` evaluated by independent
//! routes: localized on the hyperplanes `u_α = v_β`, directly through the
//! outer `x` integral, through `|J|/|J_{α,β}|`, and by mollified Monte Carlo.
//!
//! Test functions live on ℝ^{A∪B} with coordinates ordered `(u, v)`.

mod mollifier;
mod pointwise;
mod routes;

use serde::{Deserialize, Serialize};

pub use mollifier::{mollified_oracle, mollified_schedule, MollifiedEstimate, MollifierSpec, MAX_MOLLIFIED_DIM};
pub use pointwise::{j_ab, pointwise_ratio_check, SupportHyperplane};
pub use routes::{lhs_direct, lhs_localized, rhs_localized};

use crate::delta::{locus_contact, AffineFunction, Contact, Estimate, IntegrationConfig, TestFunction};
use crate::poly::RootPoly;
use crate::{Error, Result, Singularity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifierRun {
    pub eps: Vec<f64>,
    pub samples: u64,
}

impl Default for MollifierRun {
    fn default() -> Self {
        Self { eps: vec![0.1, 0.05, 0.025], samples: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Relative tolerance for comparing the quadrature routes.
    pub rel_tol: f64,
    /// Gaussians are refused when two same-family centre coordinates are
    /// closer than this.
    pub min_separation: f64,
    /// Gaussians are truncated to the box `centre ± truncation · width`.
    pub truncation: f64,
    /// Allowed relative ε-bias of the mollified estimate, on top of 3σ.
    pub mollifier_bias: f64,
    pub integration: IntegrationConfig,
    pub mollifier: Option<MollifierRun>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            min_separation: 0.5,
            truncation: 8.0,
            mollifier_bias: 0.05,
            integration: IntegrationConfig::default(),
            mollifier: None,
        }
    }
}

pub(crate) struct Admissible {
    pub phi: TestFunction,
    /// Per `(α, β)` (row-major), the same-family differences that only graze
    /// the support on `Σ_{α,β}`.
    pub touching: Vec<Vec<AffineFunction>>,
}

fn difference(dim: usize, i: usize, j: usize) -> AffineFunction {
    let mut g = vec![0.0; dim];
    g[i] = 1.0;
    g[j] = -1.0;
    AffineFunction::new(g, 0.0).expect("distinct indices")
}

/// Checks the configuration and returns the compactly supported test
/// function actually integrated. Gaussians are truncated; then every
/// `Σ_{α,β} ∩ {u_α = u_α'}` (and likewise for `v`) must stay away from the
/// region where the test function is positive.
pub(crate) fn admissible(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig) -> Result<Admissible> {
    let (na, nb) = (p.degree(), q.degree());
    let n = na + nb;
    if phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.dim() });
    }
    cfg.integration.validate()?;
    let phi = match phi {
        TestFunction::Gaussian { center, width } => {
            let c = center;
            for (range, family) in [(0..na, true), (na..n, false)] {
                let idx: Vec<usize> = range.collect();
                for (s, &i) in idx.iter().enumerate() {
                    for &j in &idx[s + 1..] {
                        if (c[i] - c[j]).abs() < cfg.min_separation {
                            let off = if family { 0 } else { na };
                            let (first, second) = (i - off, j - off);
                            return Err(Error::Divergent(if family {
                                Singularity::ARoots { first, second }
                            } else {
                                Singularity::BRoots { first, second }
                            }));
                        }
                    }
                }
            }
            TestFunction::truncated_gaussian(center.clone(), *width, cfg.truncation)?
        }
        other => other.clone(),
    };
    let mut touching = Vec::with_capacity(na * nb);
    for alpha in 0..na {
        for beta in 0..nb {
            let support = routes::support_function(SupportHyperplane { alpha, beta }, na, nb);
            let mut grazing = Vec::new();
            let mut check = |i: usize, j: usize, sing: Singularity| -> Result<()> {
                let d = difference(n, i, j);
                match locus_contact(&support, &d, &phi) {
                    Contact::Interior => Err(Error::Divergent(sing)),
                    Contact::Boundary => {
                        grazing.push(d);
                        Ok(())
                    }
                    Contact::Apart => Ok(()),
                }
            };
            for other in (0..na).filter(|&k| k != alpha) {
                let (first, second) = (alpha.min(other), alpha.max(other));
                check(alpha, other, Singularity::ARoots { first, second })?;
            }
            for other in (0..nb).filter(|&k| k != beta) {
                let (first, second) = (beta.min(other), beta.max(other));
                check(na + beta, na + other, Singularity::BRoots { first, second })?;
            }
            touching.push(grazing);
        }
    }
    Ok(Admissible { phi, touching })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub abs: f64,
    pub rel: f64,
}

impl Discrepancy {
    pub fn between(x: f64, y: f64) -> Self {
        let abs = (x - y).abs();
        let scale = x.abs().max(y.abs());
        Self { abs, rel: if abs == 0.0 { 0.0 } else { abs / scale } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancies {
    pub direct_vs_localized: Discrepancy,
    pub rhs_vs_lhs: Discrepancy,
    pub mollified_vs_lhs: Option<Discrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quadrature_rel: f64,
    pub mollifier_sigmas: f64,
    pub mollifier_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs_localized: Option<Estimate>,
    pub lhs_direct: Option<Estimate>,
    pub rhs_localized: Option<Estimate>,
    pub mollified: Vec<MollifiedEstimate>,
    pub mollified_extrapolated: Option<MollifiedEstimate>,
    pub discrepancies: Option<Discrepancies>,
    pub tolerances: Tolerances,
    pub quadrature_pass: bool,
    pub mollifier_pass: Option<bool>,
    pub pass: bool,
    pub divergence: Option<Singularity>,
}

impl IdentityReport {
    fn tolerances(cfg: &VerifyConfig) -> Tolerances {
        Tolerances { quadrature_rel: cfg.rel_tol, mollifier_sigmas: 3.0, mollifier_bias: cfg.mollifier_bias }
    }

    /// Report for a configuration refused as divergent.
    pub fn divergent(sing: Singularity, cfg: &VerifyConfig) -> Self {
        Self {
            lhs_localized: None,
            lhs_direct: None,
            rhs_localized: None,
            mollified: Vec::new(),
            mollified_extrapolated: None,
            discrepancies: None,
            tolerances: Self::tolerances(cfg),
            quadrature_pass: false,
            mollifier_pass: None,
            pass: false,
            divergence: Some(sing),
        }
    }

    /// Recomputes discrepancies and verdicts from the stored values.
    pub fn recompute(&mut self) {
        let (Some(loc), Some(dir), Some(rhs)) = (self.lhs_localized, self.lhs_direct, self.rhs_localized) else {
            self.discrepancies = None;
            self.quadrature_pass = false;
            self.mollifier_pass = None;
            self.pass = false;
            return;
        };
        let target = self.mollified_extrapolated.or(self.mollified.last().copied());
        let d = Discrepancies {
            direct_vs_localized: Discrepancy::between(dir.value, loc.value),
            rhs_vs_lhs: Discrepancy::between(rhs.value, loc.value),
            mollified_vs_lhs: target.map(|m| Discrepancy::between(m.value, loc.value)),
        };
        let tol = &self.tolerances;
        self.quadrature_pass = d.direct_vs_localized.rel <= tol.quadrature_rel && d.rhs_vs_lhs.rel <= tol.quadrature_rel;
        self.mollifier_pass = target.map(|m| {
            (m.value - loc.value).abs() <= tol.mollifier_sigmas * m.std_error + tol.mollifier_bias * loc.value.abs()
        });
        self.pass = self.divergence.is_none() && self.quadrature_pass && self.mollifier_pass.unwrap_or(true);
        self.discrepancies = Some(d);
    }
}

/// Runs every route and assembles the report. Divergent configurations are
/// returned as `Err(Divergent)`; see [`IdentityReport::divergent`].
pub fn verify_identity(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig) -> Result<IdentityReport> {
    let loc = lhs_localized(p, q, phi, cfg)?;
    let dir = lhs_direct(p, q, phi, cfg)?;
    let rhs = rhs_localized(p, q, phi, cfg)?;
    let (mollified, extrapolated) = match &cfg.mollifier {
        Some(run) => mollified_schedule(p, q, phi, &run.eps, run.samples, cfg.integration.seed)?,
        None => (Vec::new(), None),
    };
    let mut report = IdentityReport {
        lhs_localized: Some(loc),
        lhs_direct: Some(dir),
        rhs_localized: Some(rhs),
        mollified,
        mollified_extrapolated: extrapolated,
        discrepancies: None,
        tolerances: IdentityReport::tolerances(cfg),
        quadrature_pass: false,
        mollifier_pass: None,
        pass: false,
        divergence: None,
    };
    report.recompute();
    Ok(report)
}
