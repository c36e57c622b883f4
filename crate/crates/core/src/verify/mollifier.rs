use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::delta::TestFunction;
use crate::mc;
use crate::poly::RootPoly;
use crate::{Error, Result};

/// Gaussian mollifier `θ_ε(t) = exp(−t²/2ε²) / (√(2π) ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub eps: f64,
}

impl MollifierSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("mollifier width must be positive, got {eps}")));
        }
        Ok(Self { eps })
    }

    pub fn theta(&self, t: f64) -> f64 {
        let s = t / self.eps;
        (-0.5 * s * s).exp() / ((2.0 * PI).sqrt() * self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifiedEstimate {
    pub eps: f64,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Largest `|A| + |B|` accepted by the mollified oracle.
pub const MAX_MOLLIFIED_DIM: usize = 5;

/// Monte Carlo estimate of `∫dx ∫du ∫dv θ_ε(P_x(u)) θ_ε(Q_x(v)) φ(u, v)`.
///
/// `(u, v)` is drawn from φ (the Gaussian density itself, or uniformly on the
/// box for bumps) and `x` from a Gaussian mixture centred on the sampled
/// `u_α` with widths `ε/|P'_u(u_α)|`, which matches the shape of
/// `θ_ε(P_x(u))` near each root.
pub fn mollified_oracle(
    p: &RootPoly,
    q: &RootPoly,
    phi: &TestFunction,
    spec: MollifierSpec,
    samples: u64,
    seed: u64,
) -> Result<MollifiedEstimate> {
    let (na, nb) = (p.degree(), q.degree());
    if na + nb > MAX_MOLLIFIED_DIM {
        return Err(Error::Unsupported("mollified oracle is limited to |A| + |B| ≤ 5"));
    }
    if phi.dim() != na + nb {
        return Err(Error::DimensionMismatch { expected: na + nb, found: phi.dim() });
    }
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let (a, b) = (p.leading(), q.leading());
    let center = phi.center();
    let stats = mc::estimate(samples, seed, |rng| {
        let mut y = [0.0; MAX_MOLLIFIED_DIM];
        let y = &mut y[..na + nb];
        let scale = match phi {
            TestFunction::Gaussian { width, .. } => {
                for (yi, ci) in y.iter_mut().zip(center) {
                    let s: f64 = StandardNormal.sample(rng);
                    *yi = ci + width * s;
                }
                1.0
            }
            TestFunction::TruncatedGaussian { width, .. } => {
                let h = phi.box_half_width().unwrap();
                let mut inside = true;
                for (yi, ci) in y.iter_mut().zip(center) {
                    let s: f64 = StandardNormal.sample(rng);
                    *yi = ci + width * s;
                    inside &= (width * s).abs() <= h;
                }
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Bump { half_width, .. } => {
                for (yi, ci) in y.iter_mut().zip(center) {
                    *yi = ci + half_width * (2.0 * rng.gen::<f64>() - 1.0);
                }
                phi.eval(y) * (2.0 * half_width).powi((na + nb) as i32)
            }
        };
        let (u, v) = y.split_at(na);
        let mut slopes = [0.0; MAX_MOLLIFIED_DIM];
        let mut total = 0.0;
        for k in 0..na {
            let d: f64 = a * u.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, r)| u[k] - r).product::<f64>();
            slopes[k] = d.abs();
            total += 1.0 / slopes[k];
        }
        let pick = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut k = na - 1;
        for i in 0..na {
            acc += 1.0 / slopes[i];
            if pick < acc {
                k = i;
                break;
            }
        }
        // the draws above are made for every sample so that streams stay aligned
        let z: f64 = StandardNormal.sample(rng);
        if scale == 0.0 {
            return 0.0;
        }
        let x = u[k] + spec.eps / slopes[k] * z;
        let mut g = 0.0;
        for i in 0..na {
            let s = spec.eps / slopes[i];
            let t = (x - u[i]) / s;
            g += (1.0 / slopes[i]) / total * (-0.5 * t * t).exp() / ((2.0 * PI).sqrt() * s);
        }
        if g == 0.0 {
            return 0.0;
        }
        let px = a * u.iter().map(|r| x - r).product::<f64>();
        let qx = b * v.iter().map(|r| x - r).product::<f64>();
        scale * spec.theta(px) * spec.theta(qx) / g
    });
    Ok(MollifiedEstimate { eps: spec.eps, value: stats.mean, std_error: stats.std_error(), samples })
}

/// Runs the oracle for each width (each on its own seed) and returns the
/// estimates together with the Richardson value `(4 I(ε/2) − I(ε))/3` from
/// the last two widths, assuming they halve and the bias is O(ε²).
pub fn mollified_schedule(
    p: &RootPoly,
    q: &RootPoly,
    phi: &TestFunction,
    eps: &[f64],
    samples: u64,
    seed: u64,
) -> Result<(Vec<MollifiedEstimate>, Option<MollifiedEstimate>)> {
    let mut runs = Vec::with_capacity(eps.len());
    for (i, &e) in eps.iter().enumerate() {
        let s = seed.wrapping_add((i as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03));
        runs.push(mollified_oracle(p, q, phi, MollifierSpec::new(e)?, samples, s)?);
    }
    let extrapolated = match runs.as_slice() {
        [.., coarse, fine] => {
            let r = (coarse.eps / fine.eps).powi(2);
            Some(MollifiedEstimate {
                eps: 0.0,
                value: (r * fine.value - coarse.value) / (r - 1.0),
                std_error: (r * r * fine.std_error.powi(2) + coarse.std_error.powi(2)).sqrt() / (r - 1.0),
                samples: coarse.samples + fine.samples,
            })
        }
        _ => None,
    };
    Ok((runs, extrapolated))
}
