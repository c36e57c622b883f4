use std::cell::RefCell;

use super::pointwise::{j_ab, SupportHyperplane};
use super::{admissible, Admissible, VerifyConfig};
use crate::delta::{chart_integral, exclusion_schedule, AffineFunction, Estimate, HyperplaneChart, TestFunction};
use crate::poly::{j_sum, RootPoly};
use crate::quadrature::{integrate_breakpoints, integrate_nested};
use crate::Result;

/// `u_α − v_β` on ℝ^{A∪B}, coordinates ordered `(u, v)`.
pub(crate) fn support_function(h: SupportHyperplane, size_a: usize, size_b: usize) -> AffineFunction {
    let mut g = vec![0.0; size_a + size_b];
    g[h.alpha] = 1.0;
    g[size_a + h.beta] = -1.0;
    AffineFunction::new(g, 0.0).expect("nonzero gradient")
}

fn root_derivative(leading: f64, roots: &[f64], k: usize) -> f64 {
    let x = roots[k];
    leading * roots.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, r)| x - r).product::<f64>()
}

fn localized<W>(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig, weight: W) -> Result<Estimate>
where
    W: Fn(SupportHyperplane, &[f64], &[f64]) -> f64 + Sync,
{
    let Admissible { phi, touching } = admissible(p, q, phi, cfg)?;
    let (na, nb) = (p.degree(), q.degree());
    let icfg = &cfg.integration;
    let mut total = Estimate::exact(0.0);
    for alpha in 0..na {
        for beta in 0..nb {
            let h = SupportHyperplane { alpha, beta };
            let chart = HyperplaneChart::new(&support_function(h, na, nb));
            let w = |y: &[f64]| weight(h, &y[..na], &y[na..]);
            let excluded = &touching[alpha * nb + beta];
            let part = exclusion_schedule(!excluded.is_empty(), icfg.exclusion_radius, icfg.rel_tol, |eta| {
                chart_integral(&chart, &phi, &w, excluded, eta, icfg, (alpha * nb + beta) as u64)
            })?;
            total = total.add(part);
        }
    }
    Ok(total)
}

/// Σ_{α,β} ∫_{Σ_{α,β}} φ / (|P'(u_α)| |Q'(v_β)|) dδ(u_α − v_β).
pub fn lhs_localized(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig) -> Result<Estimate> {
    let (a, b) = (p.leading(), q.leading());
    localized(p, q, phi, cfg, |h, u, v| {
        1.0 / (root_derivative(a, u, h.alpha) * root_derivative(b, v, h.beta)).abs()
    })
}

/// Σ_{α,β} ∫_{Σ_{α,β}} φ |J| / |J_{α,β}| dδ(u_α − v_β), i.e. `∫ φ |J| dδ(R)`.
pub fn rhs_localized(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig) -> Result<Estimate> {
    let (a, b) = (p.leading(), q.leading());
    localized(p, q, phi, cfg, |h, u, v| j_sum(&a, &b, u, v).abs() / j_ab(u, v, h, a, b).abs())
}

/// `∫ dx ⟨δ(P_x) ⊗ δ(Q_x), φ⟩`: adaptive quadrature in `x` of the expanded
/// product of the two root-space measures, each term integrated over the
/// remaining axis-aligned coordinates.
pub fn lhs_direct(p: &RootPoly, q: &RootPoly, phi: &TestFunction, cfg: &VerifyConfig) -> Result<Estimate> {
    let Admissible { phi, .. } = admissible(p, q, phi, cfg)?;
    let (na, nb) = (p.degree(), q.degree());
    let n = na + nb;
    let (a, b) = (p.leading().abs(), q.leading().abs());
    let c = phi.center().to_vec();
    let h = phi.box_half_width().expect("admissible test functions have bounded support");
    let tol = cfg.integration.tolerance();

    let mut marks = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for alpha in 0..na {
        for beta in 0..nb {
            let (ca, cb) = (c[alpha], c[na + beta]);
            let (l, r) = (ca.max(cb) - h, ca.min(cb) + h);
            if r > l {
                lo = lo.min(l);
                hi = hi.max(r);
                marks.extend([l, r, 0.5 * (ca + cb)]);
            }
        }
    }
    if !(hi > lo) {
        return Ok(Estimate::exact(0.0));
    }
    marks.extend(c.iter().copied());
    let mut points: Vec<f64> = marks.into_iter().filter(|t| *t >= lo && *t <= hi).collect();
    points.extend([lo, hi]);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let buf = RefCell::new(vec![0.0; n]);
    let slice = |x: f64, alpha: usize, beta: usize| -> f64 {
        let free: Vec<usize> = (0..n).filter(|&k| k != alpha && k != na + beta).collect();
        let limits = |m: usize, _: &[f64]| {
            let k = free[m];
            let mut pts = vec![c[k] - h, c[k], c[k] + h];
            if x > c[k] - h && x < c[k] + h {
                pts.push(x);
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            pts
        };
        let f = |z: &[f64]| {
            let mut y = buf.borrow_mut();
            y[alpha] = x;
            y[na + beta] = x;
            for (&k, &zk) in free.iter().zip(z) {
                y[k] = zk;
            }
            let value = phi.eval(&y);
            if value == 0.0 {
                return 0.0;
            }
            let mut weight = a * b;
            for k in 0..na {
                if k != alpha {
                    weight *= (x - y[k]).abs();
                }
            }
            for k in 0..nb {
                if k != beta {
                    weight *= (x - y[na + k]).abs();
                }
            }
            value / weight
        };
        integrate_nested(free.len(), &limits, &f, tol).value
    };
    let outer = integrate_breakpoints(
        |x| {
            let mut s = 0.0;
            for alpha in 0..na {
                for beta in 0..nb {
                    s += slice(x, alpha, beta);
                }
            }
            s
        },
        &points,
        tol,
    );
    Ok(Estimate { value: outer.value, error: outer.error })
}
