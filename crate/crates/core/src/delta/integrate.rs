use std::cell::RefCell;
use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::affine::{dot, AffineFactorization, AffineFunction, HyperplaneChart};
use super::probe::{divergence_probe, locus_contact, Contact};
use super::test_fn::TestFunction;
use crate::mc;
use crate::poly::RootPoly;
use crate::quadrature::{integrate_nested, Tolerance};
use crate::{Error, Result, Singularity};

/// Half-width, in Gaussian widths, of the window used for untruncated Gaussians.
pub const GAUSS_WINDOW: f64 = 9.0;

/// Largest hyperplane dimension integrated by nested quadrature under `Method::Auto`.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Trend ratio above which the exclusion schedule is declared divergent.
const DIVERGENT_RATIO: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form where available, quadrature up to `MAX_QUADRATURE_DIM`,
    /// Monte Carlo beyond.
    #[default]
    Auto,
    Exact,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationConfig {
    pub method: Method,
    pub samples: u64,
    /// Initial exclusion radius η around singular sets that only graze the
    /// support; the schedule continues with η/2 and η/4.
    pub exclusion_radius: f64,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            samples: 1_000_000,
            exclusion_radius: 1e-3,
            seed: 0,
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_intervals: 200,
        }
    }
}

impl IntegrationConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1".into()));
        }
        if !(self.exclusion_radius > 0.0 && self.exclusion_radius.is_finite()) {
            return Err(Error::InvalidInput("exclusion radius must be positive".into()));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_intervals == 0 {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.abs_tol, self.rel_tol).with_max_intervals(self.max_intervals)
    }
}

/// A value with an absolute error estimate (quadrature estimate or one
/// Monte Carlo standard error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn add(self, other: Self) -> Self {
        Self { value: self.value + other.value, error: self.error + other.error }
    }

    pub fn scale(self, c: f64) -> Self {
        Self { value: self.value * c, error: self.error * c.abs() }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `density · ∫ φ(y(z)) w(y(z)) dz` over the hyperplane of `chart`, with
/// points closer than `eta` to any set in `excluded` dropped.
pub(crate) fn chart_integral<W>(
    chart: &HyperplaneChart,
    phi: &TestFunction,
    weight: &W,
    excluded: &[AffineFunction],
    eta: f64,
    cfg: &IntegrationConfig,
    stream: u64,
) -> Result<Estimate>
where
    W: Fn(&[f64]) -> f64 + Sync,
{
    let d = chart.dim();
    let keep = |y: &[f64]| excluded.iter().all(|e| e.distance(y) >= eta);
    let integrand = |y: &[f64]| {
        if !keep(y) {
            return 0.0;
        }
        let p = phi.eval(y);
        if p == 0.0 {
            0.0
        } else {
            p * weight(y)
        }
    };
    if d == 0 {
        return Ok(Estimate::exact(chart.density() * integrand(chart.point())));
    }
    let monte_carlo = match cfg.method {
        Method::MonteCarlo => true,
        Method::Quadrature => false,
        Method::Auto | Method::Exact => d > MAX_QUADRATURE_DIM,
    };
    let est = if monte_carlo {
        chart_monte_carlo(chart, phi, &integrand, cfg, stream)
    } else {
        chart_quadrature(chart, phi, &integrand, excluded, eta, cfg)
    };
    Ok(est.scale(chart.density()))
}

fn chart_quadrature<F>(
    chart: &HyperplaneChart,
    phi: &TestFunction,
    integrand: &F,
    excluded: &[AffineFunction],
    eta: f64,
    cfg: &IntegrationConfig,
) -> Estimate
where
    F: Fn(&[f64]) -> f64,
{
    let d = chart.dim();
    let n = d + 1;
    let c = phi.center();
    let zc = chart.project(c);
    let half = phi.box_half_width();
    let window = phi.width().map(|w| GAUSS_WINDOW * w);
    let ranges: Vec<(f64, f64)> = (0..d)
        .map(|m| match half {
            Some(h) => {
                let ext = h * chart.basis()[m].iter().map(|b| b.abs()).sum::<f64>();
                (zc[m] - ext, zc[m] + ext)
            }
            None => (zc[m] - window.unwrap(), zc[m] + window.unwrap()),
        })
        .collect();
    let limits = |m: usize, prefix: &[f64]| -> Vec<f64> {
        let (mut lo, mut hi) = ranges[m];
        let b = &chart.basis()[m];
        let mut marks = vec![zc[m]];
        if m + 1 == d {
            let mut base = chart.point().to_vec();
            for (zk, bk) in prefix.iter().zip(chart.basis()) {
                base.iter_mut().zip(bk).for_each(|(y, v)| *y += zk * v);
            }
            let peak: f64 = b.iter().zip(c.iter().zip(&base)).map(|(bi, (ci, yi))| bi * (ci - yi)).sum();
            marks[0] = peak;
            match half {
                Some(h) => {
                    for i in 0..n {
                        if b[i].abs() > 1e-14 {
                            let t1 = (c[i] - h - base[i]) / b[i];
                            let t2 = (c[i] + h - base[i]) / b[i];
                            lo = lo.max(t1.min(t2));
                            hi = hi.min(t1.max(t2));
                        } else if (base[i] - c[i]).abs() > h {
                            return Vec::new();
                        }
                    }
                }
                None => {
                    lo = peak - window.unwrap();
                    hi = peak + window.unwrap();
                }
            }
            for e in excluded {
                let slope = dot(e.gradient(), b);
                if slope.abs() > 1e-14 * e.gradient_norm() {
                    let e0 = e.eval(&base);
                    let r = eta * e.gradient_norm();
                    marks.push((-e0 - r) / slope);
                    marks.push((-e0 + r) / slope);
                    marks.push(-e0 / slope);
                }
            }
        }
        if !(hi > lo) {
            return Vec::new();
        }
        let mut pts = vec![lo, hi];
        pts.extend(marks.into_iter().filter(|t| *t > lo && *t < hi));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    };
    let buf = RefCell::new(vec![0.0; n]);
    let f = |z: &[f64]| {
        let mut y = buf.borrow_mut();
        chart.embed_into(z, &mut y);
        integrand(&y)
    };
    let r = integrate_nested(d, &limits, &f, cfg.tolerance());
    Estimate { value: r.value, error: r.error }
}

fn chart_monte_carlo<F>(
    chart: &HyperplaneChart,
    phi: &TestFunction,
    integrand: &F,
    cfg: &IntegrationConfig,
    stream: u64,
) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = chart.dim();
    let zc = chart.project(phi.center());
    let seed = cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let stats = match phi.width() {
        Some(w) => {
            let norm = (2.0 * PI * w * w).powf(0.5 * d as f64);
            mc::estimate(cfg.samples, seed, |rng| {
                let mut z = zc.clone();
                let mut r2 = 0.0;
                for zk in z.iter_mut() {
                    let s: f64 = StandardNormal.sample(rng);
                    *zk += w * s;
                    r2 += s * s;
                }
                let q = (-0.5 * r2).exp() / norm;
                integrand(&chart.embed(&z)) / q
            })
        }
        None => {
            let h = phi.box_half_width().unwrap();
            let exts: Vec<f64> =
                (0..d).map(|m| h * chart.basis()[m].iter().map(|b| b.abs()).sum::<f64>()).collect();
            let volume: f64 = exts.iter().map(|e| 2.0 * e).product();
            mc::estimate(cfg.samples, seed, |rng| {
                let z: Vec<f64> = zc
                    .iter()
                    .zip(&exts)
                    .map(|(c, e)| c + e * (2.0 * rand::Rng::gen::<f64>(rng) - 1.0))
                    .collect();
                integrand(&chart.embed(&z)) * volume
            })
        }
    };
    Estimate { value: stats.mean, error: stats.std_error() }
}

/// Runs `run(η)` for η, η/2, η/4 and extrapolates; a non-decaying sequence
/// of increments means the excluded singular set carries infinite mass.
pub(crate) fn exclusion_schedule<F>(needed: bool, eta: f64, rel_tol: f64, run: F) -> Result<Estimate>
where
    F: Fn(f64) -> Result<Estimate>,
{
    if !needed {
        return run(0.0);
    }
    let i0 = run(eta)?;
    let i1 = run(eta / 2.0)?;
    let i2 = run(eta / 4.0)?;
    let (d1, d2) = (i1.value - i0.value, i2.value - i1.value);
    let noise = i0.error + i1.error + i2.error + rel_tol * i2.value.abs();
    if d2.abs() <= noise.max(1e-14 * i2.value.abs()) {
        return Ok(Estimate { value: i2.value, error: d2.abs() + noise });
    }
    let ratio = d2 / d1;
    if d1 != 0.0 && ratio > DIVERGENT_RATIO {
        return Err(Error::Divergent(Singularity::Trend));
    }
    if ratio > 0.0 {
        let tail = d2 * ratio / (1.0 - ratio);
        Ok(Estimate { value: i2.value + tail, error: tail.abs() + noise })
    } else {
        Ok(Estimate { value: i2.value, error: d2.abs() + noise })
    }
}

fn gaussian_closed_form(f: &AffineFunction, center: &[f64], width: f64) -> f64 {
    let g = f.gradient_norm();
    let s = f.eval(center) / (g * width);
    (-0.5 * s * s).exp() / ((2.0 * PI).sqrt() * width * g)
}

/// `Σ_j ∫_{f_j = 0} φ / (∏_{i≠j} |f_i| · ∏_e |e|) dδ(f_j)` for the factors
/// `f` and extra weights `e`. Divergence must be ruled out by the caller.
fn weighted_sum(
    factors: &[AffineFunction],
    extra: &[AffineFunction],
    phi: &TestFunction,
    cfg: &IntegrationConfig,
    stream: u64,
) -> Result<Estimate> {
    let mut total = Estimate::exact(0.0);
    for (j, fj) in factors.iter().enumerate() {
        let others: Vec<AffineFunction> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, f)| f.clone())
            .chain(extra.iter().cloned())
            .collect();
        let all_parallel = others.iter().all(|o| o.is_parallel_to(fj));
        let chart = HyperplaneChart::new(fj);
        let closed = match (phi, cfg.method) {
            (TestFunction::Gaussian { center, width }, Method::Auto | Method::Exact) if all_parallel => {
                let y = chart.point();
                let w: f64 = others.iter().map(|o| 1.0 / o.eval(y).abs()).product();
                Some(gaussian_closed_form(fj, center, *width) * w)
            }
            _ => None,
        };
        let part = match closed {
            Some(v) => Estimate::exact(v),
            None if cfg.method == Method::Exact => {
                return Err(Error::Unsupported("closed form needs a Gaussian and parallel factors"));
            }
            None => {
                let touching: Vec<AffineFunction> = others
                    .iter()
                    .filter(|o| locus_contact(fj, o, phi) == Contact::Boundary)
                    .cloned()
                    .collect();
                let weight = |y: &[f64]| others.iter().map(|o| 1.0 / o.eval(y).abs()).product::<f64>();
                exclusion_schedule(!touching.is_empty(), cfg.exclusion_radius, cfg.rel_tol, |eta| {
                    chart_integral(&chart, phi, &weight, &touching, eta, cfg, stream + j as u64)
                })?
            }
        };
        total = total.add(part);
    }
    Ok(total)
}

/// `∫ φ dδ(f)` for one affine function.
pub fn delta_affine_integrate(f: &AffineFunction, phi: &TestFunction, cfg: &IntegrationConfig) -> Result<Estimate> {
    check_dim(f.dim(), phi.dim())?;
    cfg.validate()?;
    weighted_sum(std::slice::from_ref(f), &[], phi, cfg, 0)
}

/// Like [`delta_affine_integrate`] but on an explicitly given chart, which
/// must belong to `f`; always uses quadrature or Monte Carlo.
pub fn delta_affine_integrate_on_chart(
    f: &AffineFunction,
    chart: &HyperplaneChart,
    phi: &TestFunction,
    cfg: &IntegrationConfig,
) -> Result<Estimate> {
    check_dim(f.dim(), phi.dim())?;
    cfg.validate()?;
    chart_integral(chart, phi, &|_: &[f64]| 1.0, &[], 0.0, cfg, 0)
}

/// `∫ φ dδ(f₁⋯f_k)`, or `Divergent` naming the first pair whose crossing
/// meets the region where φ is bounded away from zero.
pub fn delta_product_integrate(
    fac: &AffineFactorization,
    phi: &TestFunction,
    cfg: &IntegrationConfig,
) -> Result<Estimate> {
    check_dim(fac.dim(), phi.dim())?;
    cfg.validate()?;
    if let Some((first, second)) = divergence_probe(fac, phi).first_divergent() {
        return Err(Error::Divergent(Singularity::Factors { first, second }));
    }
    weighted_sum(fac.factors(), &[], phi, cfg, 0)
}

/// Both sides of `δ(fg) = δ(g)/|f| + δ(f)/|g|` integrated against φ. The
/// right side is assembled from the two weighted integrals separately.
pub fn product_rule_check(
    f: &AffineFactorization,
    g: &AffineFactorization,
    phi: &TestFunction,
    cfg: &IntegrationConfig,
) -> Result<(Estimate, Estimate)> {
    let whole = f.concat(g)?;
    let lhs = delta_product_integrate(&whole, phi, cfg)?;
    let rhs_g = weighted_sum(g.factors(), f.factors(), phi, cfg, 1 << 20)?;
    let rhs_f = weighted_sum(f.factors(), g.factors(), phi, cfg, 2 << 20)?;
    Ok((lhs, rhs_g.add(rhs_f)))
}

/// `∫ φ dδ(P)` on the line: `Σ_k φ(r_k) / |P'(r_k)|`.
pub fn delta_1d_integrate<F: Fn(f64) -> f64>(p: &RootPoly, phi: F) -> Result<f64> {
    p.check_distinct()?;
    let mut order: Vec<usize> = (0..p.degree()).collect();
    order.sort_by(|&i, &j| p.roots()[i].total_cmp(&p.roots()[j]));
    let mut sum = 0.0;
    for k in order {
        sum += phi(p.roots()[k]) / p.derivative_at_root(k)?.abs();
    }
    Ok(sum)
}

/// `∫ φ(u) dδ(P_x(u))` over root space ℝ^A, where `P_x(u) = a∏(x − u_α)`.
/// Only the leading coefficient and degree of `p` are used.
pub fn delta_px_integrate(p: &RootPoly, x: f64, phi: &TestFunction, cfg: &IntegrationConfig) -> Result<Estimate> {
    let n = p.degree();
    check_dim(n, phi.dim())?;
    cfg.validate()?;
    let a = p.leading().abs();
    let c = phi.center();
    let mut total = Estimate::exact(0.0);
    for alpha in 0..n {
        let others: Vec<usize> = (0..n).filter(|&k| k != alpha).collect();
        let mut touching = Vec::new();
        for &k in &others {
            let (first, second) = (alpha.min(k), alpha.max(k));
            let diverges = Err(Error::Divergent(Singularity::ARoots { first, second }));
            match phi {
                TestFunction::Gaussian { .. } => return diverges,
                TestFunction::Bump { half_width: h, .. } => {
                    let (da, dk) = ((x - c[alpha]).abs(), (x - c[k]).abs());
                    if da < *h && dk < *h {
                        return diverges;
                    }
                    if da <= *h && dk <= *h {
                        touching.push(k);
                    }
                }
                TestFunction::TruncatedGaussian { .. } => {
                    let h = phi.box_half_width().unwrap();
                    if (x - c[alpha]).abs() <= h && (x - c[k]).abs() <= h {
                        return diverges;
                    }
                }
            }
        }
        let part = exclusion_schedule(!touching.is_empty(), cfg.exclusion_radius, cfg.rel_tol, |eta| {
            px_slice(alpha, &others, &touching, eta, x, phi, cfg)
        })?;
        total = total.add(part.scale(1.0 / a));
    }
    Ok(total)
}

fn px_slice(
    alpha: usize,
    others: &[usize],
    touching: &[usize],
    eta: f64,
    x: f64,
    phi: &TestFunction,
    cfg: &IntegrationConfig,
) -> Result<Estimate> {
    let n = others.len() + 1;
    let c = phi.center();
    let buf = RefCell::new(vec![0.0; n]);
    let f = |z: &[f64]| {
        let mut u = buf.borrow_mut();
        u[alpha] = x;
        let mut w = 1.0;
        for (&k, &zk) in others.iter().zip(z) {
            u[k] = zk;
            if touching.contains(&k) && (zk - x).abs() < eta {
                return 0.0;
            }
            w /= (x - zk).abs();
        }
        phi.eval(&u) * w
    };
    if others.is_empty() {
        return Ok(Estimate::exact(f(&[])));
    }
    let h = phi.box_half_width().expect("untruncated Gaussians diverge for |A| ≥ 2");
    let monte_carlo = match cfg.method {
        Method::MonteCarlo => true,
        Method::Quadrature => false,
        Method::Auto | Method::Exact => others.len() > MAX_QUADRATURE_DIM,
    };
    if monte_carlo {
        let volume = (2.0 * h).powi(others.len() as i32);
        let stats = mc::estimate(cfg.samples, cfg.seed ^ alpha as u64, |rng| {
            let z: Vec<f64> =
                others.iter().map(|&k| c[k] + h * (2.0 * rand::Rng::gen::<f64>(rng) - 1.0)).collect();
            let mut u = vec![x; n];
            let mut w = volume;
            for (&k, &zk) in others.iter().zip(&z) {
                u[k] = zk;
                if touching.contains(&k) && (zk - x).abs() < eta {
                    return 0.0;
                }
                w /= (x - zk).abs();
            }
            phi.eval(&u) * w
        });
        return Ok(Estimate { value: stats.mean, error: stats.std_error() });
    }
    let limits = |m: usize, _: &[f64]| {
        let k = others[m];
        let (lo, hi) = (c[k] - h, c[k] + h);
        let mut pts = vec![lo, c[k], hi];
        for t in [x - eta, x, x + eta] {
            if t > lo && t < hi {
                pts.push(t);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    };
    let r = integrate_nested(others.len(), &limits, &f, cfg.tolerance());
    Ok(Estimate { value: r.value, error: r.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::affine::validate_factorization;
    use crate::quadrature::integrate_breakpoints;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    fn parallel_pair() -> AffineFactorization {
        validate_factorization(vec![(vec![1.0, 0.0], 0.0), (vec![1.0, 0.0], -1.0)]).unwrap()
    }

    #[test]
    fn affine_gaussian_examples() {
        let cfg = IntegrationConfig::default();
        let phi = TestFunction::standard_gaussian(2);
        let f = AffineFunction::coordinate(2, 0, 0.0);
        let v = delta_affine_integrate(&f, &phi, &cfg).unwrap().value;
        assert!((v - INV_SQRT_2PI).abs() < 1e-15);
        let v2 = delta_affine_integrate(&f.scaled(2.0).unwrap(), &phi, &cfg).unwrap().value;
        assert!((v2 - INV_SQRT_2PI / 2.0).abs() < 1e-15);
        let q = delta_affine_integrate(&f, &phi, &cfg.clone().with_method(Method::Quadrature)).unwrap();
        assert!((q.value - INV_SQRT_2PI).abs() < 1e-12);
    }

    #[test]
    fn bump_missing_hyperplane_is_zero() {
        let f = AffineFunction::coordinate(2, 0, -5.0);
        let phi = TestFunction::bump(vec![0.0, 0.0], 1.0).unwrap();
        let v = delta_affine_integrate(&f, &phi, &IntegrationConfig::default()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn bump_line_integral() {
        // ∫ (1 − t²)² dt over (−1, 1) times the transverse profile at 0
        let f = AffineFunction::coordinate(2, 0, 0.0);
        let phi = TestFunction::bump(vec![0.5, 0.0], 1.0).unwrap();
        let v = delta_affine_integrate(&f, &phi, &IntegrationConfig::default()).unwrap();
        let expected = 16.0 / 15.0 * (1.0f64 - 0.25).powi(2);
        assert!((v.value - expected).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn product_examples() {
        let cfg = IntegrationConfig::default();
        let phi = TestFunction::standard_gaussian(2);
        let v = delta_product_integrate(&parallel_pair(), &phi, &cfg).unwrap().value;
        let expected = (1.0 + (-0.5f64).exp()) * INV_SQRT_2PI;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.640_913).abs() < 1e-6);
        let q = delta_product_integrate(&parallel_pair(), &phi, &cfg.clone().with_method(Method::Quadrature));
        assert!((q.unwrap().value - expected).abs() < 1e-11);

        let axes = validate_factorization(vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)]).unwrap();
        assert_eq!(
            delta_product_integrate(&axes, &phi, &cfg),
            Err(Error::Divergent(Singularity::Factors { first: 0, second: 1 }))
        );
        let far = TestFunction::bump(vec![3.0, 3.0], 1.0).unwrap();
        assert_eq!(delta_product_integrate(&axes, &far, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn finite_weight_near_crossing() {
        // bump in y1 > 0 straddling y2 = 0: only {y2 = 0} meets the support
        let axes = validate_factorization(vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)]).unwrap();
        let phi = TestFunction::bump(vec![2.0, 0.0], 1.0).unwrap();
        let v = delta_product_integrate(&axes, &phi, &IntegrationConfig::default()).unwrap();
        let oracle = integrate_breakpoints(
            |t: f64| phi.eval(&[t, 0.0]) / t.abs(),
            &[1.0, 2.0, 3.0],
            Tolerance::new(0.0, 1e-12),
        );
        assert!((v.value - oracle.value).abs() < 1e-10 * oracle.value);
    }

    #[test]
    fn grazing_corner_uses_schedule() {
        // the crossing sits on the corner of the bump's support
        let axes = validate_factorization(vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)]).unwrap();
        let phi = TestFunction::bump(vec![1.0, 1.0], 1.0).unwrap();
        let v = delta_product_integrate(&axes, &phi, &IntegrationConfig::default()).unwrap();
        assert!(v.value.abs() < 1e-12);
        let phi = TestFunction::bump(vec![1.0, 0.5], 1.0).unwrap();
        // the crossing is on an edge: φ(0, ·) ≡ 0, and on y2 = 0 the bump
        // vanishes quadratically at y1 = 0, so 1/|y1| stays integrable
        let v = delta_product_integrate(&axes, &phi, &IntegrationConfig::default()).unwrap();
        let oracle = integrate_breakpoints(
            |t: f64| phi.eval(&[t, 0.0]) / t.abs(),
            &[0.0, 1.0, 2.0],
            Tolerance::new(0.0, 1e-12).with_max_intervals(1000),
        );
        assert!((v.value - oracle.value).abs() < 1e-6 * oracle.value, "{} vs {}", v.value, oracle.value);
    }

    #[test]
    fn one_dimensional_sums() {
        let p = RootPoly::a_family(1.0, vec![1.0, -1.0]).unwrap();
        assert!((delta_1d_integrate(&p, |x| x * x).unwrap() - 1.0).abs() < 1e-15);
        let g = TestFunction::standard_gaussian(1);
        let p0 = RootPoly::a_family(1.0, vec![0.0]).unwrap();
        assert!((delta_1d_integrate(&p0, |x| g.eval(&[x])).unwrap() - INV_SQRT_2PI).abs() < 1e-16);
        let p3 = RootPoly::a_family(3.0, vec![0.0]).unwrap();
        assert!((delta_1d_integrate(&p3, |x| g.eval(&[x])).unwrap() - INV_SQRT_2PI / 3.0).abs() < 1e-16);
        let rep = RootPoly::a_family(1.0, vec![2.0, 2.0]).unwrap();
        assert!(matches!(delta_1d_integrate(&rep, |x| x), Err(Error::RepeatedRoot { .. })));
    }

    #[test]
    fn px_examples() {
        let cfg = IntegrationConfig::default();
        let g = TestFunction::gaussian(vec![0.3], 1.0).unwrap();
        let p1 = RootPoly::a_family(1.0, vec![0.0]).unwrap();
        assert!((delta_px_integrate(&p1, 0.7, &g, &cfg).unwrap().value - g.eval(&[0.7])).abs() < 1e-16);
        let p2 = RootPoly::a_family(2.0, vec![0.0]).unwrap();
        assert!((delta_px_integrate(&p2, 0.7, &g, &cfg).unwrap().value - g.eval(&[0.7]) / 2.0).abs() < 1e-16);

        let bump = TestFunction::bump(vec![0.0, 3.0], 1.0).unwrap();
        let pa = RootPoly::a_family(1.0, vec![5.0, 6.0]).unwrap();
        let v = delta_px_integrate(&pa, 0.0, &bump, &cfg).unwrap().value;
        let oracle =
            integrate_breakpoints(|t: f64| bump.eval(&[0.0, t]) / t.abs(), &[2.0, 3.0, 4.0], Tolerance::new(0.0, 1e-13));
        assert!((v - oracle.value).abs() < 1e-11 * oracle.value);

        let g2 = TestFunction::standard_gaussian(2);
        assert!(matches!(delta_px_integrate(&pa, 0.0, &g2, &cfg), Err(Error::Divergent(_))));
    }

    #[test]
    fn product_rule_examples() {
        let cfg = IntegrationConfig::default();
        let f = validate_factorization(vec![(vec![1.0, 0.0], 0.0)]).unwrap();
        let g = validate_factorization(vec![(vec![1.0, 0.0], -1.0)]).unwrap();
        let (l, r) = product_rule_check(&f, &g, &TestFunction::standard_gaussian(2), &cfg).unwrap();
        assert!((l.value - 0.640_913).abs() < 1e-6 && (l.value - r.value).abs() < 1e-15);
        let g2 = validate_factorization(vec![(vec![0.0, 1.0], 0.0)]).unwrap();
        let far = TestFunction::bump(vec![3.0, 3.0], 1.0).unwrap();
        let (l, r) = product_rule_check(&f, &g2, &far, &cfg).unwrap();
        assert_eq!((l.value, r.value), (0.0, 0.0));
    }

    #[test]
    fn monte_carlo_route() {
        let cfg = IntegrationConfig { samples: 200_000, seed: 3, ..Default::default() }.with_method(Method::MonteCarlo);
        let f = AffineFunction::new(vec![1.0, 1.0, 0.0, -1.0, 2.0], 0.5).unwrap();
        let phi = TestFunction::gaussian(vec![0.1, 0.0, -0.2, 0.3, 0.0], 0.7).unwrap();
        let exact = delta_affine_integrate(&f, &phi, &IntegrationConfig::default()).unwrap().value;
        let mc = delta_affine_integrate(&f, &phi, &cfg).unwrap();
        // the importance density matches the Gaussian exactly, so the estimate is exact
        assert!((mc.value - exact).abs() < 1e-12 * exact);
        let bump = TestFunction::bump(vec![0.0; 5], 1.0).unwrap();
        let q = delta_affine_integrate(&f, &bump, &IntegrationConfig::default()).unwrap();
        let m = delta_affine_integrate(&f, &bump, &cfg).unwrap();
        assert!((q.value - m.value).abs() < 4.0 * m.error, "{} vs {} ± {}", q.value, m.value, m.error);
    }
}
