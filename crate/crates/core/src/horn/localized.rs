use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histogram::discriminant_ok;
use super::rotation::pq_coefficients_in_c;
use super::{default_grid, p_extent, HornConfig, HornGrid};
use crate::delta::Estimate;
use crate::poly::j_degree2_coeffs;
use crate::quadrature::{gauss_legendre, integrate_breakpoints, QuadResult, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizedConfig {
    /// Uniform φ samples per ψ for the sign-change scan.
    pub scan_points: usize,
    pub bisection_tol: f64,
    /// A zero with `|∂R/∂φ| < threshold · max|R|` is reported as tangential.
    pub divergence_threshold: f64,
    /// Uniform ψ samples used to locate changes in the number of admissible
    /// zeros, which become quadrature breakpoints.
    pub psi_scan_points: usize,
    pub psi_rel_tol: f64,
    pub psi_max_intervals: usize,
    /// Gauss–Legendre nodes per axis and segment for bin averages; the error
    /// estimate compares against a rule with two more nodes.
    pub bin_nodes: usize,
}

impl Default for LocalizedConfig {
    fn default() -> Self {
        Self {
            scan_points: 512,
            bisection_tol: 1e-12,
            divergence_threshold: 1e-6,
            psi_scan_points: 48,
            psi_rel_tol: 1e-4,
            psi_max_intervals: 400,
            bin_nodes: 4,
        }
    }
}

impl LocalizedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scan_points < 8 || self.psi_scan_points < 2 || self.bin_nodes == 0 || self.psi_max_intervals == 0 {
            return Err(Error::InvalidInput("localized settings out of range".into()));
        }
        let positive = [self.bisection_tol, self.divergence_threshold, self.psi_rel_tol];
        if !positive.iter().all(|t| *t > 0.0) {
            return Err(Error::InvalidInput("localized tolerances must be positive".into()));
        }
        Ok(())
    }
}

type Coeffs = [f64; 6];

/// `P` and `Q` coefficients as trigonometric polynomials `k₀ + k_c cos 2φ +
/// k_s sin 2φ` at fixed ψ, fitted from three φ values and certified at a
/// fourth.
struct PhaseTable {
    k0: Coeffs,
    kc: Coeffs,
    ks: Coeffs,
}

impl PhaseTable {
    fn new(alpha: &[f64; 3], beta: &[f64; 3], psi: f64) -> Result<Self> {
        let at = |phi: f64| -> Result<Coeffs> {
            let (p, q) = pq_coefficients_in_c(alpha, beta, phi, psi)?;
            Ok([p[0], p[1], p[2], q[0], q[1], q[2]])
        };
        let (f0, f1, f2) = (at(0.0)?, at(PI / 3.0)?, at(2.0 * PI / 3.0)?);
        let check = at(PI / 4.0)?;
        let mut t = Self { k0: [0.0; 6], kc: [0.0; 6], ks: [0.0; 6] };
        let mut residual: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..6 {
            t.k0[i] = (f0[i] + f1[i] + f2[i]) / 3.0;
            t.kc[i] = (2.0 * f0[i] - f1[i] - f2[i]) / 3.0;
            t.ks[i] = (f1[i] - f2[i]) / 3f64.sqrt();
            residual = residual.max((t.k0[i] + t.ks[i] - check[i]).abs());
            scale = scale.max(f0[i].abs()).max(f1[i].abs()).max(f2[i].abs());
        }
        if residual > 1e-9 * scale {
            return Err(Error::DegreeCertificateFailure { residual: residual / scale });
        }
        Ok(t)
    }

    fn coeffs(&self, phi: f64) -> Coeffs {
        let (s, c) = (2.0 * phi).sin_cos();
        self.coeffs_cs(c, s)
    }

    fn coeffs_cs(&self, c: f64, s: f64) -> Coeffs {
        let mut k = [0.0; 6];
        for i in 0..6 {
            k[i] = self.k0[i] + self.kc[i] * c + self.ks[i] * s;
        }
        k
    }
}

/// Resultant of two formal quadratics (ascending coefficients); equals the
/// 4×4 Sylvester determinant.
pub(crate) fn quadratic_resultant(p: &[f64], q: &[f64]) -> f64 {
    let (p0, p1, p2) = (p[0], p[1], p[2]);
    let (q0, q1, q2) = (q[0], q[1], q[2]);
    let a = p2 * q0 - p0 * q2;
    a * a - (p2 * q1 - p1 * q2) * (p1 * q0 - p0 * q1)
}

struct Slice<'a> {
    table: &'a PhaseTable,
    p: f64,
    q: f64,
}

impl Slice<'_> {
    fn shifted(&self, phi: f64) -> ([f64; 3], [f64; 3]) {
        let k = self.table.coeffs(phi);
        ([k[0] - self.p, k[1], k[2]], [k[3] - self.q, k[4], k[5]])
    }

    fn r(&self, phi: f64) -> f64 {
        let (pc, qc) = self.shifted(phi);
        quadratic_resultant(&pc, &qc)
    }

    fn r_cs(&self, c: f64, s: f64) -> f64 {
        let k = self.table.coeffs_cs(c, s);
        quadratic_resultant(&[k[0] - self.p, k[1], k[2]], &[k[3] - self.q, k[4], k[5]])
    }
}

/// `cos 2φ`, `sin 2φ` on the uniform scan grid.
struct ScanGrid {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ScanGrid {
    fn new(n: usize) -> Self {
        let (sin, cos) = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64).sin_cos()).unzip();
        Self { cos, sin }
    }
}

/// Root of `f` in a sign-changing bracket, by the Illinois variant of
/// regula falsi with a bisection step whenever the bracket stalls.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    let mut fb = f(b);
    if fb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    let mut width = b - a;
    for iter in 0..200 {
        if b - a <= tol {
            break;
        }
        let mut x = b - fb * (b - a) / (fb - fa);
        if iter % 4 == 3 {
            if b - a > 0.5 * width {
                x = 0.5 * (a + b);
            }
            width = b - a;
        }
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (a + b)
}

/// Minimizes `sign · f` on `[a, b]` by golden-section search.
fn golden_min<F: Fn(f64) -> f64>(f: &F, sign: f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (sign * f(x1), sign * f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sign * f(x2);
        }
        if f1 <= 0.0 || f2 <= 0.0 {
            break;
        }
    }
    if f1 < f2 {
        (x1, sign * f1)
    } else {
        (x2, sign * f2)
    }
}

const DIP_SAMPLES: usize = 64;

/// Zeros of `r` on `[lo, hi]` where the coarse samples at both ends and the
/// middle share the sign `sign`. A dense sub-scan catches several close pairs;
/// failing that, a golden-section search looks for a single hidden pair.
fn dip_zeros<F: Fn(f64) -> f64>(r: &F, lo: f64, hi: f64, sign: f64, cfg: &LocalizedConfig, zeros: &mut Vec<f64>, tangential: &mut Vec<f64>) {
    let step = (hi - lo) / DIP_SAMPLES as f64;
    let sub: Vec<f64> = (0..=DIP_SAMPLES).map(|i| r(lo + step * i as f64)).collect();
    let mut found = false;
    for i in 0..DIP_SAMPLES {
        let (x, fa, fb) = (lo + step * i as f64, sub[i], sub[i + 1]);
        if fa == 0.0 {
            zeros.push(x);
            found = true;
        } else if fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            zeros.push(bisect(r, x, x + step, fa, cfg.bisection_tol));
            found = true;
        }
    }
    if found {
        return;
    }
    let i = (1..DIP_SAMPLES).min_by(|&i, &j| sub[i].abs().total_cmp(&sub[j].abs())).unwrap_or(1);
    let (a, b) = (lo + step * (i - 1) as f64, lo + step * (i + 1) as f64);
    let (xm, fm) = golden_min(r, sign, a, b);
    if fm == 0.0 {
        zeros.push(xm);
    } else if (fm > 0.0) != (sign > 0.0) {
        zeros.push(bisect(r, a, xm, sub[i - 1], cfg.bisection_tol));
        zeros.push(bisect(r, xm, b, fm, cfg.bisection_tol));
    } else if fm.abs() < cfg.divergence_threshold * sub.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
        tangential.push(xm);
    }
}

/// Admissible zero where `|∂R/∂φ|` fell below the threshold.
#[derive(Debug, Clone, Copy)]
struct Tangency {
    phi: f64,
    psi: f64,
}

struct PhaseSum {
    value: f64,
    /// Number of admissible sign changes of `R`.
    count: usize,
    tangency: Option<Tangency>,
}

/// `Σ_{φ*} |J| / |∂R/∂φ|` over zeros φ* ∈ [0, π) of `R(·, ψ)` whose common
/// root `c*` lies in [−1, 1]. Zeros with a slope under the threshold, and
/// near-misses found between samples, are reported as tangencies.
fn phase_sum(slice: &Slice<'_>, scan: &ScanGrid, psi: f64, cfg: &LocalizedConfig) -> Result<PhaseSum> {
    let n = scan.cos.len();
    let h = PI / n as f64;
    let r = |phi: f64| slice.r(phi);
    let vals: Vec<f64> = scan.cos.iter().zip(&scan.sin).map(|(&c, &s)| slice.r_cs(c, s)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(PhaseSum { value: 0.0, count: 0, tangency: None });
    }
    let mut zeros = Vec::new();
    let mut tangential = Vec::new();
    for k in 0..n {
        let (a, ra, rb) = (k as f64 * h, vals[k], vals[(k + 1) % n]);
        if ra == 0.0 {
            zeros.push(a);
        } else if rb != 0.0 && (ra > 0.0) != (rb > 0.0) {
            zeros.push(bisect(&r, a, a + h, ra, cfg.bisection_tol));
        }
        // a dip towards zero between samples may hide close pairs of zeros
        let (rm, r0, rp) = (vals[(k + n - 1) % n], ra, rb);
        let same = (rm > 0.0) == (r0 > 0.0) && (rp > 0.0) == (r0 > 0.0) && rm != 0.0 && rp != 0.0;
        if r0 != 0.0 && same && r0.abs() < rm.abs() && r0.abs() <= rp.abs() {
            dip_zeros(&r, a - h, a + h, r0.signum(), cfg, &mut zeros, &mut tangential);
        }
    }
    let mut zeros: Vec<f64> = zeros.into_iter().map(|z| z.rem_euclid(PI)).collect();
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * cfg.bisection_tol);
    let dh = 1e-6;
    let mut sum = 0.0;
    let mut count = 0;
    let mut tangency = None;
    let crossings = zeros.len();
    for (i, phi) in zeros.into_iter().chain(tangential.iter().copied()).enumerate() {
        let phi = phi.rem_euclid(PI);
        let (pc, qc) = slice.shifted(phi);
        let den = qc[2] * pc[1] - pc[2] * qc[1];
        if den == 0.0 {
            continue;
        }
        let c_star = (pc[2] * qc[0] - qc[2] * pc[0]) / den;
        if !(-1.0..=1.0).contains(&c_star) {
            continue;
        }
        let slope = (r(phi + dh) - r(phi - dh)) / (2.0 * dh);
        let k = (phi / h) as usize;
        let local = (0..4).map(|d| vals[(k + n + d - 1) % n].abs()).fold(0.0, f64::max);
        let tangential = slope.abs() * h < cfg.divergence_threshold * local;
        if tangential {
            tangency = Some(Tangency { phi, psi });
        } else if i < crossings {
            count += 1;
        }
        if i >= crossings || slope == 0.0 {
            continue;
        }
        let j = if qc[2] != 0.0 {
            j_degree2_coeffs(&pc, &qc)?
        } else if pc[2] != 0.0 {
            j_degree2_coeffs(&qc, &pc)?
        } else {
            0.0
        };
        sum += j.abs() / slope.abs();
    }
    Ok(PhaseSum { value: sum, count, tangency })
}

fn check_applicable(cfg: &HornConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.degenerate_point().is_some() {
        return Err(Error::Unsupported("a point orbit gives a point mass, not a density"));
    }
    Ok(())
}

/// ρ(p, q) with the ψ-quadrature error estimate. Points with negative
/// discriminant are outside the attainable region and return 0 directly.
pub(crate) fn rho_estimate(cfg: &HornConfig, p: f64, q: f64) -> Result<Estimate> {
    check_applicable(cfg)?;
    let (p_lo, p_hi) = p_extent(&cfg.alpha, &cfg.beta);
    if !discriminant_ok(p, q) || p < p_lo || p > p_hi {
        return Ok(Estimate::exact(0.0));
    }
    rho_formula(cfg, p, q)
}

/// Smallest `|(P, Q) − (p, q)|` over `c ∈ [−1, 1]` and φ at fixed ψ; zero
/// exactly on the ψ-support.
fn distance(slice: &Slice<'_>, grid: &ScanGrid) -> f64 {
    let at = |k: &Coeffs| min_sq_on_unit(&[k[0] - slice.p, k[1], k[2]], &[k[3] - slice.q, k[4], k[5]]);
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for (i, (&c, &s)) in grid.cos.iter().zip(&grid.sin).enumerate() {
        let d = at(&slice.table.coeffs_cs(c, s));
        if d < best {
            best = d;
            arg = i;
        }
    }
    let h = PI / grid.cos.len() as f64;
    let phi = arg as f64 * h;
    let (_, refined) = golden_min(&|x: f64| at(&slice.table.coeffs(x)), 1.0, phi - h, phi + h);
    best.min(refined).max(0.0).sqrt()
}

/// `min (A² + B²)` over `[−1, 1]` for quadratics `A`, `B` (ascending).
fn min_sq_on_unit(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let g = |c: f64| {
        let (x, y) = (a[0] + c * (a[1] + c * a[2]), b[0] + c * (b[1] + c * b[2]));
        x * x + y * y
    };
    // g'/2 = A A' + B B', a cubic
    let d = |c: f64| {
        let (x, y) = (a[0] + c * (a[1] + c * a[2]), b[0] + c * (b[1] + c * b[2]));
        x * (a[1] + 2.0 * a[2] * c) + y * (b[1] + 2.0 * b[2] * c)
    };
    let mut best = g(-1.0).min(g(1.0));
    let nodes: [f64; 9] = std::array::from_fn(|i| -1.0 + 0.25 * i as f64);
    for w in nodes.windows(2) {
        let (da, db) = (d(w[0]), d(w[1]));
        if da < 0.0 && db > 0.0 {
            best = best.min(g(bisect(&d, w[0], w[1], da, 1e-10)));
        }
    }
    best
}

/// Adds ψ samples inside support windows that fall between prescan samples
/// with no admissible zeros. `(P, Q)` moves with speed at most `lip` in ψ, so
/// an interval is discarded once its end distances rule out a zero inside.
fn hidden_windows<E>(alpha: &[f64; 3], beta: &[f64; 3], p: f64, q: f64, seen: &RefCell<Vec<(f64, usize)>>, eval: &E) -> Result<()>
where
    E: Fn(f64) -> Result<PhaseSum>,
{
    let grid = ScanGrid::new(DISTANCE_PHI_POINTS);
    let dist = |psi: f64| -> Result<f64> {
        let table = PhaseTable::new(alpha, beta, psi)?;
        Ok(distance(&Slice { table: &table, p, q }, &grid))
    };
    let norm = |e: &[f64; 3]| e.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c = norm(alpha) + norm(beta);
    let lip = 2.0 * norm(beta) * (c + c * c);

    let mut samples = seen.borrow().clone();
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut stack = Vec::new();
    let mut ends: Vec<Option<f64>> = vec![None; samples.len()];
    for i in 0..samples.len().saturating_sub(1) {
        let ((a, ca), (b, cb)) = (samples[i], samples[i + 1]);
        if ca != 0 || cb != 0 || b - a < MIN_WINDOW {
            continue;
        }
        let da = match ends[i] {
            Some(d) => d,
            None => dist(a)?,
        };
        let db = dist(b)?;
        ends[i + 1] = Some(db);
        stack.push((a, da, b, db));
    }
    let mut budget = WINDOW_SEARCH_BUDGET;
    while let Some((a, da, b, db)) = stack.pop() {
        if 0.5 * (da + db) > 0.5 * lip * (b - a) || b - a < MIN_WINDOW {
            continue;
        }
        if budget == 0 {
            break;
        }
        budget -= 1;
        let m = 0.5 * (a + b);
        let count = eval(m)?.count;
        seen.borrow_mut().push((m, count));
        if count > 0 {
            continue;
        }
        let dm = dist(m)?;
        stack.push((a, da, m, dm));
        stack.push((m, dm, b, db));
    }
    Ok(())
}

const DISTANCE_PHI_POINTS: usize = 128;
/// Support windows narrower than this in ψ are not searched for.
const MIN_WINDOW: f64 = 1e-7;
const WINDOW_SEARCH_BUDGET: usize = 2000;

/// Cap on ψ breakpoints, reached only when the zero count flickers.
const MAX_BREAKS: usize = 256;

/// The localized formula without the attainable-region shortcut.
///
/// The ψ-integrand jumps where `c*` leaves [−1, 1] and has inverse square
/// root folds where two zeros merge. Both change the zero count, so a coarse
/// ψ scan plus bisection on the count gives breakpoints, and each segment is
/// integrated after the substitution `ψ = a + (b − a)(3t² − 2t³)`.
///
/// Isolated tangential zeros are integrable and only cost refinement. The
/// point is reported divergent when tangential zeros were met and the
/// ψ-quadrature still failed to converge.
pub(crate) fn rho_formula(cfg: &HornConfig, p: f64, q: f64) -> Result<Estimate> {
    let lc = &cfg.localized;
    let scan = ScanGrid::new(lc.scan_points);
    // ρ depends only on the orbits; in descending order the extreme sums sit
    // at c = ±1 instead of on narrow interior ψ-windows
    let (alpha, beta) = (descending(cfg.alpha), descending(cfg.beta));
    let eval = |psi: f64| -> Result<PhaseSum> {
        let table = PhaseTable::new(&alpha, &beta, psi)?;
        phase_sum(&Slice { table: &table, p, q }, &scan, psi, lc)
    };

    // (ψ, admissible zero count) for every evaluation, used to place breakpoints
    let seen: RefCell<Vec<(f64, usize)>> = RefCell::new(Vec::new());
    // every count change in (a, b): after each bisection the count just past
    // the change is compared with `cb`, since two folds can sit close together
    let locate = |mut a: f64, b: f64, mut ca: usize, cb: usize| -> Result<Vec<f64>> {
        let mut found = Vec::new();
        while found.len() < MAX_BREAKS {
            let (mut hi, mut c_hi) = (b, cb);
            while hi - a > 1e-12 {
                let mid = 0.5 * (a + hi);
                let c = eval(mid)?.count;
                if c == ca {
                    a = mid;
                } else {
                    hi = mid;
                    c_hi = c;
                }
            }
            found.push(0.5 * (a + hi));
            if c_hi == cb || b - hi <= 1e-12 {
                break;
            }
            (a, ca) = (hi, c_hi);
        }
        Ok(found)
    };

    // near the ends the support can shrink to a sliver that a uniform scan misses
    let m = lc.psi_scan_points;
    let uniform = (0..=m).map(|i| PI * i as f64 / m as f64);
    let ends = (1..=20).flat_map(|k| {
        let d = PI / (m as f64 * 2f64.powi(k));
        [d, PI - d]
    });
    for psi in uniform.chain(ends) {
        seen.borrow_mut().push((psi, eval(psi)?.count));
    }
    if seen.borrow().iter().all(|&(_, c)| c == 0) {
        hidden_windows(&alpha, &beta, p, q, &seen, &eval)?;
    }
    if seen.borrow().iter().all(|&(_, c)| c == 0) {
        return Ok(Estimate::exact(0.0));
    }
    let mut breaks = vec![0.0, PI];
    let norm = 1.0 / (2.0 * PI * PI);
    let finish = |r: QuadResult, t: Option<Tangency>| match t {
        Some(t) => Err(Error::DivergentPoint { phi: t.phi, psi: t.psi }),
        None => Ok(Estimate { value: r.value * norm, error: r.error * norm }),
    };
    let mut previous: Option<(QuadResult, Option<Tangency>)> = None;
    for _ in 0..4 {
        let mut samples = seen.borrow().clone();
        samples.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut fresh = Vec::new();
        for w in samples.windows(2) {
            let ((a, ca), (b, cb)) = (w[0], w[1]);
            if ca == cb || breaks.len() + fresh.len() >= MAX_BREAKS {
                continue;
            }
            let k = breaks.partition_point(|&x| x <= a);
            if breaks[k] >= b {
                fresh.extend(locate(a, b, ca, cb)?);
            }
        }
        let added = !fresh.is_empty();
        breaks.extend(fresh);
        breaks.sort_by(f64::total_cmp);
        if !added {
            if let Some((r, t)) = previous.take() {
                return finish(r, t);
            }
        }

        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let tangency: RefCell<Option<Tangency>> = RefCell::new(None);
        let g = |t: f64| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let i = (t.floor() as usize).min(breaks.len() - 2);
            let u = t - i as f64;
            let (a, b) = (breaks[i], breaks[i + 1]);
            let psi = a + (b - a) * u * u * (3.0 - 2.0 * u);
            let jac = (b - a) * 6.0 * u * (1.0 - u);
            if jac == 0.0 {
                return 0.0;
            }
            match eval(psi) {
                Ok(s) => {
                    seen.borrow_mut().push((psi, s.count));
                    if s.tangency.is_some() {
                        *tangency.borrow_mut() = s.tangency;
                    }
                    s.value * jac
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        };
        let nodes: Vec<f64> = (0..(breaks.len() - 1) * 2 + 1).map(|i| i as f64 / 2.0).collect();
        let tol = Tolerance::new(1e-14, lc.psi_rel_tol).with_max_intervals(lc.psi_max_intervals);
        let r = integrate_breakpoints(g, &nodes, tol);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        if r.converged {
            return Ok(Estimate { value: r.value * norm, error: r.error * norm });
        }
        previous = Some((r, tangency.into_inner()));
    }
    let (r, t) = previous.expect("at least one round ran");
    finish(r, t)
}

fn descending(mut e: [f64; 3]) -> [f64; 3] {
    e.sort_by(|x, y| y.total_cmp(x));
    e
}

/// ρ(p, q) = (1/2π²) ∫₀^π dψ Σ_{φ*} |J| / |∂R/∂φ|.
pub fn rho_localized(cfg: &HornConfig, p: f64, q: f64) -> Result<f64> {
    rho_estimate(cfg, p, q).map(|e| e.value)
}

/// Upper end of `|q|` on the discriminant region at fixed `p`.
fn q_bound(p: f64) -> Option<f64> {
    (p <= 0.0).then(|| 2.0 * (-p / 3.0).powf(1.5))
}

/// The values `z₀ = α_i + β_j`. Where `z₀` is a root of `z³ + pz + q`, that
/// is on the line `q = −z₀p − z₀³`, the two orbits can share an eigenvector
/// and ρ is not smooth.
pub(crate) fn critical_roots(alpha: &[f64; 3], beta: &[f64; 3]) -> Vec<f64> {
    let mut z: Vec<f64> = alpha.iter().flat_map(|a| beta.iter().map(move |b| a + b)).collect();
    z.sort_by(f64::total_cmp);
    z.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));
    z
}

fn line_q(z: f64, p: f64) -> f64 {
    -z * p - z * z * z
}

/// Splits `[p₀, p₁]` where the pieces of the bin change shape: crossings of
/// critical lines, their tangency with the discriminant curve, the cusp,
/// and the places where lines or the curve leave through the q-edges.
/// Segments of a bin thinner than this fraction of its width are merged
/// into their neighbours.
const SLIVER: f64 = 1e-6;

fn p_breaks(lines: &[f64], p: [f64; 2], q: [f64; 2]) -> Vec<f64> {
    let mut cand = vec![0.0];
    for (i, &z) in lines.iter().enumerate() {
        cand.push(-3.0 * z * z);
        for &w in &lines[i + 1..] {
            cand.push(-(z * z + z * w + w * w));
        }
        if z != 0.0 {
            cand.extend(q.iter().map(|e| -(e + z * z * z) / z));
        }
    }
    cand.extend(q.iter().map(|e| -3.0 * (e.abs() / 2.0).powf(2.0 / 3.0)));
    let margin = SLIVER * (p[1] - p[0]);
    let mut out = vec![p[0]];
    out.extend(cand.into_iter().filter(|&x| x > p[0] + margin && x < p[1] - margin));
    out.push(p[1]);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= margin);
    out
}

/// Gauss–Legendre on [0, 1] composed with `t ↦ 3t² − 2t³`, whose vanishing
/// derivative at both ends tames inverse square root and logarithmic
/// endpoint singularities.
fn smoothed_rule(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let u = 0.5 * (xi + 1.0);
            (u * u * (3.0 - 2.0 * u), 0.5 * wi * 6.0 * u * (1.0 - u))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct CellSum {
    integral: f64,
    error: f64,
    flagged: bool,
}

/// ∫ ρ over the part of a bin inside the discriminant region, split along
/// the critical lines. The error adds the ψ-quadrature errors to the change
/// from `coarse` to `fine`.
fn bin_integral(
    cfg: &HornConfig,
    lines: &[f64],
    rules: (&[(f64, f64)], &[(f64, f64)]),
    p: [f64; 2],
    q: [f64; 2],
) -> Result<CellSum> {
    let mut out = CellSum::default();
    let mut coarse = 0.0;
    let (p_lo, p_hi) = p_extent(&cfg.alpha, &cfg.beta);
    let p = [p[0].max(p_lo), p[1].min(p_hi)];
    if p[1] <= p[0] {
        return Ok(out);
    }
    let pb = p_breaks(lines, p, q);
    for (rule, is_fine) in [(rules.0, false), (rules.1, true)] {
        let mut total = 0.0;
        for seg in pb.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            for &(sp, wp) in rule {
                let pn = a + (b - a) * sp;
                let Some(bound) = q_bound(pn) else { continue };
                let (lo, hi) = (q[0].max(-bound), q[1].min(bound));
                if hi <= lo {
                    continue;
                }
                let mut qb = vec![lo, hi];
                let m = SLIVER * (q[1] - q[0]);
                qb.extend(lines.iter().map(|&z| line_q(z, pn)).filter(|&x| x > lo + m && x < hi - m));
                qb.sort_by(f64::total_cmp);
                for qs in qb.windows(2) {
                    let (c, d) = (qs[0], qs[1]);
                    for &(sq, wq) in rule {
                        let w = (b - a) * wp * (d - c) * wq;
                        match rho_formula(cfg, pn, c + (d - c) * sq) {
                            Ok(e) => {
                                total += w * e.value;
                                if is_fine {
                                    out.error += w * e.error;
                                }
                            }
                            Err(Error::DivergentPoint { .. }) => out.flagged = true,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        if is_fine {
            out.integral = total;
        } else {
            coarse = total;
        }
    }
    out.error += (out.integral - coarse).abs();
    Ok(out)
}

/// Bin averages of ρ by tensor Gauss–Legendre over the part of each bin
/// inside the discriminant region, split along the critical lines. Bins
/// where a node hits a tangential zero that spoils the ψ-quadrature are
/// flagged. The reported error is the quadrature error estimate. For point
/// orbits the grid holds the point mass in its bin.
pub fn localized_grid(cfg: &HornConfig) -> Result<HornGrid> {
    cfg.validate()?;
    let grid = cfg.grid.clone().unwrap_or_else(|| default_grid(&cfg.alpha, &cfg.beta, 20));
    let cells = grid.bins * grid.bins;
    let mut out = HornGrid {
        method: "localized".into(),
        grid: grid.clone(),
        values: vec![0.0; cells],
        stderr: vec![0.0; cells],
        flags: vec![false; cells],
        samples: 0,
        outside: 0,
        discriminant_violations: 0,
    };
    if let Some((p, q)) = cfg.degenerate_point() {
        if let Some((ip, iq)) = grid.locate(p, q) {
            out.values[ip * grid.bins + iq] = 1.0 / grid.bin_area();
        }
        return Ok(out);
    }
    let coarse = smoothed_rule(cfg.localized.bin_nodes);
    let fine = smoothed_rule(cfg.localized.bin_nodes + 2);
    let lines = critical_roots(&cfg.alpha, &cfg.beta);
    let (pe, qe) = (grid.p_edges(), grid.q_edges());
    let area = grid.bin_area();
    let bins: Vec<Result<CellSum>> = (0..cells)
        .into_par_iter()
        .map(|k| {
            let (ip, iq) = (k / grid.bins, k % grid.bins);
            bin_integral(cfg, &lines, (&coarse, &fine), [pe[ip], pe[ip + 1]], [qe[iq], qe[iq + 1]])
        })
        .collect();
    for (k, b) in bins.into_iter().enumerate() {
        let c = b?;
        out.values[k] = c.integral / area;
        out.stderr[k] = c.error / area;
        out.flags[k] = c.flagged;
    }
    Ok(out)
}
