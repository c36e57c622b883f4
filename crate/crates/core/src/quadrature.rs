//! Adaptive Gauss–Kronrod quadrature (21-point rule) on intervals with
//! breakpoints, and nested iterated integration over boxes.

use std::cell::Cell;
use std::collections::BinaryHeap;

use serde::Serialize;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_850,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule: stop once `error ≤ max(abs, rel·|value|)` or when the
/// interval budget is spent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_intervals: 200 }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-300, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One application of the 21-point Kronrod rule: `(value, error)`.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (y1, y2) = (f(center - dx), f(center + dx));
        f1[j] = y1;
        f2[j] = y2;
        res_k += WGK[j] * (y1 + y2);
        res_abs += WGK[j] * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (y1 + y2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let scale = half.abs();
    let value = res_k * half;
    (value, rescale_error(err, res_abs * scale, res_asc * scale))
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration over `[points[0], points[last]]`, with the
/// intermediate points used as initial breakpoints. Points must be sorted.
pub fn integrate_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk21(&mut f, w[0], w[1]);
            evals += 21;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    let total = |heap: &BinaryHeap<Piece>| {
        let mut pieces: Vec<&Piece> = heap.iter().collect();
        // deterministic summation order
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        pieces.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = total(&heap);
    let mut converged = true;
    while error > tol.abs.max(tol.rel * value.abs()) {
        if heap.len() >= tol.max_intervals {
            converged = false;
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evals += 42;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        (value, error) = total(&heap);
    }
    QuadResult { value, error, evals, converged }
}

pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    integrate_breakpoints(f, &[a, b], tol)
}

/// Iterated integration over `dim` variables. `limits(level, prefix)` returns
/// the sorted breakpoints of variable `level` given the values of the
/// variables before it (an empty or single-point list means an empty range).
pub fn integrate_nested<L, F>(dim: usize, limits: &L, f: &F, tol: Tolerance) -> QuadResult
where
    L: Fn(usize, &[f64]) -> Vec<f64>,
    F: Fn(&[f64]) -> f64,
{
    let converged = Cell::new(true);
    let evals = Cell::new(0usize);
    let mut point = vec![0.0; dim];
    let outer = nested_level(0, dim, &mut point, limits, f, tol, &converged, &evals);
    QuadResult {
        value: outer.value,
        error: outer.error,
        evals: evals.get(),
        converged: converged.get() && outer.converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn nested_level<L, F>(
    level: usize,
    dim: usize,
    point: &mut Vec<f64>,
    limits: &L,
    f: &F,
    tol: Tolerance,
    converged: &Cell<bool>,
    evals: &Cell<usize>,
) -> QuadResult
where
    L: Fn(usize, &[f64]) -> Vec<f64>,
    F: Fn(&[f64]) -> f64,
{
    if level == dim {
        evals.set(evals.get() + 1);
        let value = f(point);
        return QuadResult { value, error: 0.0, evals: 1, converged: true };
    }
    let points = limits(level, &point[..level]);
    if points.len() < 2 {
        return QuadResult { value: 0.0, error: 0.0, evals: 0, converged: true };
    }
    let result = integrate_breakpoints(
        |x| {
            point[level] = x;
            let inner = nested_level(level + 1, dim, point, limits, f, tol, converged, evals);
            inner.value
        },
        &points,
        tol,
    );
    if !result.converged {
        converged.set(false);
    }
    result
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on the
/// Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}
