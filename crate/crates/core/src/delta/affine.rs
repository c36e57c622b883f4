use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `f(y) = gradient · y + offset` with a nonzero gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunction {
    gradient: Vec<f64>,
    offset: f64,
}

impl AffineFunction {
    pub fn new(gradient: Vec<f64>, offset: f64) -> Result<Self> {
        if gradient.is_empty() || gradient.iter().any(|g| !g.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidInput("affine function needs finite coefficients".into()));
        }
        if gradient.iter().all(|&g| g == 0.0) {
            return Err(Error::ZeroGradient(0));
        }
        Ok(Self { gradient, offset })
    }

    /// The coordinate function `y_k + offset` in dimension `dim`.
    pub fn coordinate(dim: usize, k: usize, offset: f64) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[k] = 1.0;
        Self { gradient, offset }
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        dot(&self.gradient, y) + self.offset
    }

    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.gradient.iter().map(|g| g * lambda).collect(), self.offset * lambda)
    }

    /// Euclidean distance from `y` to the zero set.
    pub fn distance(&self, y: &[f64]) -> f64 {
        self.eval(y).abs() / self.gradient_norm()
    }

    fn augmented(&self) -> impl Iterator<Item = f64> + '_ {
        self.gradient.iter().copied().chain(std::iter::once(self.offset))
    }

    /// Whether the augmented coefficient vectors are scalar multiples.
    pub fn is_proportional_to(&self, other: &Self) -> bool {
        let x: Vec<f64> = self.augmented().collect();
        let y: Vec<f64> = other.augmented().collect();
        let scale = 1e-12 * norm(&x) * norm(&y);
        for k in 0..x.len() {
            for l in k + 1..x.len() {
                if (x[k] * y[l] - x[l] * y[k]).abs() > scale {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the gradients are parallel (the zero sets do not cross).
    pub fn is_parallel_to(&self, other: &Self) -> bool {
        let (x, y) = (&self.gradient, &other.gradient);
        let scale = 1e-12 * norm(x) * norm(y);
        for k in 0..x.len() {
            for l in k + 1..x.len() {
                if (x[k] * y[l] - x[l] * y[k]).abs() > scale {
                    return false;
                }
            }
        }
        true
    }
}

/// A validated member of H(ℝⁿ): pairwise non-proportional affine factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineFactorization {
    factors: Vec<AffineFunction>,
}

impl AffineFactorization {
    pub fn new(factors: Vec<AffineFunction>) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidInput("factorization needs at least one factor".into()));
        };
        let dim = first.dim();
        for f in &factors {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i].is_proportional_to(&factors[j]) {
                    return Err(Error::ProportionalFactors { first: i, second: j });
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[AffineFunction] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.factors.iter().map(|f| f.eval(y)).product()
    }

    /// Concatenation `f·g`, revalidated.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(self.factors.iter().chain(&other.factors).cloned().collect())
    }
}

/// Builds a factorization from raw `(gradient, offset)` pairs, reporting
/// errors with the index of the offending factor.
pub fn validate_factorization(raw: Vec<(Vec<f64>, f64)>) -> Result<AffineFactorization> {
    let mut factors = Vec::with_capacity(raw.len());
    for (i, (gradient, offset)) in raw.into_iter().enumerate() {
        let f = AffineFunction::new(gradient, offset).map_err(|e| match e {
            Error::ZeroGradient(_) => Error::ZeroGradient(i),
            other => other,
        })?;
        factors.push(f);
    }
    AffineFactorization::new(factors)
}

/// Orthonormal coordinates on the zero set of one factor.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneChart {
    point: Vec<f64>,
    basis: Vec<Vec<f64>>,
    density: f64,
}

impl HyperplaneChart {
    /// Gram–Schmidt completion seeded by the standard basis in index order.
    pub fn new(f: &AffineFunction) -> Self {
        let n = f.dim();
        let g = f.gradient();
        let gn = f.gradient_norm();
        let normal: Vec<f64> = g.iter().map(|x| x / gn).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n {
            if basis.len() + 1 == n {
                break;
            }
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            for _ in 0..2 {
                for b in std::iter::once(&normal).chain(basis.iter()) {
                    let c = dot(&e, b);
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let len = norm(&e);
            if len > 1e-8 {
                e.iter_mut().for_each(|x| *x /= len);
                basis.push(e);
            }
        }
        Self::assemble(f, basis)
    }

    /// A chart with a caller-supplied orthonormal basis of the hyperplane.
    pub fn with_basis(f: &AffineFunction, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = f.dim();
        if basis.len() + 1 != n || basis.iter().any(|b| b.len() != n) {
            return Err(Error::DimensionMismatch { expected: n - 1, found: basis.len() });
        }
        let gn = f.gradient_norm();
        for (i, b) in basis.iter().enumerate() {
            if (norm(b) - 1.0).abs() > 1e-12 || dot(b, f.gradient()).abs() > 1e-12 * gn {
                return Err(Error::InvalidInput("basis is not orthonormal in the hyperplane".into()));
            }
            for c in &basis[..i] {
                if dot(b, c).abs() > 1e-12 {
                    return Err(Error::InvalidInput("basis is not orthonormal in the hyperplane".into()));
                }
            }
        }
        Ok(Self::assemble(f, basis))
    }

    fn assemble(f: &AffineFunction, basis: Vec<Vec<f64>>) -> Self {
        let gn2 = f.gradient_norm().powi(2);
        let point = f.gradient().iter().map(|g| -f.offset() * g / gn2).collect();
        Self { point, basis, density: 1.0 / gn2.sqrt() }
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// Dimension of the hyperplane.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn embed_into(&self, z: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.point);
        for (zk, b) in z.iter().zip(&self.basis) {
            y.iter_mut().zip(b).for_each(|(yi, bi)| *yi += zk * bi);
        }
    }

    pub fn embed(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.point.len()];
        self.embed_into(z, &mut y);
        y
    }

    /// Chart coordinates of the orthogonal projection of `y`.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = y.iter().zip(&self.point).map(|(a, b)| a - b).collect();
        self.basis.iter().map(|b| dot(b, &d)).collect()
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
