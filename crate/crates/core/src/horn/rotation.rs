use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::poly::CoeffPoly;
use crate::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

/// z-x-z Euler angles; `c = cos θ` is the coordinate in which the Haar
/// density is flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Result<Self> {
        for (name, x) in [("theta", theta), ("phi", phi), ("psi", psi)] {
            if !(0.0..=PI).contains(&x) {
                return Err(Error::InvalidInput(format!("{name} = {x} outside [0, π]")));
            }
        }
        Ok(Self { theta, phi, psi })
    }

    pub fn from_cos(c: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&c) {
            return Err(Error::InvalidInput(format!("cos θ = {c} outside [-1, 1]")));
        }
        Self::new(c.acos(), phi, psi)
    }

    pub fn c(&self) -> f64 {
        self.theta.cos()
    }
}

fn rz(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// `R = R_z(φ) R_x(θ) R_z(ψ)`.
pub fn rotation_from_euler(angles: EulerAngles) -> Mat3 {
    rotation_from_cos(angles.theta.cos(), angles.theta.sin(), angles.phi, angles.psi)
}

/// Same rotation from `(cos θ, sin θ)` directly.
pub(crate) fn rotation_from_cos(c: f64, s: f64, phi: f64, psi: f64) -> Mat3 {
    let x = [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]];
    mat_mul(&mat_mul(&rz(phi), &x), &rz(psi))
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `C = diag(α) + R diag(β) Rᵀ`.
pub fn conjugate_sum(alpha: &[f64; 3], beta: &[f64; 3], r: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v: f64 = (0..3).map(|k| r[i][k] * beta[k] * r[j][k]).sum();
            m[i][j] = v;
            m[j][i] = v;
        }
        m[i][i] += alpha[i];
    }
    m
}

/// `(p, q)` with `det(z − C) = z³ + p z + q` for traceless symmetric `C`:
/// `p = −tr(C²)/2`, `q = −det C`.
pub fn char_poly_pq(alpha: &[f64; 3], beta: &[f64; 3], r: &Mat3) -> (f64, f64) {
    let m = conjugate_sum(alpha, beta, r);
    let tr2: f64 = m.iter().flatten().map(|x| x * x).sum();
    (-0.5 * tr2, -det3(&m))
}

const CERTIFICATE_C: f64 = 0.5;
const CERTIFICATE_TOL: f64 = 1e-9;

pub(crate) fn pq_at(alpha: &[f64; 3], beta: &[f64; 3], c: f64, phi: f64, psi: f64) -> (f64, f64) {
    let s = (1.0 - c * c).max(0.0).sqrt();
    char_poly_pq(alpha, beta, &rotation_from_cos(c, s, phi, psi))
}

/// Coefficients (ascending in `c`) of `P` and `Q` at fixed `(φ, ψ)`, from
/// three evaluations, certified at a fourth.
pub fn pq_coefficients_in_c(alpha: &[f64; 3], beta: &[f64; 3], phi: f64, psi: f64) -> Result<([f64; 3], [f64; 3])> {
    let (pm, qm) = pq_at(alpha, beta, -1.0, phi, psi);
    let (p0, q0) = pq_at(alpha, beta, 0.0, phi, psi);
    let (pp, qp) = pq_at(alpha, beta, 1.0, phi, psi);
    let fit = |m: f64, z: f64, p: f64| [z, 0.5 * (p - m), 0.5 * (p + m) - z];
    let (pc, qc) = (fit(pm, p0, pp), fit(qm, q0, qp));
    let (pt, qt) = pq_at(alpha, beta, CERTIFICATE_C, phi, psi);
    let eval = |k: &[f64; 3], x: f64| k[0] + x * (k[1] + x * k[2]);
    let scale = 1.0 + pm.abs().max(pp.abs()).max(qm.abs()).max(qp.abs());
    let residual = (eval(&pc, CERTIFICATE_C) - pt).abs().max((eval(&qc, CERTIFICATE_C) - qt).abs()) / scale;
    if residual > CERTIFICATE_TOL {
        return Err(Error::DegreeCertificateFailure { residual });
    }
    Ok((pc, qc))
}

/// [`pq_coefficients_in_c`] as coefficient polynomials (vanishing top
/// coefficients trimmed).
pub fn pq_polynomials_in_c(alpha: &[f64; 3], beta: &[f64; 3], phi: f64, psi: f64) -> Result<(CoeffPoly, CoeffPoly)> {
    let (pc, qc) = pq_coefficients_in_c(alpha, beta, phi, psi)?;
    Ok((CoeffPoly::trimmed(pc.to_vec())?, CoeffPoly::trimmed(qc.to_vec())?))
}
