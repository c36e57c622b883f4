//! δ(f) for products of pairwise non-proportional affine functions:
//! charts on hyperplanes, test functions, integration and the geometric
//! divergence test.

mod affine;
mod integrate;
mod probe;
mod test_fn;

pub use affine::{validate_factorization, AffineFactorization, AffineFunction, HyperplaneChart};
pub use integrate::{
    delta_1d_integrate, delta_affine_integrate, delta_affine_integrate_on_chart, delta_product_integrate,
    delta_px_integrate, product_rule_check, Estimate, IntegrationConfig, Method, GAUSS_WINDOW, MAX_QUADRATURE_DIM,
};
pub use probe::{divergence_probe, locus_contact, Contact, ProbeReport};
pub use test_fn::{Positivity, TestFunction};

pub(crate) use integrate::{chart_integral, exclusion_schedule};
