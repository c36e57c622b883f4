//! Root-factored and coefficient-form polynomials, resultants, the multiplier
//! J in its equivalent forms, and the exact symbolic expansion of J.

mod coeff;
mod multi;
mod multiplier;
mod root;
mod symbolic;

pub use coeff::{coeffs_to_roots_quadratic, resultant_sylvester, sylvester_matrix, CoeffPoly};
pub use multi::MultiPoly;
pub use multiplier::{
    j_degree2, j_degree2_coeffs, j_multiplier, j_product_form, j_sum, j_tilde,
    reciprocal_derivative_sum, resultant_roots,
};
pub use root::{check_distinct, roots_coincide, Family, RootPoly, ROOT_TOLERANCE};
pub use symbolic::{expand_j_symbolic, j_variable_names};

