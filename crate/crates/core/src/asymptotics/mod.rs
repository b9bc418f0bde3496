//! Asymptotic predictions for the normalized SIR and the link rate.

mod closed_form;
mod fixed_point;
pub mod quadrature;
mod special;

pub use closed_form::{
    cell_edge_rate, limiting_activation, limiting_density, limiting_edf, optimal_reuse,
    predicted_rate, rate_approx, rate_from_large_c,
};
pub use fixed_point::{
    beta_large_c, bracket, fixed_point_equation, fixed_point_oracle, oracle_load,
    relative_residual, sign_changes, solve_beta_fixed_point, AsymptoticParams,
    AsymptoticSolution, Method,
};
pub use special::{gauss_2f1, lambert_w0};
