//! Gaussian quasi-maximum likelihood for ARMA models with optional GARCH
//! variance, plus BIC order selection for autoregressions.

mod filter;
mod fit;
mod optimize;
mod spec;
mod transform;

pub use filter::{check_theta, filter, model_derivatives, Filtered};
pub use fit::{
    fit_qmle, information_matrix, max_bic_order, score_tolerance, select_order_bic, BicSelection, FitOptions,
    FittedModel,
};
pub use spec::ModelSpec;
