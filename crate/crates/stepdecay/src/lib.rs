//! Stochastic model-based optimization with geometric step decay restarts.
//!
//! The crate is organized around five pieces:
//!
//! - [`prox`]: exact solvers for the quadratically anchored model subproblems
//!   that every algorithm step reduces to (absolute-affine, clipped-affine,
//!   absolute-quadratic, absolute-bilinear, and soft-thresholding steps).
//! - [`problems`]: measurement sampling, model construction, solution-set
//!   distance metrics, and sharpness-constant estimation for robust phase
//!   retrieval, robust blind deconvolution, and sparse logistic regression.
//! - [`solvers`]: the inner model-based loop (`mba`), the restarted variants
//!   with geometrically decaying step sizes (`rmba`), the proximal-point
//!   variants (`pmba`, `epmba`, `rpmba`), and the parameter schedules that
//!   drive them.
//! - [`baselines`]: regularized dual averaging and polynomially decaying
//!   stochastic proximal gradient, for comparison runs.
//! - [`harness`]: multi-trial experiment runners with deterministic seeding
//!   and CSV/JSON emission.

pub mod baselines;
pub mod harness;
pub mod poly;
pub mod problems;
pub mod prox;
pub mod solvers;
pub mod stream;
