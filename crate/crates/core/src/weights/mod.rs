//! O-regularly varying weight functions: evaluation, Matuszewska indices,
//! interpolation parameters, and integral-convergence deciders.

mod dyadic;
mod expr;
mod indices;
mod params;

pub use dyadic::{
    dyadic_integral_test, embed_hormander, embed_nikolskii, DecidedBy, DyadicReport, NikolskiiEmbedding, Verdict,
    DEFAULT_K_MAX,
};
pub use expr::{iter_log_glue_point, FnWeight, Weight, WeightExpr};
pub use indices::{check_or_window, indices, IndexEstimate, Indices, OrCheckResult, OrGrid, Window};
pub use params::{compose_param, eta_construct, eta_identity_error, interp_param, EtaBranch, EtaConstruction};
