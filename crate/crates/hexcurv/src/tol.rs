//! Numerical tolerances shared by all modules.

/// Bucket width on `x*x` for light-like classification.
pub const CAUSAL: f64 = 1e-10;
/// Unit-norm preconditions.
pub const NORM: f64 = 1e-9;
/// Span degeneracy for cross products.
pub const RANK: f64 = 1e-12;
/// Orthogonality residuals.
pub const RESID: f64 = 1e-12;
/// Cosine-law residuals.
pub const LAW: f64 = 1e-10;
/// Compatibility residuals of partial lengths.
pub const COMPAT: f64 = 1e-9;
/// Values below this magnitude match either sign.
pub const SIGN: f64 = 1e-9;
/// Shortest edge length accepted by the cosine law.
pub const LEN: f64 = 1e-8;
/// Relative eigenvalue threshold for definiteness tests.
pub const EIG: f64 = 1e-12;
