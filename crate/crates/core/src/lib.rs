//! Continuation toolkit for positive T-periodic solutions of periodically
//! forced second-order equations
//!
//! ```text
//! u'' + c u' + g(t, u) = mu + e(t),      e with zero mean over one period,
//! ```
//!
//! where g is singular at u = 0 (Lazer-Solimini, MEMS, and condensed-matter
//! nonlinearities). Solutions are written u = xi + U with U of zero mean; the
//! average xi acts as a global curve parameter, so sweeping xi traces the
//! entire solution curve mu = phi(xi) without fold-handling.
//!
//! Module map:
//! - [`expr`]: arithmetic expressions in `t` for forcing/weight functions
//! - [`ivp`]: fixed-step RK4 over one period with dense cubic-Hermite output
//! - [`linper`]: linear periodic solves, including the zero-average problem
//!   with the unknown constant `mu`
//! - [`models`]: the three problem families plus hypothesis validators
//! - [`continuation`]: Newton correction and curve tracing in xi
//! - [`verify`]: independent re-integration checks, curve-shape analysis,
//!   and a-priori bound checks

pub mod continuation;
pub mod expr;
pub mod ivp;
pub mod linper;
pub mod models;
pub mod verify;
