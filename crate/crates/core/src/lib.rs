//! Equilibrium branches of three-player Kuhn poker with `N > 3` cards.
//!
//! The equilibrium conditions of the game are smoothed with an arctangent
//! regularization and the resulting nonlinear system is followed in the pot
//! size `P` by Newton's method and pseudo-arclength continuation.
//!
//! Layout:
//! - [`game`]: the fixed decision tree, deals, frequency indexing and the
//!   sparse multilinear term list used to evaluate expectations exactly.
//! - [`equilibrium`]: regularized residual and Jacobian, equilibrium
//!   verification and an independent best-response oracle.
//! - [`continuation`]: Newton solver, bootstrap, predictor and branch tracing.
//! - [`skp`]: closed-form oracle for simplified Kuhn poker.
//! - [`io`]: branch CSV persistence, SVG plots and range frames.

pub mod continuation;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod io;
pub mod skp;

pub use error::{Error, Result};
