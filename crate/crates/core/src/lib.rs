//! Radial solutions of the k-Hessian problem
//!
//! ```text
//! c_{n,k} r^{1-n} (r^{n-k} (u')^k)' = lambda r^sigma (1 - u)^q,   0 < r < 1,
//! u < 0,  u'(0) = 0,  u(1) = 0,
//! ```
//!
//! studied through the planar Lotka-Volterra system
//!
//! ```text
//! x' = x (n + sigma - x - q y)
//! y' = y (-(n - 2k)/k + x/k + y)
//! ```
//!
//! obtained from `x = r^k h(r) (-w)^q / (w')^k`, `y = r w' / (-w)`, `r = e^t`
//! with `w = u - 1`.
//!
//! Module map:
//!
//! * [`exponents`]: admissible parameters and the closed-form critical exponents.
//! * [`phase`]: the vector field, finite and infinite critical points, slopes.
//! * [`integrator`]: Dormand-Prince integration of the orbit leaving `(n + sigma, 0)`.
//! * [`ivp`]: a direct solver for the rescaled singular initial value problem.
//! * [`solutions`]: reconstruction and counting of radial solutions, closed forms.
//! * [`cli`]: the command-line front end used by the `hessian-lv` binary.

pub mod cli;
pub mod error;
pub mod exponents;
pub mod integrator;
pub mod ivp;
pub mod numerics;
pub mod phase;
pub mod solutions;

pub use error::{Error, Result};
pub use exponents::{ExponentReport, Params, Regime};
pub use integrator::{integrate_cycle, integrate_orbit, IntegratorConfig, Orbit, Termination};
pub use phase::PhasePoint;
pub use solutions::{BifurcationSample, RadialSolution, SolutionCount, SolutionSource};
pub use ivp::RadialProfile;

