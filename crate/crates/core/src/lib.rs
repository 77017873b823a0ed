//! Numerical toolkit for the static Maxwell-Dirac field equations in the
//! co-moving spinor parameterization.
//!
//! The crate is organized around four subsystems:
//!
//! * [`spinor`] — spinor dyads, null tetrads, and the maps from spinor data
//!   `(R, tau, chi, eta)` to the Dirac current, the electromagnetic potential,
//!   and the reality-condition residuals.
//! * [`weighted`] — weighted Lebesgue/Sobolev norms on exterior domains,
//!   decay-exponent estimation, and empirical Sobolev/multiplication
//!   inequality checks.
//! * [`spherical`] — reduction of the stationary static system to radial ODEs
//!   (`tau = theta`), an adaptive shooting solver seeded from the asymptotic
//!   tail, and the charge-flux series certifying electric neutrality.
//! * [`axisym`] — axially symmetric diagnostics: azimuthal vector potential,
//!   electric and magnetic flux integrals, Coulomb extraction, monopole
//!   quantization, and the multi-monopole sign ledger.
//!
//! Shared numerical machinery (finite differences, least-squares fits,
//! quadrature, the Runge-Kutta stepper) lives in the small support modules.
//! All operations are pure functions of their inputs and use fixed summation
//! orders, so results are deterministic.

pub mod axisym;
pub mod fd;
pub mod fit;
pub mod geom;
pub mod ode;
pub mod quad;
pub mod spherical;
pub mod spinor;
pub mod weighted;

pub use geom::{FourVector, Vec3};
pub use spinor::{Dyad, NullTetrad, PhysicalConstants, SpinorPoint, StaticFieldGrid};
