//! Numerical core for path-integral stochastic control experiments.
//!
//! The crate is organised around the pipeline the experiments drive:
//!
//! * [`rng`] / [`sde`]: counter-based reproducible noise and Euler-Maruyama
//!   integration of controlled diffusions in 1-D and k-D,
//! * [`foc`]: the integrating-factor function `g`, the assembled `f`
//!   function and the Wick-rotated first-order condition it satisfies,
//! * [`mgh`]: the Merton-Garman `f` and the Hamiltonian grid operator,
//! * [`strategies`]: closed-form feedback rules (quantum and Pontryagin
//!   branches) together with the Riccati-like ODE systems behind the
//!   Pontryagin benchmarks,
//! * [`path_integral`]: exponential path reweighting, effective-sample-size
//!   diagnostics and transition-kernel grid propagation,
//! * [`mppi`]: the receding-horizon path-integral controller.
//!
//! Everything here is pure computation over caller-owned buffers; IO, file
//! formats and parallel execution live in the companion CLI crate. The crate
//! is `no_std`-compatible (with `alloc`); float transcendentals go through
//! `libm` so results do not depend on the host libm.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod foc;
pub(crate) mod math;
pub mod mgh;
pub mod mppi;
pub mod path_integral;
pub mod rng;
pub mod sde;
pub mod strategies;
