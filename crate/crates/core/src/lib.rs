//! Spatial spectrum access games on directed interference graphs.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`graph`]: directed interference graphs, construction from geometry and
//!   structural classification (DAG, directed tree/forest, bipartite, ...);
//! * [`model`]: channel state processes, rate models and the channel-grabbing
//!   probability of each contention mechanism;
//! * [`game`]: pure/mixed/physical payoffs, Nash equilibrium search and
//!   certification, constructive equilibria, potential functions and the
//!   price of anarchy;
//! * [`estimation`]: maximum-likelihood estimates of channel and contention
//!   parameters from per-period observation traces;
//! * [`learning`]: Boltzmann-perception learning, the mean-dynamics operator,
//!   its contraction bound and the entropy gap of the limit point;
//! * [`simulator`]: a slotted-time engine and a policy comparison harness.
//!
//! Users and channels are 0-based everywhere in this crate. Randomness is
//! always supplied by the caller, so every run is replayable from a seed.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod estimation;
pub mod game;
pub mod graph;
pub mod instances;
pub mod learning;
pub mod math;
pub mod model;
pub mod simulator;

pub use error::{Error, Result};
pub use game::{GameSpec, MixedProfile, StrategyProfile};
pub use graph::{DirectedInterferenceGraph, GraphClass};
