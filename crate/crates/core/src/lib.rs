//! Solvers for combinatorial contract design with supermodular rewards.
//!
//! * [`single_agent`]: exact breakpoint enumeration and the optimal linear
//!   contract for one agent choosing a set of actions.
//! * [`multiagent`]: the uniform-cost graph-supermodular multi-agent problem
//!   (U-GSC), with exact evaluation, brute force and k-coring.
//! * [`ptas`]: the sampling / LP / randomized-rounding approximation scheme
//!   for U-GSC, with configurable budgets.
//! * [`generators`]: hardness-reduction and benchmark instance families.

pub mod action_set;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod multiagent;
pub mod oracles;
pub mod ptas;
pub mod rational;
pub mod single_agent;
pub mod valuations;
pub mod verify;

pub use action_set::ActionSet;
pub use error::{Error, Result};
pub use graph::Graph;
pub use rational::Rational;
pub use valuations::Valuation;
