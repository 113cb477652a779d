//! Finite-memory strategy synthesis for games on multidimensional weighted
//! graphs whose objectives are mean-payoff expressions.
//!
//! Player 1 minimizes the value of an [`Expression`] over the long-run averages
//! of a play; player 2 maximizes it. The crate computes one-player values
//! exactly, brackets two-player finite-memory values in certified rational
//! intervals, and builds Moore-machine strategies that achieve them.

pub mod certificate;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod lp;
pub mod oneplayer;
pub mod rational;
pub mod realizability;
pub mod reduction;
pub mod twoplayer;

pub use error::{Error, Result};
pub use expr::{Expression, NormalForm};
pub use graph::{GameGraph, MooreStrategy, Owner};
pub use rational::Q;
pub use twoplayer::{SolverConfig, ValueInterval, Verdict};
