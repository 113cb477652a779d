//! Two-player analysis for player 1 restricted to finite memory: certified
//! value intervals, three-valued threshold verdicts, winning and value
//! regions, and strategy synthesis and evaluation.
//!
//! The infimum over finite-memory strategies is a minimum over one cycle
//! mixture per player-2 memoryless strategy. It is bracketed by a
//! best-first branch-and-bound over products of mixture simplices: upper
//! bounds come from exact evaluations at strictly positive rational
//! mixtures (which are realizable), lower bounds from certified relaxations.

mod bnb;
pub mod certify;
pub mod families;
mod lattice;
mod regions;
mod synth;

use std::collections::BTreeMap;

use crate::error::Result;
use crate::expr::{Expression, NormalForm};
use crate::graph::MooreStrategy;
use crate::rational::{frac, Q};

pub use bnb::{bracket, inf_value};
pub use certify::{verify_lower_bound, LowerBoundCertificate};
pub use lattice::lattice_witness;
pub use regions::{value_region, winning_region, RegionReport, WinningRegion};
pub use synth::{enumerate_strategies, epsilon_optimal_strategy, eval_strategy, Synthesized};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Player 1 finite-memory, player 2 arbitrary.
    #[default]
    P1Finite,
    /// Both players finite-memory: lim-sup atoms behave as lim-inf atoms.
    BothFinite,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Branch-and-bound nodes per interval computation.
    pub node_budget: usize,
    /// Player-2 memoryless strategies and enumerated player-1 strategies.
    pub enumeration_budget: usize,
    /// Largest denominator tried by the lattice witness search.
    pub lattice_denominator: u32,
    /// Exact evaluations allowed to the lattice witness search.
    pub lattice_budget: usize,
    /// Worker threads for independent per-vertex computations.
    pub jobs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::P1Finite,
            node_budget: 20_000,
            enumeration_budget: 100_000,
            lattice_denominator: 12,
            lattice_budget: 50_000,
            jobs: 1,
        }
    }
}

impl SolverConfig {
    pub fn set_mode(&mut self, both_finite: bool) {
        self.mode = if both_finite { Mode::BothFinite } else { Mode::P1Finite };
    }

    /// The expression the solvers should see under the configured mode.
    pub fn prepare(&self, e: &Expression) -> Expression {
        match self.mode {
            Mode::P1Finite => e.clone(),
            Mode::BothFinite => e.liminf_only_rewrite(),
        }
    }

    /// Validates, rewrites for the mode and normalizes.
    pub fn normal_form(&self, e: &Expression, k: usize) -> Result<NormalForm> {
        self.prepare(e).normalize(k)
    }
}

/// One cycle mixture per factor; its points evaluate exactly to `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub families: Vec<WitnessFamily>,
}

impl Witness {
    pub fn points(&self) -> Vec<Vec<Q>> {
        self.families.iter().map(|f| f.point.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFamily {
    pub factor: usize,
    pub option: usize,
    pub cycles: Vec<Vec<usize>>,
    pub mixing: Vec<Q>,
    pub point: Vec<Q>,
}

/// Certified bracket `[lo, hi]` for the finite-memory infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueInterval {
    pub lo: Q,
    pub hi: Q,
    pub witness: Option<Witness>,
    pub certificate: LowerBoundCertificate,
    pub trace: Vec<String>,
}

impl ValueInterval {
    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Player 1 can keep the value at or below the threshold.
    Yes { hi: Q, witness: Option<Witness>, strategy: Option<MooreStrategy> },
    /// Certified lower bound above the threshold.
    No { lo: Q, certificate: LowerBoundCertificate },
    Unknown(ValueInterval),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No { .. })
    }
}

/// Default ε for callers that do not pick one.
pub fn default_eps() -> Q {
    frac(1, 100)
}

pub type VertexMap<T> = BTreeMap<usize, T>;
