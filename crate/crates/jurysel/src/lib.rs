//! Jury-selection veto procedures: equilibrium analysis and simulation.
//!
//! This crate models the selection of a jury of `j` members from a panel of
//! `n = j + d + p` potential jurors, where the defendant and the plaintiff
//! hold `d` and `p` peremptory challenges. Each juror carries a conviction
//! probability `c` drawn from a two-group population distribution, and the
//! parties value a jury by the product of its members' conviction
//! probabilities (defendant minimizing, plaintiff maximizing).
//!
//! Three procedures are implemented:
//!
//! - **Struck** (`STR`): the whole panel is observed, then the plaintiff
//!   strikes the `p` lowest-`c` jurors and the defendant the `d` highest.
//! - **Strike-and-Replace** (`S&R`): jurors are presented one at a time and
//!   challenged via subgame-perfect threshold strategies computed by
//!   backward induction over subgames `(kappa, delta, pi)`.
//! - **Random** (`RAN`): `j` jurors drawn at random, no challenges.
//!
//! Modules:
//!
//! - [`dist`] — uniform/beta mixture distributions with the exact integrals
//!   the equilibrium recursion needs.
//! - [`solver`] — backward-induction computation of subgame values and
//!   challenge thresholds for Strike-and-Replace.
//! - [`procedure`] — one jury selection under each procedure.
//! - [`metrics`] — per-jury statistics accumulation and closed-form
//!   binomial baselines.
//! - [`oracle`] — independent ground truth: exact game-tree integration,
//!   grid value iteration, exact order-statistic tails, enumeration.
//! - [`sim`] — deterministic, parallel Monte Carlo experiment runner.
//! - [`replicate`] — preset experiment bundles emitting CSV data.

pub mod dist;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod procedure;
pub mod replicate;
pub mod sim;
pub mod solver;
pub mod special;

pub use dist::{Component, DistSpec, GroupModel, MixtureDistribution};
pub use error::{Error, Result};
pub use metrics::{Estimate, SimulationSummary};
pub use procedure::{Group, Juror, JuryOutcome, Panel, Procedure};
pub use sim::ExperimentConfig;
pub use solver::{solve, EquilibriumTable, SubgameKey};
