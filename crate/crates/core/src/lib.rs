//! Joint pricing and predictive-maintenance scheduling for a supplier whose
//! customers are linked by a social network with positive consumption
//! externalities.
//!
//! The supplier (leader) sets per-customer prices and a maintenance plan for
//! its manufacturing units; the customers (followers) answer with the Nash
//! equilibrium of a linear-quadratic network game. The crate is split by
//! layer:
//!
//! - [`model`]: domain types and validation.
//! - [`equilibrium`]: the followers' game (utilities, best responses, NE).
//! - [`pricing`]: the leader's per-period pricing problem, for both a
//!   network-aware and a network-blind supplier.
//! - [`reliability`]: scenario sampling of degradation thresholds and the
//!   Monte Carlo check of the chance constraint.
//! - [`scheduler`]: exact maintenance scheduling by dynamic programming,
//!   a brute-force oracle, the threshold baseline and schedule evaluation.
//! - [`miqp`]: the big-M mixed-integer model of the full leader problem, for
//!   cross-checking with external solvers.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command
//! line live in the companion `netmaint` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod equilibrium;
pub mod error;
pub mod linalg;
pub mod miqp;
pub mod model;
pub mod normal;
pub mod pricing;
pub mod qp;
pub mod reliability;
pub mod scheduler;

pub use error::{Error, Result};
pub use model::{
    CustomerNetwork, Horizon, MaintenanceSchedule, PricingSolution, ScheduleCheck,
    SolutionReport, UnitFleet, Violation,
};
