//! Solvers for menus of contracts in Bayesian hidden-action
//! principal-agent problems.
//!
//! A principal commits to a menu of outcome-contingent payment schemes,
//! one per agent type (possibly a distribution over schemes per type); the
//! agent reports a type, receives a contract, and plays a hidden
//! utility-maximizing action. This crate computes:
//!
//! - exactly optimal DSIC menus of deterministic contracts when there are
//!   two outcomes ([`det::solve_two_outcomes`]) or few types
//!   ([`det::solve_constant_types`]);
//! - additive-approximation menus for a constant number of outcomes
//!   ([`det::ptas_constant_outcomes`]);
//! - near-optimal DSIC menus of randomized contracts, within any epsilon
//!   of the supremum, by column generation against a separation oracle
//!   ([`randmenu::solve_randomized`]);
//! - brute-force oracles and instance generators used to certify all of
//!   the above at desk scale ([`oracles`], [`gen`]).
//!
//! Everything in the data model is an exact rational; see `examples/` for
//! runnable entry points per capability and the `contract-menus` binary
//! for the command-line interface.

pub mod agent;
pub mod bench;
pub mod det;
pub mod gen;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracles;
pub mod randmenu;
pub mod rational;

pub use model::{Contract, DeterministicMenu, Instance, RandomizedMenu};
pub use rational::Rational;
