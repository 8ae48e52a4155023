//! Monte Carlo laboratory for random walks in random sceneries.
//!
//! The library builds the pieces needed to measure, at desk scale, how the
//! complexity of a scenery-labelled walk grows with the observation window:
//! stable jump laws and their normalizing sequences ([`stable_laws`]), walk
//! paths and local times ([`walk`]), the hyperspace of closed sets with
//! dyadic approximations ([`hyperspace`]), i.i.d. sceneries ([`scenery`]),
//! the cylinder-cover and ball-count functionals with their sandwich
//! ([`complexity`]), and seeded experiment harnesses with reference
//! distributions ([`experiments`]).

pub mod complexity;
pub mod error;
pub mod experiments;
pub mod hyperspace;
pub mod oracle_suite;
pub mod rng;
pub mod scenery;
pub mod stable_laws;
pub mod walk;

pub use error::{Error, Result};
