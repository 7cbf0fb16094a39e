//! Quality-of-experience scheduling for coded caching over uneven wireless
//! links.
//!
//! Each multicast group `S` of `t+1` users may serve only its `j_S`
//! strongest users, trading descriptors delivered for transmission time.
//! [`solver`] picks the `j_S` that maximize the total descriptor count within
//! a time budget; [`codec`] checks that any such schedule decodes bit-exactly.

pub mod cli;
pub mod codec;
pub mod error;
pub mod harness;
pub mod model;
pub mod solver;
pub mod subsets;

pub use error::{Error, Result};
pub use model::{DeliveryProblem, Instance, MulticastGroup, Schedule};
pub use solver::{Algorithm, SolverReport};
