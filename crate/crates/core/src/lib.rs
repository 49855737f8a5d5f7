//! Outage analysis of a UAV-served downlink semi-grant-free NOMA system.
//!
//! A UAV serves a grant-based user `D_B` and opportunistically admits a
//! grant-free user `D_F` on the same resource block. The GF user's outage
//! probability is evaluated two ways:
//!
//! * closed forms ([`analytic`]) for fixed power allocation (FPA) and
//!   dynamic power allocation (DPA), exact and high-SNR asymptotic;
//! * seeded Monte Carlo ([`montecarlo`]) that executes the decision logic of
//!   [`scheme`] on gains drawn from the air-to-ground model in [`channel`].
//!
//! The crate is `no_std` (it needs `alloc`); IO, configuration and parallel
//! drivers live in the companion `aerial-noma` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod channel;
mod error;
mod math;
pub mod montecarlo;
pub mod quadrature;
pub mod scenario;
pub mod scheme;
pub mod special;

pub use error::{Error, Result};
pub use scenario::{Scenario, SystemParams};
