//! Daily-timestep simulation of shocks propagating through an industry-level
//! production network.
//!
//! [`econ`] turns an input-output table into a calibrated steady state,
//! [`shocks`] compiles lockdown scenarios into day-indexed schedules,
//! [`dynamics`] steps the economy forward under a choice of
//! [`production`] functions, and [`analysis`] compares runs with data and
//! sweeps over shocks and parameters. [`cli`] wires it all to config files.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod econ;
pub mod io;
pub mod production;
pub mod shocks;
pub mod toy;
