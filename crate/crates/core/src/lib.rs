//! Monte Carlo system-level simulator for millimeter-wave cellular
//! deployments.
//!
//! The question the tool answers: at a given base-station density, carrier
//! frequency, and antenna configuration, is the typical downlink receiver
//! limited by thermal noise or by other-cell interference? It samples
//! Poisson deployments around a typical receiver at the origin, draws
//! three-state (LoS/NLoS/outage) links with measurement-derived pathloss and
//! cluster channel statistics, beamforms with full lobe-shaped planar-array
//! patterns, and aggregates per-drop INR and SINR into empirical
//! distributions.
//!
//! Module map:
//! - [`params`]: configuration and channel tables, noise budget
//! - [`deployment`]: PPP sampling on the evaluation disc
//! - [`channel`]: link states, pathloss, cluster/subpath channel matrices
//! - [`beamforming`]: UPA responses, steering, beamforming gain
//! - [`network`]: association, blind scheduling, SINR/INR link budgets
//! - [`engine`]: campaign driver, ECDFs, percentiles, regime classification
//! - [`report`]: frozen CSV/JSON output formats and plot scripts
//! - [`cli`]: the `mmwsim` command-line interface

// validation uses `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod cli;
pub mod deployment;
pub mod engine;
pub mod linalg;
pub mod network;
pub mod params;
pub mod report;

pub use engine::{run_campaign, run_iteration, CampaignResult, Ecdf, IterationResult, Regime};
pub use params::{ChannelParams, ScenarioConfig, SimConfig};
