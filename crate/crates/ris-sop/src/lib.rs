//! Secrecy outage probability of RIS-aided multi-user wiretap links.
//!
//! Closed forms, adaptive quadrature, high-SNR floors and Monte Carlo for
//! single-user, suboptimal (SS), optimal (OS), best-pair and NOMA scheduling,
//! plus a decode-and-forward relay baseline.

pub mod analytic;
pub mod asymptotic;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod relay;
pub mod scheme;
pub mod special;

pub use analytic::{evaluate, sop_best_pair, sop_closed, sop_os, sop_quadrature, SopQuery, TermBreakdown};
pub use asymptotic::{floor_for, sop_os_hsnr, sop_single_hsnr, sop_ss_hsnr, AsymptoticFloor};
pub use channel::{clt_params, CltParams, EveMixture, ModelWarning};
pub use error::{Result, SopError};
pub use experiments::{run_sweep, SopCurve, SweepSpec};
pub use model::{derive_geometry, Geometry, LinkBudget, Scenario};
pub use montecarlo::{simulate_noma, simulate_relay, simulate_scheduling, ChannelMode, TrialBatch};
pub use relay::{crossover_n, sop_relay_for, Crossover};
pub use scheme::{Method, Scheme};
