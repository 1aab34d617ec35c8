//! Achievable secrecy rate regions for the fast-fading MISO Gaussian broadcast
//! channel with confidential messages, when the transmitter knows only the
//! channel statistics.
//!
//! The pipeline is: validated [`ChannelStats`] for both receivers, unit-rank
//! covariance selection per power split and encoding order, an inflation
//! factor for linearly assisted Gelfand-Pinsker coding, and Monte-Carlo
//! evaluation of the secrecy rate bounds. [`build_region`] sweeps the power
//! split and returns the convex frontier.

// `!(x >= lo)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod classifier;
pub mod config;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod region;
pub mod report;
pub mod sampling;

pub use channel::{ChannelStats, EncodingOrder, InflationFactor, Scenario, StopRule, TransmitCovariances, User};
pub use classifier::{classify, Classification, LowSnrDefiniteness, Verdict};
pub use config::{load_config, parse_config, RunConfig};
pub use error::{Error, Result};
pub use optimizer::{build_region, build_region_with, RegionResult};
pub use region::{RatePair, Scheme};
pub use sampling::{sample_channel, FadingBatch, ScenarioBatches};
