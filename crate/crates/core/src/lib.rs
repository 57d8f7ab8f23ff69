//! Achievable rates of k-hop myopic and omniscient decode-forward.
//!
//! * [`channel`]: geometry, path loss and power bookkeeping.
//! * [`gaussian_df`]: reception rates on the Gaussian multiple-relay channel.
//! * [`discrete_df`]: exact mutual-information rates on small discrete channels.
//! * [`optimizer`]: max-min search over power splits, routes and spacings.
//! * [`marc`], [`brc`]: four-node multiple-access and broadcast relay channels.
//! * [`asymptotics`]: large-network interference bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod brc;
pub mod channel;
pub mod discrete_df;
pub mod error;
pub mod gaussian_df;
pub mod marc;
pub mod optimizer;

pub use asymptotics::{interference_bound, large_t_report, zeta, ChainSplits, LargeTReport, ZetaValue};
pub use brc::{brc_omniscient_common_rate, brc_onehop_common_rate, brc_optimize, BrcConfig, BrcOptimum, BrcRates};
pub use channel::{gain, received_power, NetworkGeometry, PowerConfig, PropagationModel};
pub use discrete_df::{
    khop_dmc_rate, mutual_information, onehop_dmc_rate, DiscreteRateReport, DmcChannel, Encoder,
    FactorizedInput, JointPmf,
};
pub use error::{Error, Result};
pub use gaussian_df::{
    carrier_layout, efficiency, point_to_point_rate, CombiningMode, Efficiency,
    GaussianRelayNetwork, Permutation, RateReport, ReceptionRecord, SplitMatrix, Strategy,
};
pub use marc::{
    marc_omniscient_sumrate, marc_onehop_sumrate, marc_optimize, MarcConfig, MarcOptimum, MarcRates,
    MarcSearch, MarcStrategy,
};
pub use optimizer::{
    optimize_permutation, optimize_spacing, optimize_splits, optimize_views, OptimizerConfig,
    OptimumResult,
};
