//! Converts categorical fingerprint-examination conclusions
//! ("identification", "inconclusive", "exclusion") into Bayes factors.
//!
//! Each examiner's responses to ground-truth-known mark/print pairs are
//! summarised in a [`CountTable`]. Beta-binomial models with either weighted
//! Jeffreys priors or leave-one-out informative priors turn those counts
//! into a Bayes factor for each response category.

pub mod calibration;
pub mod error;
pub mod io;
pub mod model;
pub mod numerics;
pub mod report;
pub mod sim;

pub use calibration::{
    fit_examiner, fit_uninformative, loo_group_fit, loo_informative_priors, mean_hypers,
    sequential_update, ExaminerModel, GroupDataset,
};
pub use error::{Error, Result};
pub use io::{aggregate, export_results, parse_records, Dataset, ExportFormat, RecordFormat, ResponseRecord};
pub use model::{
    bayes_factor, bayes_factor_set, expected_theta, likelihood_ratio, max_attainable_bf,
    posterior_set, posterior_update, sample_proportion, uninformative_priors, BayesFactorSet,
    BetaHyper, Cells, CountTable, ExtendedRatio, PosteriorSet, PriorMode, PriorSet,
    ResponseCategory, TruthLabel,
};
pub use numerics::{beta_pdf, density_curve, ln_gamma, posterior_mean_oracle, DensityCurve};
pub use report::{format_bf, log2_bf, swarm_data, ConversionTable, SwarmData};
pub use sim::{convergence_study, synthesize, ExaminerProfile, SimConfig};
