//! Independent reference values and randomized validation campaigns.
//!
//! The references deliberately avoid the accelerated evaluation path: the
//! branch-point value comes from the gamma-function closed form, inside the
//! disk from brute-force summation or the binomial closed form. Campaigns
//! sample random parameter boxes, compare each evaluation's claimed status
//! and error against the reference, and tally the four quality categories.

mod campaign;
mod loggamma;
mod sums;

pub use campaign::{
    classify, random_case, run_campaign, CampaignSpec, Category, OutcomeTally, RATIO_BIN_EDGES,
};
pub use loggamma::{
    complex_log_gamma, complex_log_gamma_extended, gauss_2f1_at_one, gauss_2f1_at_one_extended,
};
pub use sums::{closed_form_1f0, direct_sum};
