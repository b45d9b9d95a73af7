// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fault_sim;
pub mod llm_planner;
pub mod panel_budget;
pub mod report;
pub mod reproduce;
pub mod runs;
pub mod scenario;
pub mod silicon;
pub mod stowage;
pub mod thermal;
pub mod tradestudy;
