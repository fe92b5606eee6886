//! Bell expressions built from pairable stabilizers.

pub mod catalogue;
pub mod config;
pub mod construct;
pub mod expression;
pub mod selftest;

pub use catalogue::{catalogue, lookup, CatalogueEntry, Family};
pub use config::{validate_config, BellConfig};
pub use construct::{
    auto_expression, constant_ratio_config, constant_ratio_expression, find_suitable_ac, single_pair_expression,
};
pub use expression::{build_expression, BellExpression, ExpressionFile, Term};
pub use selftest::{
    counterexample_from_words, counterexample_state, is_selftesting, recover_graph, selftest_words, Counterexample,
    SelfTestStatus, SelfTestVerdict,
};
