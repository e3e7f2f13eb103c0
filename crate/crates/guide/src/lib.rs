//! Compiles and runs the Rust listings of the book as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/data_preparation.md")]
pub mod data_preparation {}

#[doc = include_str!("../../../book/src/kernels.md")]
pub mod kernels {}

#[doc = include_str!("../../../book/src/svdd.md")]
pub mod svdd {}

#[doc = include_str!("../../../book/src/relief.md")]
pub mod relief {}

#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/cli_workflow.md")]
pub mod cli_workflow {}
