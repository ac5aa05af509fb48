//! Dynamical reflection algebras: structure matrices, their consistency
//! relations, solution families, monodromy and transfer matrices.

pub mod consistency;
pub mod dyncore;
pub mod error;
pub mod linalg;
pub mod monodromy;
pub mod parametrize;
pub mod report;
pub mod scenarios;
pub mod solutions;
pub mod suites;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
pub use report::Report;
pub use scenarios::{Instance, Scenario};
pub use suites::{run_suites, RunOptions};
