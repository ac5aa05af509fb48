//! Scenario catalog, file format, expression language and sampler.

pub mod catalog;
pub mod expr;
pub mod sampler;
pub mod scenario;

pub use catalog::{builtin, builtin_scenario, Overrides, BUILTINS};
pub use expr::{EvalContext, Expr};
pub use sampler::{sample_points, SampleShape, SamplerConfig};
pub use scenario::{
    locality_preset, reshetikhin_yangian, yangian, AutoSpec, Cx, Instance, MatrixSpec,
    QuantumSpectral, RSpec, Scenario, SUITES,
};
