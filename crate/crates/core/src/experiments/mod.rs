//! Example generators and the sweeps built on them.

pub mod examples;
pub mod random;
pub mod rng;
pub mod sweeps;

pub use examples::{
    gen_example, gen_gaussian_perturbation, gen_unit_perturbation, ExampleFacts, ExampleSpec, GeneratedExample,
};
pub use random::{gen_random_case, RandomCase, RandomCaseParams};
pub use rng::SplabRng;
pub use sweeps::{
    run_special_perturbation_suite, run_table1_sweep, run_tightness_sweep, run_v2_necessity, SweepResult, SweepRow,
};
