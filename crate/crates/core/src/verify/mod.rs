//! Executable checks of the worked examples.

mod examples;
pub mod random;

pub use examples::{
    example1_run, example2_compression, example2_run, example2_sampled, single_user_compression_rate,
    z_channel_gds_pmf, z_channel_gds_slack, Example1Budget, ExampleReport, Verdict, VerifyError,
};
