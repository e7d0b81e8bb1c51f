//! Stream sources: synthetic drift streams, STAGGER, CSV files, and the
//! prequential classification pipeline.

mod csv_stream;
mod naive_bayes;
mod prequential;
mod rng;
pub mod stagger;
mod synthetic;

pub use csv_stream::{read_csv_stream, Column, CsvStream};
pub use naive_bayes::NaiveBayes;
pub use prequential::{prequential_run, PrequentialOutcome, ResetPolicy};
pub use rng::SplitMix64;
pub use stagger::{stagger_stream, StaggerInstance};
pub use synthetic::{Distribution, GroundTruth, Segment, StreamSpec, Transition};
