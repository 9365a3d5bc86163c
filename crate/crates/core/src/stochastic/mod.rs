//! Reproducible sampling of scalar laws and structured random vectors.

mod batch;
mod model;
pub mod rng;

pub use batch::{
    norm_of, read_batch, sample_norms, sample_projections, sample_scalar, sample_vector, write_batch,
    Projections, SampleBatch,
};
pub use model::{ModelSpec, NormTag, RandomVectorModel, ScalarDist, ScaleFn};
