pub mod adjacency;
pub mod complex;
pub mod dataset;
pub mod formats;
pub mod homology;
pub mod manifold;
pub mod rng;
pub mod samples;
pub mod subdivision;
