pub mod geometry;
pub mod harness;
pub mod percolation;
pub mod reconstruct;
pub mod seed;
pub mod sim;
