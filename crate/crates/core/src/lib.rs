pub mod algebra;
pub mod catalog;
pub mod cohomology;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod multivector;
pub mod predict;
pub mod specseq;
