//! Exact computation of F∞-manifold data for finite-dimensional
//! differential graded algebras given by structure constants.

pub mod exactq;
pub mod graded;
pub mod algebras;
pub mod master;
pub mod splitting;
pub mod corpus;
pub mod transfer;
pub mod hochschild;
pub mod tangent;
pub mod schema;
pub mod cli;
