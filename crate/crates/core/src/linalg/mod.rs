//! Dense kernels on sample covariance and Gram matrices.

mod cholesky;
mod covariance;
mod jacobi;
mod matrix;
mod partition;
mod projection;

pub use cholesky::{cholesky, log_det_cholesky};
pub use covariance::{extract_block, sample_covariance, scatter_matrix};
pub use jacobi::{
    compound_symmetry, compound_symmetry_sqrt, symmetric_eigen, symmetric_sqrt, SymmetricEigen,
};
pub use matrix::{DataMatrix, SymmetricMatrix};
pub use partition::BlockPartition;
pub use projection::{log_det_incremental, projection_quad_forms};

pub(crate) use covariance::compensated_sum;
pub(crate) use jacobi::compound_symmetry_root_coefficients;
pub(crate) use projection::quad_forms_column_major;
