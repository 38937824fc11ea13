//! Person re-identification by tensor feature fusion and cross-view
//! multilinear subspace learning.
//!
//! * [`tensor`]: dense third-order tensors, unfoldings, mode products and projections.
//! * [`spectral`]: symmetric and generalized symmetric-definite eigensolvers.
//! * [`hdff`]: fusion of heterogeneous feature vectors into one third-order tensor.
//! * [`txqda`]: alternating per-mode discriminant learning over cross-view pairs.
//! * [`matching`]: cosine ranking and CMC curves.
//! * [`harness`]: repeated-split evaluation protocol and synthetic data.
//! * [`io`]: the on-disk formats used by the command-line tool.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod harness;
pub mod hdff;
pub mod io;
pub mod matching;
pub mod spectral;
pub mod tensor;
pub mod txqda;

pub use error::{Error, Result};
pub use harness::{
    generate_synthetic, run_experiment, split_trial, ExperimentConfig, ExperimentReport, SampleLabel, SyntheticSpec,
};
pub use hdff::{build_view_tensor, fuse, hdff_pipeline, split_to_sample_matrix, FeatureBlock, FusionConfig, Normalization};
pub use matching::{cmc, cosine, rank_k, score_and_rank, CmcCurve, RankingResult};
pub use spectral::{gen_eig, sym_eig, EigenPairs};
pub use tensor::{DenseMatrix, DenseTensor3};
pub use txqda::{fit, scatter_pair, solve_mode, transform, CrossViewSet, DimSpec, ProjectionSet, Target, TxqdaConfig};
