//! End-to-end uses of the bounds: rank-weighted (trimmed) K-means with a
//! uniform certificate, and selection of a linear ranker by the smoothed
//! Wilcoxon statistic with a lower confidence bound on its AUC.

mod clustering;
mod ranking;
pub mod synthetic;

pub use clustering::{
    center_recovery_error, clustering_certificate, kmeans, trimmed_kmeans, weighted_rank_kmeans, ClusteringResult,
    KMeansOptions,
};
pub use ranking::{held_out_auc, linear_rankers, select_ranker, RankingSelection};
