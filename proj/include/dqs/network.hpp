#pragma once

#include <Eigen/Dense>

namespace dqs {

/// Orthogonal MxM matrix whose first row equals the (normalized) weight
/// vector, so that routing per-mode x-displacements (x_1..x_M) through it
/// concentrates sum_i w_i x_i onto the first mode.
struct WeightedNetwork {
    Eigen::VectorXd weights;  // unit norm
    Eigen::MatrixXd matrix;   // first row == weights
};

/// Balanced M-mode splitter: orthogonal with uniform first column
/// (1/sqrt(M), ..., 1/sqrt(M))^T. Its transpose concentrates the uniform
/// displacement generator onto sqrt(M) times mode 1.
Eigen::MatrixXd balanced_bsa_matrix(int modes);

/// Completes a nonzero weight vector to a full orthogonal matrix with first
/// row w/||w||, via the Householder reflection mapping e1 to that row.
/// Deterministic; returns the identity when w is (numerically) e1.
WeightedNetwork weighted_network(const Eigen::VectorXd& weights);

}  // namespace dqs
