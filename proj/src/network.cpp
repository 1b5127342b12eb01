#include "dqs/network.hpp"

#include <cmath>
#include <stdexcept>

namespace dqs {

Eigen::MatrixXd balanced_bsa_matrix(int modes) {
    if (modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
    const Eigen::VectorXd uniform =
        Eigen::VectorXd::Constant(modes, 1.0 / std::sqrt(static_cast<double>(modes)));
    // The Householder completion is symmetric, so its first column is uniform too.
    return weighted_network(uniform).matrix.transpose();
}

WeightedNetwork weighted_network(const Eigen::VectorXd& weights) {
    const int m = static_cast<int>(weights.size());
    if (m < 1) {
        throw std::invalid_argument("weight vector must be nonempty");
    }
    const double norm = weights.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("weight vector must be nonzero");
    }
    WeightedNetwork net;
    net.weights = weights / norm;

    Eigen::VectorXd v = -net.weights;
    v(0) += 1.0;  // e1 - w
    const double vnorm = v.norm();
    if (vnorm < 1e-12) {
        // w == e1: the reflection degenerates; the identity already has first row w.
        net.matrix = Eigen::MatrixXd::Identity(m, m);
        return net;
    }
    v /= vnorm;
    net.matrix = Eigen::MatrixXd::Identity(m, m) - 2.0 * v * v.transpose();
    return net;
}

}  // namespace dqs
