#include "dqs/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dqs {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kOrthogonalityTol = 1e-10;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

void check_mode_index(int mode, int modes) {
    if (mode < 0 || mode >= modes) {
        std::ostringstream msg;
        msg << "mode index " << mode << " out of range for " << modes << " modes";
        throw std::out_of_range(msg.str());
    }
}

/// Expand an MxM mode matrix to the 2Mx2M symplectic acting identically on
/// the x and p quadratures of the interleaved ordering.
Eigen::MatrixXd expand_mode_matrix(const Eigen::MatrixXd& o) {
    const int m = static_cast<int>(o.rows());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            s(2 * i, 2 * j) = o(i, j);
            s(2 * i + 1, 2 * j + 1) = o(i, j);
        }
    }
    return s;
}

GaussianState transformed(const GaussianState& state, const Eigen::MatrixXd& s) {
    return GaussianState(s * state.mean(), symmetrized(s * state.cov() * s.transpose()));
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto dim = cov_.rows();
    if (dim == 0 || dim % 2 != 0 || cov_.cols() != dim) {
        throw std::invalid_argument("covariance must be a nonempty square 2Mx2M matrix");
    }
    if (mean_.size() != dim) {
        throw std::invalid_argument("mean length does not match covariance dimension");
    }
    const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
        std::ostringstream msg;
        msg << "covariance not symmetric (max deviation " << asym << ")";
        throw std::invalid_argument(msg.str());
    }
    cov_ = symmetrized(cov_);
    modes_ = static_cast<int>(dim / 2);
}

GaussianState GaussianState::vacuum(int modes) {
    if (modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
    return GaussianState(Eigen::VectorXd::Zero(2 * modes),
                         0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
}

std::vector<double> GaussianState::symplectic_eigenvalues() const {
    const Eigen::MatrixXd k = symplectic_form(modes_) * cov_;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(k, false);
    std::vector<double> nu;
    nu.reserve(modes_);
    for (int i = 0; i < k.rows(); ++i) {
        const double im = solver.eigenvalues()(i).imag();
        if (im > 0.0) {
            nu.push_back(im);
        }
    }
    // Degenerate (real-zero) pairs are theoretically impossible for a valid
    // covariance; guard by padding with the absolute eigenvalues if needed.
    while (static_cast<int>(nu.size()) < modes_) {
        nu.push_back(0.0);
    }
    std::sort(nu.begin(), nu.end());
    nu.resize(modes_);
    return nu;
}

bool GaussianState::satisfies_uncertainty(double tol) const {
    const auto nu = symplectic_eigenvalues();
    return nu.front() >= 0.5 - tol;
}

double GaussianState::purity_determinant() const {
    return (2.0 * cov_).determinant();
}

QuadraticObservable::QuadraticObservable(Eigen::MatrixXd matrix, double offset)
    : matrix_(std::move(matrix)), offset_(offset) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0) {
        throw std::invalid_argument("observable matrix must be square 2Mx2M");
    }
    const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
        throw std::invalid_argument("observable matrix must be symmetric");
    }
    matrix_ = symmetrized(matrix_);
}

QuadraticObservable QuadraticObservable::total_photon_number(int modes) {
    if (modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
    return QuadraticObservable(Eigen::MatrixXd::Identity(2 * modes, 2 * modes), 0.0);
}

QuadraticObservable QuadraticObservable::mode_intensity(int modes,
                                                        const std::vector<int>& which) {
    if (modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int mode : which) {
        check_mode_index(mode, modes);
        a(2 * mode, 2 * mode) = 1.0;
        a(2 * mode + 1, 2 * mode + 1) = 1.0;
    }
    return QuadraticObservable(a, 0.0);
}

Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int i = 0; i < modes; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    return omega;
}

GaussianState apply_squeeze(const GaussianState& state, int mode, double r,
                            double axis_phase) {
    check_mode_index(mode, state.modes());
    Eigen::Matrix2d block;
    block << std::exp(-r), 0.0, 0.0, std::exp(r);
    if (axis_phase != 0.0) {
        const double half = 0.5 * axis_phase;
        Eigen::Matrix2d rot;
        rot << std::cos(half), -std::sin(half), std::sin(half), std::cos(half);
        block = rot * block * rot.transpose();
    }
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * state.modes(), 2 * state.modes());
    s.block<2, 2>(2 * mode, 2 * mode) = block;
    return transformed(state, s);
}

GaussianState apply_displacement(const GaussianState& state, int mode, double dx,
                                 double dp) {
    check_mode_index(mode, state.modes());
    Eigen::VectorXd mean = state.mean();
    mean(2 * mode) += dx;
    mean(2 * mode + 1) += dp;
    return GaussianState(std::move(mean), state.cov());
}

GaussianState apply_orthogonal_network(const GaussianState& state,
                                       const Eigen::MatrixXd& network) {
    const int m = state.modes();
    if (network.rows() != m || network.cols() != m) {
        throw std::invalid_argument("network matrix dimension does not match mode count");
    }
    const double deviation =
        (network.transpose() * network - Eigen::MatrixXd::Identity(m, m))
            .cwiseAbs()
            .maxCoeff();
    if (deviation > kOrthogonalityTol) {
        std::ostringstream msg;
        msg << "network matrix is not orthogonal (max deviation " << deviation << ")";
        throw std::invalid_argument(msg.str());
    }
    return transformed(state, expand_mode_matrix(network));
}

GaussianState apply_loss(const GaussianState& state, const std::vector<int>& mode_set,
                         double eta) {
    if (eta < 0.0 || eta > 1.0) {
        throw std::domain_error("transmissivity must lie in [0, 1]");
    }
    const int m = state.modes();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(2 * m);
    Eigen::VectorXd added = Eigen::VectorXd::Zero(2 * m);
    const double root = std::sqrt(eta);
    for (int mode : mode_set) {
        check_mode_index(mode, m);
        scale(2 * mode) = root;
        scale(2 * mode + 1) = root;
        added(2 * mode) = 0.5 * (1.0 - eta);
        added(2 * mode + 1) = 0.5 * (1.0 - eta);
    }
    Eigen::VectorXd mean = scale.asDiagonal() * state.mean();
    Eigen::MatrixXd cov = scale.asDiagonal() * state.cov() * scale.asDiagonal();
    cov += added.asDiagonal().toDenseMatrix();
    return GaussianState(std::move(mean), symmetrized(cov));
}

GaussianState apply_loss(const GaussianState& state, double eta) {
    std::vector<int> all(state.modes());
    for (int i = 0; i < state.modes(); ++i) {
        all[i] = i;
    }
    return apply_loss(state, all, eta);
}

std::pair<double, double> photon_moments(const GaussianState& state,
                                         const QuadraticObservable& obs) {
    if (obs.dimension() != 2 * state.modes()) {
        throw std::invalid_argument("observable dimension does not match state");
    }
    const Eigen::MatrixXd& a = obs.matrix();
    const Eigen::MatrixXd& sigma = state.cov();
    const Eigen::VectorXd& mu = state.mean();

    const Eigen::MatrixXd as = a * sigma;
    const double mean = as.trace() + mu.dot(a * mu) + obs.offset();

    const Eigen::VectorXd amu = a * mu;
    const Eigen::MatrixXd aomega = a * symplectic_form(state.modes());
    const double variance = 2.0 * (as * as).trace() + 4.0 * amu.dot(sigma * amu) +
                            0.5 * (aomega * aomega).trace();
    return {mean, variance};
}

}  // namespace dqs
