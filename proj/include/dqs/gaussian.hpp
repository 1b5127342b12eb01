#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace dqs {

/// M-mode Gaussian state: mean vector and covariance matrix over the
/// quadratures (x1, p1, x2, p2, ...). Vacuum variance is 1/2 per quadrature.
///
/// States are immutable values; every channel returns a new state.
class GaussianState {
  public:
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    static GaussianState vacuum(int modes);

    int modes() const { return modes_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    /// Symplectic spectrum of the covariance matrix (M values, ascending).
    std::vector<double> symplectic_eigenvalues() const;

    /// Uncertainty relation: every symplectic eigenvalue >= 1/2 - tol.
    /// Opt-in check, not run by the channel operations.
    bool satisfies_uncertainty(double tol = 1e-9) const;

    /// det(2*cov); equals 1 for pure states, grows under loss.
    double purity_determinant() const;

  private:
    int modes_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// Observable O = R^T A R + c with A real symmetric over the quadratures.
class QuadraticObservable {
  public:
    QuadraticObservable(Eigen::MatrixXd matrix, double offset);

    /// O = sum_i (x_i^2 + p_i^2) = 2 sum_i n_i + M, i.e. A = I, c = 0.
    static QuadraticObservable total_photon_number(int modes);

    /// Same observable restricted to a subset of modes.
    static QuadraticObservable mode_intensity(int modes, const std::vector<int>& which);

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    double offset() const { return offset_; }
    int dimension() const { return static_cast<int>(matrix_.rows()); }

  private:
    Eigen::MatrixXd matrix_;
    double offset_;
};

/// Block-diagonal symplectic form, per-mode [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int modes);

/// Single-mode squeezing along the axis selected by `axis_phase`.
/// At axis_phase = 0 and r > 0: x -> x e^{-r}, p -> p e^{+r}.
/// The measurement OPA with gain G = e^{2 r_m} is apply_squeeze(s, m, -r_m, 0).
GaussianState apply_squeeze(const GaussianState& state, int mode, double r,
                            double axis_phase = 0.0);

/// Phase-space displacement of one mode; covariance unchanged.
GaussianState apply_displacement(const GaussianState& state, int mode, double dx,
                                 double dp = 0.0);

/// Passive network acting as x -> O x, p -> O p with O real orthogonal MxM.
GaussianState apply_orthogonal_network(const GaussianState& state,
                                       const Eigen::MatrixXd& network);

/// Pure-loss channel with transmissivity eta on the selected modes.
GaussianState apply_loss(const GaussianState& state, const std::vector<int>& mode_set,
                         double eta);

/// Loss on every mode.
GaussianState apply_loss(const GaussianState& state, double eta);

/// Exact quantum mean and variance of a quadratic observable in a Gaussian
/// state:
///   mean = tr(A Sigma) + mu^T A mu + c
///   var  = 2 tr((A Sigma)^2) + 4 mu^T A Sigma A mu + (1/2) tr((A Omega)^2)
/// The last term is the operator-ordering correction; it equals -M for A = I.
std::pair<double, double> photon_moments(const GaussianState& state,
                                         const QuadraticObservable& obs);

}  // namespace dqs
