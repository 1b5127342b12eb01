#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "dqs/protocols.hpp"

namespace dqs {

/// Raised when a requested operation pushes population into the truncation
/// edge (leakage above 0.9 N_c exceeds the acceptance bound).
class CutoffInsufficientError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exact state in a truncated number basis, M in {1, 2}, per-mode cutoff N_c.
/// Pure states are kept as vectors; loss promotes to a density matrix.
/// All channels here are real in the number basis, so storage is real.
class FockState {
  public:
    static FockState vacuum(int modes, int cutoff);

    int modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return dim_; }
    bool is_pure() const { return pure_; }

    /// Density matrix (materialized from the vector for pure states).
    Eigen::MatrixXd density() const;

    double trace() const;

    /// Total population carried by basis states with any mode occupation
    /// above 0.9 N_c.
    double leakage() const;

    /// Diagonal of the density matrix over the full truncated basis.
    Eigen::VectorXd basis_populations() const;

    /// Occupation distribution of one mode (length N_c + 1).
    Eigen::VectorXd mode_populations(int mode) const;

  private:
    FockState(int modes, int cutoff);
    friend struct FockAccess;

    int modes_;
    int cutoff_;
    int dim_;
    bool pure_;
    Eigen::VectorXd psi_;
    Eigen::MatrixXd rho_;
};

/// S(r) = exp(r (a^2 - a^dag^2)/2); squeezes x for r > 0, the measurement OPA
/// is fock_squeeze(state, mode, -r_m). Built by exponentiating the generator
/// at cutoff + padding and projecting back.
FockState fock_squeeze(const FockState& state, int mode, double r);

/// D(x) = exp(-i p x): displaces the mode's x quadrature by x.
FockState fock_displace(const FockState& state, int mode, double x);

/// Pure-loss channel via the photon-subtraction Kraus family.
FockState fock_loss(const FockState& state, int mode, double eta);

/// Passive network x -> O x, p -> O p for a real orthogonal O (M <= 2);
/// factored into a parity and a number-conserving two-mode rotation.
FockState fock_apply_orthogonal(const FockState& state, const Eigen::MatrixXd& network);

struct FockMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// <O> and Delta^2 O for O = sum_{i in subset} (x_i^2 + p_i^2), built from the
/// number operator as 2 sum n_i + |subset| to avoid cutoff-edge artifacts.
FockMoments fock_expectation(const FockState& state);
FockMoments fock_expectation(const FockState& state, const std::vector<int>& subset);

/// Detector-side state of a sensing scenario in the truncated basis
/// (M <= 2; the weighted scheme is exercised through its network directly).
FockState fock_build_output_state(const SensingScenario& s, int cutoff);
FockState fock_build_output_state_at(const SensingScenario& s, int cutoff,
                                     double signal_value);

struct FockEvaluation {
    double mean = 0.0;
    double variance = 0.0;
    double derivative = 0.0;  // central difference along the signal direction
    double error = 0.0;       // variance / derivative^2
};

/// Ground-truth evaluation of a scenario: moments from the truncated basis,
/// derivative by central finite difference (h = fd_step).
FockEvaluation fock_evaluate(const SensingScenario& s, int cutoff,
                             double fd_step = 1e-4);

}  // namespace dqs
