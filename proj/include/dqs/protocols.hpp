#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

#include "dqs/gaussian.hpp"

namespace dqs {

enum class Scheme { SingleMode, Scheme1, Scheme2, Weighted };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Thrown when the signal derivative vanishes (the +-x ambiguity point).
class DegenerateScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Which optimum the ratio column is taken against.
enum class OptimalConvention { Lossless, LossyEta1 };

/// Full parameterization of one sensing experiment.
///
/// The reference displacement is stored canonically as x_m; when a scenario is
/// built from the gain-scaled form x0, the conversion x_m = x0 e^{r_m} sqrt(eta1)
/// is applied (which reduces to x_m = sqrt(G) x0 without loss).
///
/// Scheme conventions for the signal x:
///  - SingleMode: x displaces the single mode.
///  - Scheme1: x is the displacement carried by the recombined mode; the
///    estimation derivative is taken along the physical identical-displacement
///    direction of all M modes, so the error is the single-mode error / M.
///  - Scheme2: every mode is displaced by x.
///  - Weighted: the per-mode displacements are given; x is the weighted
///    combination sum_i w_i x_i and the derivative direction is w.
struct SensingScenario {
    Scheme scheme = Scheme::SingleMode;
    int modes = 1;
    double probe_squeeze = 0.0;    // r
    double opa_gain_param = 0.0;   // r_m, G = e^{2 r_m}
    double signal = 0.0;           // x
    double ref_displacement = 0.0; // x_m (canonical)
    double eta1 = 1.0;
    double eta2 = 1.0;
    Eigen::VectorXd weights;          // Weighted only
    Eigen::VectorXd per_mode_signals; // Weighted only

    /// Gain-scaled reference displacement x0 = x_m e^{-r_m} / sqrt(eta1).
    double x0() const;
    double gain_db() const;

    void validate() const;
};

/// Reference displacement argument: either x_m directly or the gain-scaled x0.
struct RefDisplacement {
    enum class Kind { Xm, X0 };
    Kind kind;
    double value;
};
RefDisplacement ref_xm(double xm);
RefDisplacement ref_x0(double x0);

SensingScenario make_single_mode(double r, double rm, double x, RefDisplacement ref,
                                 double eta1 = 1.0, double eta2 = 1.0);
SensingScenario make_scheme1(int modes, double r, double rm, double x,
                             RefDisplacement ref, double eta1 = 1.0, double eta2 = 1.0);
SensingScenario make_scheme2(int modes, double r, double rm, double x,
                             RefDisplacement ref, double eta1 = 1.0, double eta2 = 1.0);
SensingScenario make_weighted(const Eigen::VectorXd& weights,
                              const Eigen::VectorXd& per_mode_signals, double r,
                              double rm, RefDisplacement ref, double eta1 = 1.0,
                              double eta2 = 1.0);

/// Estimation error by every computation route plus the optimum.
struct SensitivityReport {
    double error_engine = 0.0;
    std::optional<double> error_closed_form;
    double optimal = 0.0;  // per the requested convention
    double ratio = 0.0;    // error_engine / optimal
    double optimal_lossless = 0.0;
    double optimal_lossy = 0.0;
    double mean_photons = 0.0;  // <sum n_i> over the detected modes
    double first_moment = 0.0;  // <O>
    double variance = 0.0;      // Delta^2 O
    double derivative = 0.0;    // d<O>/dx
};

/// State at the detector for the scenario's signal value.
GaussianState build_output_state(const SensingScenario& s);

/// State at the detector with the signal moved to `signal_value` along the
/// scenario's signal direction (used for derivative checks).
GaussianState build_output_state_at(const SensingScenario& s, double signal_value);

/// The observable actually measured (mode 1, or all modes for scheme 2).
QuadraticObservable measured_observable(const SensingScenario& s);
int detected_mode_count(const SensingScenario& s);

/// Image of the unit signal shift at the detector: mu(x) = mu0 + x * v.
Eigen::VectorXd signal_direction(const SensingScenario& s);

/// Per-mode x displacements encoding signal value t (the family along which
/// the estimation derivative is taken).
Eigen::VectorXd signal_displacements(const SensingScenario& s, double t);

SensitivityReport evaluate(const SensingScenario& s,
                           OptimalConvention convention = OptimalConvention::Lossless);

/// ratio(eta1, eta2) = error(eta1, eta2) / optimal_bound(r, M, eta1), with the
/// reference displacement re-derived from the scenario's x0 at each eta1.
Eigen::MatrixXd loss_surface(const SensingScenario& s, const Eigen::VectorXd& eta1_grid,
                             const Eigen::VectorXd& eta2_grid);

/// Runs the weighted pipeline and the single-mode pipeline at x* = w . x and
/// returns both reports (their engine errors agree).
struct WeightedCheck {
    SensitivityReport weighted;
    SensitivityReport single_equivalent;
    double x_star = 0.0;
};
WeightedCheck weighted_estimate_check(const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& per_mode_signals, double r,
                                      double rm, double xm);

}  // namespace dqs
