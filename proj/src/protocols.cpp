#include "dqs/protocols.hpp"

#include <cmath>
#include <utility>

#include "dqs/closed_form.hpp"
#include "dqs/network.hpp"

namespace dqs {

namespace {

double resolve_xm(const RefDisplacement& ref, double rm, double eta1) {
    if (ref.kind == RefDisplacement::Kind::Xm) {
        return ref.value;
    }
    return ref.value * std::exp(rm) * std::sqrt(eta1);
}

void base_validate(const SensingScenario& s) {
    if (s.modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
    if (s.probe_squeeze < 0.0 || s.opa_gain_param < 0.0) {
        throw std::invalid_argument("squeeze parameters must be nonnegative");
    }
    if (s.ref_displacement < 0.0) {
        throw std::invalid_argument("reference displacement must be nonnegative");
    }
    if (s.eta1 < 0.0 || s.eta1 > 1.0 || s.eta2 < 0.0 || s.eta2 > 1.0) {
        throw std::domain_error("transmissivities must lie in [0, 1]");
    }
}

std::vector<int> all_modes(int modes) {
    std::vector<int> out(modes);
    for (int i = 0; i < modes; ++i) {
        out[i] = i;
    }
    return out;
}

}  // namespace

Eigen::VectorXd signal_displacements(const SensingScenario& s, double t) {
    Eigen::VectorXd d(s.modes);
    switch (s.scheme) {
        case Scheme::SingleMode:
            d(0) = t;
            break;
        case Scheme::Scheme1: {
            const double root = std::sqrt(static_cast<double>(s.modes));
            d.setConstant(s.signal / root + (t - s.signal));
            break;
        }
        case Scheme::Scheme2:
            d.setConstant(t);
            break;
        case Scheme::Weighted:
            d = s.per_mode_signals + (t - s.signal) * s.weights;
            break;
    }
    return d;
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::SingleMode: return "single";
        case Scheme::Scheme1: return "scheme1";
        case Scheme::Scheme2: return "scheme2";
        case Scheme::Weighted: return "weighted";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "single" || name == "single_mode") return Scheme::SingleMode;
    if (name == "scheme1") return Scheme::Scheme1;
    if (name == "scheme2") return Scheme::Scheme2;
    if (name == "weighted") return Scheme::Weighted;
    throw std::invalid_argument("unknown scheme: " + name);
}

double SensingScenario::x0() const {
    return ref_displacement * std::exp(-opa_gain_param) / std::sqrt(eta1);
}

double SensingScenario::gain_db() const {
    return closed_form::rm_to_gain_db(opa_gain_param);
}

void SensingScenario::validate() const {
    base_validate(*this);
    if (scheme == Scheme::SingleMode && modes != 1) {
        throw std::invalid_argument("single-mode scenario must have one mode");
    }
    if (scheme == Scheme::Weighted) {
        if (weights.size() != modes || per_mode_signals.size() != modes) {
            throw std::invalid_argument(
                "weighted scenario needs weights and per-mode signals of length M");
        }
        if (std::abs(weights.norm() - 1.0) > 1e-10) {
            throw std::invalid_argument("weight vector must have unit norm");
        }
    }
}

RefDisplacement ref_xm(double xm) {
    return RefDisplacement{RefDisplacement::Kind::Xm, xm};
}

RefDisplacement ref_x0(double x0) {
    return RefDisplacement{RefDisplacement::Kind::X0, x0};
}

SensingScenario make_single_mode(double r, double rm, double x, RefDisplacement ref,
                                 double eta1, double eta2) {
    SensingScenario s;
    s.scheme = Scheme::SingleMode;
    s.modes = 1;
    s.probe_squeeze = r;
    s.opa_gain_param = rm;
    s.signal = x;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.ref_displacement = resolve_xm(ref, rm, eta1);
    s.validate();
    return s;
}

SensingScenario make_scheme1(int modes, double r, double rm, double x,
                             RefDisplacement ref, double eta1, double eta2) {
    SensingScenario s;
    s.scheme = Scheme::Scheme1;
    s.modes = modes;
    s.probe_squeeze = r;
    s.opa_gain_param = rm;
    s.signal = x;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.ref_displacement = resolve_xm(ref, rm, eta1);
    s.validate();
    return s;
}

SensingScenario make_scheme2(int modes, double r, double rm, double x,
                             RefDisplacement ref, double eta1, double eta2) {
    SensingScenario s;
    s.scheme = Scheme::Scheme2;
    s.modes = modes;
    s.probe_squeeze = r;
    s.opa_gain_param = rm;
    s.signal = x;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.ref_displacement = resolve_xm(ref, rm, eta1);
    s.validate();
    return s;
}

SensingScenario make_weighted(const Eigen::VectorXd& weights,
                              const Eigen::VectorXd& per_mode_signals, double r,
                              double rm, RefDisplacement ref, double eta1,
                              double eta2) {
    SensingScenario s;
    s.scheme = Scheme::Weighted;
    s.modes = static_cast<int>(weights.size());
    s.probe_squeeze = r;
    s.opa_gain_param = rm;
    const Eigen::VectorXd w = weighted_network(weights).weights;
    s.weights = w;
    s.per_mode_signals = per_mode_signals;
    s.signal = w.dot(per_mode_signals);
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.ref_displacement = resolve_xm(ref, rm, eta1);
    s.validate();
    return s;
}

GaussianState build_output_state_at(const SensingScenario& s, double signal_value) {
    s.validate();
    GaussianState state = GaussianState::vacuum(s.modes);
    state = apply_squeeze(state, 0, s.probe_squeeze);

    Eigen::MatrixXd spread;  // mode matrix applied before encoding
    switch (s.scheme) {
        case Scheme::SingleMode:
            break;
        case Scheme::Scheme1:
        case Scheme::Scheme2:
            spread = balanced_bsa_matrix(s.modes);
            break;
        case Scheme::Weighted:
            spread = weighted_network(s.weights).matrix.transpose();
            break;
    }
    if (spread.size() > 0) {
        state = apply_orthogonal_network(state, spread);
    }

    const Eigen::VectorXd dx = signal_displacements(s, signal_value);
    for (int i = 0; i < s.modes; ++i) {
        state = apply_displacement(state, i, dx(i));
    }

    state = apply_loss(state, all_modes(s.modes), s.eta1);

    if (s.scheme == Scheme::Scheme1 || s.scheme == Scheme::Weighted) {
        state = apply_orthogonal_network(state, spread.transpose());
    }

    const bool per_mode = s.scheme == Scheme::Scheme2;
    const int detected = per_mode ? s.modes : 1;
    for (int i = 0; i < detected; ++i) {
        state = apply_squeeze(state, i, -s.opa_gain_param);
    }
    for (int i = 0; i < detected; ++i) {
        state = apply_displacement(state, i, s.ref_displacement);
    }
    std::vector<int> detected_set(detected);
    for (int i = 0; i < detected; ++i) {
        detected_set[i] = i;
    }
    state = apply_loss(state, detected_set, s.eta2);
    return state;
}

GaussianState build_output_state(const SensingScenario& s) {
    return build_output_state_at(s, s.signal);
}

int detected_mode_count(const SensingScenario& s) {
    return s.scheme == Scheme::Scheme2 ? s.modes : 1;
}

QuadraticObservable measured_observable(const SensingScenario& s) {
    if (s.scheme == Scheme::Scheme2) {
        return QuadraticObservable::total_photon_number(s.modes);
    }
    return QuadraticObservable::mode_intensity(s.modes, {0});
}

Eigen::VectorXd signal_direction(const SensingScenario& s) {
    // The mean map is affine in the signal, so one unit step is exact.
    const GaussianState lo = build_output_state_at(s, s.signal - 0.5);
    const GaussianState hi = build_output_state_at(s, s.signal + 0.5);
    return hi.mean() - lo.mean();
}

SensitivityReport evaluate(const SensingScenario& s, OptimalConvention convention) {
    s.validate();
    const GaussianState state = build_output_state(s);
    const QuadraticObservable obs = measured_observable(s);
    const auto [mean, variance] = photon_moments(state, obs);

    const Eigen::VectorXd v = signal_direction(s);
    const double derivative = 2.0 * v.dot(obs.matrix() * state.mean());
    if (std::abs(derivative) < 1e-300 ||
        !std::isfinite(variance / (derivative * derivative))) {
        throw DegenerateScenarioError(
            "signal derivative vanishes (x + x0 = 0 sign-ambiguity point)");
    }

    SensitivityReport rep;
    rep.first_moment = mean;
    rep.variance = variance;
    rep.derivative = derivative;
    rep.error_engine = variance / (derivative * derivative);
    rep.mean_photons = 0.5 * (mean - detected_mode_count(s));

    const double r = s.probe_squeeze;
    const double rm = s.opa_gain_param;
    const double x = s.signal;
    const double xm = s.ref_displacement;
    switch (s.scheme) {
        case Scheme::SingleMode:
            rep.error_closed_form =
                closed_form::single_mode_lossy(r, rm, x, xm, s.eta1, s.eta2);
            break;
        case Scheme::Scheme1:
            rep.error_closed_form =
                closed_form::scheme1_lossy(r, rm, x, xm, s.modes, s.eta1, s.eta2);
            break;
        case Scheme::Scheme2:
            rep.error_closed_form =
                closed_form::scheme2_lossy(r, rm, x, xm, s.modes, s.eta1, s.eta2);
            break;
        case Scheme::Weighted:
            // Reduction to the single-mode formula at x* = w . x_vec.
            rep.error_closed_form =
                closed_form::single_mode_lossy(r, rm, x, xm, s.eta1, s.eta2);
            break;
    }

    rep.optimal_lossless = closed_form::optimal_bound(r, s.modes);
    rep.optimal_lossy = closed_form::optimal_bound(r, s.modes, s.eta1);
    rep.optimal = convention == OptimalConvention::Lossless ? rep.optimal_lossless
                                                            : rep.optimal_lossy;
    rep.ratio = rep.error_engine / rep.optimal;
    return rep;
}

Eigen::MatrixXd loss_surface(const SensingScenario& s, const Eigen::VectorXd& eta1_grid,
                             const Eigen::VectorXd& eta2_grid) {
    s.validate();
    const double x0 = s.x0();
    Eigen::MatrixXd ratios(eta1_grid.size(), eta2_grid.size());
    for (Eigen::Index i = 0; i < eta1_grid.size(); ++i) {
        for (Eigen::Index j = 0; j < eta2_grid.size(); ++j) {
            SensingScenario point = s;
            point.eta1 = eta1_grid(i);
            point.eta2 = eta2_grid(j);
            point.ref_displacement =
                x0 * std::exp(s.opa_gain_param) * std::sqrt(point.eta1);
            ratios(i, j) = evaluate(point, OptimalConvention::LossyEta1).ratio;
        }
    }
    return ratios;
}

WeightedCheck weighted_estimate_check(const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& per_mode_signals, double r,
                                      double rm, double xm) {
    WeightedCheck out;
    const SensingScenario weighted =
        make_weighted(weights, per_mode_signals, r, rm, ref_xm(xm));
    out.x_star = weighted.signal;
    out.weighted = evaluate(weighted);
    const SensingScenario single = make_single_mode(r, rm, out.x_star, ref_xm(xm));
    out.single_equivalent = evaluate(single);
    return out;
}

}  // namespace dqs
