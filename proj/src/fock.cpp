#include "dqs/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

#include "dqs/network.hpp"

namespace dqs {

/// Channel implementations live outside the class; this grants them access
/// to the raw vector/density storage.
struct FockAccess {
    static Eigen::VectorXd& psi(FockState& s) { return s.psi_; }
    static Eigen::MatrixXd& rho(FockState& s) { return s.rho_; }
    static bool& pure(FockState& s) { return s.pure_; }
};

namespace {

constexpr int kGeneratorPad = 10;
constexpr double kLeakageBound = 1e-8;

Eigen::MatrixXd annihilation_matrix(int dim) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

/// exp of the generator at cutoff + padding, projected back to the cutoff.
Eigen::MatrixXd padded_exp(const Eigen::MatrixXd& generator, int keep) {
    const Eigen::MatrixXd u = generator.exp();
    return u.topLeftCorner(keep, keep);
}

Eigen::MatrixXd squeeze_unitary(int keep, double r) {
    const int dim = keep + kGeneratorPad;
    const Eigen::MatrixXd a = annihilation_matrix(dim);
    const Eigen::MatrixXd gen = 0.5 * r * (a * a - (a * a).transpose());
    return padded_exp(gen, keep);
}

Eigen::MatrixXd displace_unitary(int keep, double x) {
    const int dim = keep + kGeneratorPad;
    const Eigen::MatrixXd a = annihilation_matrix(dim);
    const Eigen::MatrixXd gen = (x / std::sqrt(2.0)) * (a.transpose() - a);
    return padded_exp(gen, keep);
}

void check_mode(int mode, int modes) {
    if (mode < 0 || mode >= modes) {
        throw std::out_of_range("mode index out of range");
    }
}

/// out = (op acting on `mode`) * m, with flat index n1*d + n2 (mode 0 major).
Eigen::MatrixXd mode_left_apply(const Eigen::MatrixXd& op, const Eigen::MatrixXd& m,
                                int mode, int modes, int d) {
    if (modes == 1) {
        return op * m;
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    if (mode == 0) {
        for (int i = 0; i < d; ++i) {
            for (int k = 0; k < d; ++k) {
                if (op(i, k) != 0.0) {
                    out.middleRows(i * d, d).noalias() +=
                        op(i, k) * m.middleRows(k * d, d);
                }
            }
        }
    } else {
        for (int b = 0; b < d; ++b) {
            out.middleRows(b * d, d).noalias() = op * m.middleRows(b * d, d);
        }
    }
    return out;
}

Eigen::VectorXd mode_left_apply_vec(const Eigen::MatrixXd& op, const Eigen::VectorXd& v,
                                    int mode, int modes, int d) {
    if (modes == 1) {
        return op * v;
    }
    // View the vector as a d x d matrix: column index = mode-0 occupation.
    Eigen::Map<const Eigen::MatrixXd> view(v.data(), d, d);
    Eigen::VectorXd out(v.size());
    Eigen::Map<Eigen::MatrixXd> oview(out.data(), d, d);
    if (mode == 0) {
        oview = view * op.transpose();
    } else {
        oview = op * view;
    }
    return out;
}

/// Number-conserving two-mode rotation exp(theta (a1^dag a2 - a1 a2^dag)),
/// exponentiated exactly within each total-photon sector.
struct SectorRotation {
    std::vector<std::vector<int>> indices;  // flat basis indices per sector
    std::vector<Eigen::MatrixXd> blocks;

    void apply(Eigen::VectorXd& v, bool transpose) const {
        for (size_t s = 0; s < indices.size(); ++s) {
            const auto& idx = indices[s];
            Eigen::VectorXd local(idx.size());
            for (size_t i = 0; i < idx.size(); ++i) {
                local(static_cast<Eigen::Index>(i)) = v(idx[i]);
            }
            local = transpose ? (blocks[s].transpose() * local).eval()
                              : (blocks[s] * local).eval();
            for (size_t i = 0; i < idx.size(); ++i) {
                v(idx[i]) = local(static_cast<Eigen::Index>(i));
            }
        }
    }
};

SectorRotation build_sector_rotation(int cutoff, double theta) {
    const int d = cutoff + 1;
    SectorRotation rot;
    for (int total = 1; total <= 2 * cutoff; ++total) {
        const int kmin = std::max(0, total - cutoff);
        const int kmax = std::min(total, cutoff);
        const int len = kmax - kmin + 1;
        if (len < 2) {
            continue;
        }
        std::vector<int> idx(len);
        for (int k = kmin; k <= kmax; ++k) {
            idx[k - kmin] = k * d + (total - k);
        }
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(len, len);
        for (int k = kmin; k < kmax; ++k) {
            const double coupling =
                theta * std::sqrt(static_cast<double>((k + 1) * (total - k)));
            gen(k + 1 - kmin, k - kmin) = coupling;
            gen(k - kmin, k + 1 - kmin) = -coupling;
        }
        rot.indices.push_back(std::move(idx));
        rot.blocks.push_back(gen.exp());
    }
    return rot;
}

void sector_apply_matrix(const SectorRotation& rot, Eigen::MatrixXd& m,
                         bool transpose) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::VectorXd col = m.col(c);
        rot.apply(col, transpose);
        m.col(c) = col;
    }
}

}  // namespace

FockState::FockState(int modes, int cutoff)
    : modes_(modes), cutoff_(cutoff), pure_(true) {
    if (modes < 1 || modes > 2) {
        throw std::invalid_argument("truncated-basis states support 1 or 2 modes");
    }
    if (cutoff < 2) {
        throw std::invalid_argument("cutoff must be >= 2");
    }
    dim_ = modes == 1 ? cutoff + 1 : (cutoff + 1) * (cutoff + 1);
}

FockState FockState::vacuum(int modes, int cutoff) {
    FockState s(modes, cutoff);
    s.psi_ = Eigen::VectorXd::Zero(s.dim_);
    s.psi_(0) = 1.0;
    return s;
}

Eigen::MatrixXd FockState::density() const {
    if (pure_) {
        return psi_ * psi_.transpose();
    }
    return rho_;
}

double FockState::trace() const {
    return pure_ ? psi_.squaredNorm() : rho_.trace();
}

Eigen::VectorXd FockState::basis_populations() const {
    if (pure_) {
        return psi_.cwiseProduct(psi_);
    }
    return rho_.diagonal();
}

Eigen::VectorXd FockState::mode_populations(int mode) const {
    check_mode(mode, modes_);
    const int d = cutoff_ + 1;
    const Eigen::VectorXd basis = basis_populations();
    Eigen::VectorXd pops = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < dim_; ++i) {
        const int n = modes_ == 1 ? i : (mode == 0 ? i / d : i % d);
        pops(n) += basis(i);
    }
    return pops;
}

double FockState::leakage() const {
    const int d = cutoff_ + 1;
    const double edge = 0.9 * cutoff_;
    const Eigen::VectorXd basis = basis_populations();
    double total = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const int n1 = modes_ == 1 ? i : i / d;
        const int n2 = modes_ == 1 ? 0 : i % d;
        if (n1 > edge || n2 > edge) {
            total += basis(i);
        }
    }
    return total;
}

namespace {

void check_leakage(const FockState& s, const char* op) {
    const double leak = s.leakage();
    if (leak > kLeakageBound) {
        std::ostringstream msg;
        msg << "cutoff insufficient after " << op << ": leakage " << leak
            << " above 0.9 N_c (bound " << kLeakageBound << ")";
        throw CutoffInsufficientError(msg.str());
    }
}

FockState apply_single_mode_unitary(const FockState& state, int mode,
                                    const Eigen::MatrixXd& u, const char* op) {
    FockState out = state;
    const int d = state.cutoff() + 1;
    if (state.is_pure()) {
        FockAccess::psi(out) =
            mode_left_apply_vec(u, FockAccess::psi(out), mode, state.modes(), d);
    } else {
        Eigen::MatrixXd m = mode_left_apply(u, FockAccess::rho(out), mode,
                                            state.modes(), d);
        m = mode_left_apply(u, m.transpose(), mode, state.modes(), d).transpose();
        FockAccess::rho(out) = std::move(m);
    }
    check_leakage(out, op);
    return out;
}

}  // namespace

FockState fock_squeeze(const FockState& state, int mode, double r) {
    check_mode(mode, state.modes());
    if (r == 0.0) {
        return state;
    }
    return apply_single_mode_unitary(state, mode, squeeze_unitary(state.cutoff() + 1, r),
                                     "squeeze");
}

FockState fock_displace(const FockState& state, int mode, double x) {
    check_mode(mode, state.modes());
    if (x == 0.0) {
        return state;
    }
    return apply_single_mode_unitary(state, mode,
                                     displace_unitary(state.cutoff() + 1, x),
                                     "displacement");
}

FockState fock_loss(const FockState& state, int mode, double eta) {
    check_mode(mode, state.modes());
    if (eta < 0.0 || eta > 1.0) {
        throw std::domain_error("transmissivity must lie in [0, 1]");
    }
    if (eta == 1.0) {
        return state;
    }
    const int d = state.cutoff() + 1;
    FockState out = state;
    FockAccess::pure(out) = false;
    const Eigen::MatrixXd rho = state.density();
    FockAccess::psi(out).resize(0);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rho.rows(), rho.cols());
    // E_k: lose k photons; entries sqrt(C(n,k) (1-eta)^k eta^{n-k}) on |n-k><n|.
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
        bool nonzero = false;
        for (int n = k; n < d; ++n) {
            const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0);
            const double logw = logc + k * std::log(1.0 - eta) +
                                (eta > 0.0 ? (n - k) * std::log(eta)
                                           : (n == k ? 0.0 : -1e308));
            if (logw > -700.0) {
                e(n - k, n) = std::exp(0.5 * logw);
                nonzero = true;
            }
        }
        if (!nonzero) {
            continue;
        }
        Eigen::MatrixXd m = mode_left_apply(e, rho, mode, state.modes(), d);
        m = mode_left_apply(e, m.transpose(), mode, state.modes(), d).transpose();
        acc += m;
    }
    FockAccess::rho(out) = std::move(acc);
    check_leakage(out, "loss");
    return out;
}

FockState fock_apply_orthogonal(const FockState& state,
                                const Eigen::MatrixXd& network) {
    const int m = state.modes();
    if (network.rows() != m || network.cols() != m) {
        throw std::invalid_argument("network dimension does not match mode count");
    }
    const double deviation =
        (network.transpose() * network - Eigen::MatrixXd::Identity(m, m))
            .cwiseAbs()
            .maxCoeff();
    if (deviation > 1e-10) {
        throw std::invalid_argument("network matrix is not orthogonal");
    }

    const int d = state.cutoff() + 1;
    FockState out = state;
    Eigen::MatrixXd work = network;
    const bool reflect = network.determinant() < 0.0;
    if (reflect) {
        // Factor a parity on the last mode: O = R * diag(1, .., -1).
        work.col(m - 1) *= -1.0;
        Eigen::VectorXd parity(out.dim());
        for (int i = 0; i < out.dim(); ++i) {
            const int n = m == 1 ? i : i % d;
            parity(i) = (n % 2 == 0) ? 1.0 : -1.0;
        }
        if (out.is_pure()) {
            FockAccess::psi(out) = parity.asDiagonal() * FockAccess::psi(out);
        } else {
            FockAccess::rho(out) =
                parity.asDiagonal() * FockAccess::rho(out) * parity.asDiagonal();
        }
    }
    if (m == 2) {
        const double phi = std::atan2(work(1, 0), work(0, 0));
        if (phi != 0.0) {
            // exp(theta(a1^dag a2 - a1 a2^dag)) maps means by R(-theta).
            const SectorRotation rot = build_sector_rotation(state.cutoff(), -phi);
            if (out.is_pure()) {
                rot.apply(FockAccess::psi(out), false);
            } else {
                Eigen::MatrixXd& rho = FockAccess::rho(out);
                sector_apply_matrix(rot, rho, false);
                rho.transposeInPlace();
                sector_apply_matrix(rot, rho, false);
                rho.transposeInPlace();
            }
        }
    }
    check_leakage(out, "network");
    return out;
}

FockMoments fock_expectation(const FockState& state) {
    std::vector<int> all(state.modes());
    for (int i = 0; i < state.modes(); ++i) {
        all[i] = i;
    }
    return fock_expectation(state, all);
}

FockMoments fock_expectation(const FockState& state, const std::vector<int>& subset) {
    const int d = state.cutoff() + 1;
    for (int mode : subset) {
        check_mode(mode, state.modes());
    }
    const Eigen::VectorXd pops = state.basis_populations();
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < state.dim(); ++i) {
        double w = static_cast<double>(subset.size());
        for (int mode : subset) {
            const int n = state.modes() == 1 ? i : (mode == 0 ? i / d : i % d);
            w += 2.0 * n;
        }
        m1 += w * pops(i);
        m2 += w * w * pops(i);
    }
    FockMoments out;
    out.mean = m1;
    out.variance = m2 - m1 * m1;
    return out;
}

FockState fock_build_output_state_at(const SensingScenario& s, int cutoff,
                                     double signal_value) {
    s.validate();
    if (s.modes > 2) {
        throw std::invalid_argument("the truncated-basis route supports M <= 2");
    }
    FockState state = FockState::vacuum(s.modes, cutoff);
    state = fock_squeeze(state, 0, s.probe_squeeze);

    Eigen::MatrixXd spread;
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
        state = fock_apply_orthogonal(state, spread);
    }

    const Eigen::VectorXd dx = signal_displacements(s, signal_value);
    for (int i = 0; i < s.modes; ++i) {
        state = fock_displace(state, i, dx(i));
    }
    if (s.eta1 < 1.0) {
        for (int i = 0; i < s.modes; ++i) {
            state = fock_loss(state, i, s.eta1);
        }
    }
    if (s.scheme == Scheme::Scheme1 || s.scheme == Scheme::Weighted) {
        state = fock_apply_orthogonal(state, spread.transpose());
    }
    const int detected = detected_mode_count(s);
    for (int i = 0; i < detected; ++i) {
        state = fock_squeeze(state, i, -s.opa_gain_param);
    }
    for (int i = 0; i < detected; ++i) {
        state = fock_displace(state, i, s.ref_displacement);
    }
    if (s.eta2 < 1.0) {
        for (int i = 0; i < detected; ++i) {
            state = fock_loss(state, i, s.eta2);
        }
    }
    return state;
}

FockState fock_build_output_state(const SensingScenario& s, int cutoff) {
    return fock_build_output_state_at(s, cutoff, s.signal);
}

FockEvaluation fock_evaluate(const SensingScenario& s, int cutoff, double fd_step) {
    std::vector<int> detected(detected_mode_count(s));
    for (size_t i = 0; i < detected.size(); ++i) {
        detected[i] = static_cast<int>(i);
    }
    const FockState state = fock_build_output_state(s, cutoff);
    const FockMoments m = fock_expectation(state, detected);

    const FockMoments hi = fock_expectation(
        fock_build_output_state_at(s, cutoff, s.signal + fd_step), detected);
    const FockMoments lo = fock_expectation(
        fock_build_output_state_at(s, cutoff, s.signal - fd_step), detected);

    FockEvaluation out;
    out.mean = m.mean;
    out.variance = m.variance;
    out.derivative = (hi.mean - lo.mean) / (2.0 * fd_step);
    if (std::abs(out.derivative) < 1e-300) {
        throw DegenerateScenarioError("vanishing signal derivative in the oracle route");
    }
    out.error = out.variance / (out.derivative * out.derivative);
    return out;
}

}  // namespace dqs
