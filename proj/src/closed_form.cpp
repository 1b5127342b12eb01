#include "dqs/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace dqs {
namespace closed_form {

namespace {

constexpr double kLn10 = 2.302585092994045684;

void check_etas(double eta1, double eta2) {
    if (eta1 < 0.0 || eta1 > 1.0 || eta2 < 0.0 || eta2 > 1.0) {
        throw std::domain_error("transmissivities must lie in [0, 1]");
    }
}

void check_modes(int modes) {
    if (modes < 1) {
        throw std::invalid_argument("mode count must be >= 1");
    }
}

void check_denominator(double y) {
    if (y == 0.0) {
        throw std::domain_error("degenerate scenario: x e^{r_m} + x_m vanishes");
    }
}

}  // namespace

double gain_db_to_rm(double gain_db) {
    return gain_db * kLn10 / 20.0;
}

double rm_to_gain_db(double rm) {
    return 20.0 * rm / kLn10;
}

void splitter_epsilons(double r, int modes, double& eps1, double& eps2) {
    check_modes(modes);
    const double ns = std::sinh(r) * std::sinh(r);
    const double root = std::sinh(r) * std::cosh(r);
    eps1 = (ns - root) / modes;
    eps2 = (ns + root) / modes;
}

Moments single_mode_moments(double r, double rm, double x, double xm, double eta1,
                            double eta2) {
    check_etas(eta1, eta2);
    const double amp = std::exp(rm);
    const double ym = std::sqrt(eta1 * eta2) * x * amp + std::sqrt(eta2) * xm;
    const double a = 0.5 * eta1 * eta2 * std::exp(-2.0 * (r - rm)) +
                     0.5 * (1.0 - eta1) * eta2 * std::exp(2.0 * rm) +
                     0.5 * (1.0 - eta2);
    const double b = 0.5 * eta1 * eta2 * std::exp(2.0 * (r - rm)) +
                     0.5 * (1.0 - eta1) * eta2 * std::exp(-2.0 * rm) +
                     0.5 * (1.0 - eta2);
    Moments m;
    m.mean = a + b + ym * ym;
    m.variance = 2.0 * a * a + 4.0 * a * ym * ym + 2.0 * b * b - 1.0;
    m.derivative = 2.0 * std::sqrt(eta1 * eta2) * amp * ym;
    return m;
}

double single_mode_exact(double r, double rm, double x, double xm) {
    const double y = x * std::exp(rm) + xm;
    check_denominator(y);
    // cosh(4d) - 1 written as 2 sinh^2(2d) to avoid cancellation near rm = r.
    const double s = std::sinh(2.0 * (r - rm));
    const double num = 2.0 * s * s +
                       2.0 * std::exp(-2.0 * (r - 2.0 * rm)) *
                           std::pow(x + std::exp(-rm) * xm, 2);
    return num / (4.0 * y * y * std::exp(2.0 * rm));
}

double single_mode_lossy(double r, double rm, double x, double xm, double eta1,
                         double eta2) {
    const Moments m = single_mode_moments(r, rm, x, xm, eta1, eta2);
    check_denominator(m.derivative);
    return m.variance / (m.derivative * m.derivative);
}

double scheme1_exact(double r, double rm, double x, double xm, int modes) {
    check_modes(modes);
    return single_mode_exact(r, rm, x, xm) / modes;
}

double scheme1_lossy(double r, double rm, double x, double xm, int modes, double eta1,
                     double eta2) {
    check_modes(modes);
    return single_mode_lossy(r, rm, x, xm, eta1, eta2) / modes;
}

Moments scheme2_moments(double r, double rm, double x, double xm, int modes,
                        double eta1, double eta2) {
    check_modes(modes);
    check_etas(eta1, eta2);
    double eps1 = 0.0;
    double eps2 = 0.0;
    splitter_epsilons(r, modes, eps1, eps2);
    const double up = std::exp(2.0 * rm);
    const double dn = std::exp(-2.0 * rm);
    const double xx = eta1 * eta2 * eps1 * up + 0.5 * eta2 * up + 0.5 * (1.0 - eta2);
    const double pp = eta1 * eta2 * eps2 * dn + 0.5 * eta2 * dn + 0.5 * (1.0 - eta2);
    const double xixj = eta1 * eta2 * eps1 * up;
    const double pipj = eta1 * eta2 * eps2 * dn;
    const double y = std::sqrt(eta1 * eta2) * x * std::exp(rm) + std::sqrt(eta2) * xm;
    const double mm = static_cast<double>(modes);
    Moments m;
    m.mean = mm * (xx + pp + y * y);
    m.variance = 2.0 * mm * (xx * xx + 2.0 * y * y * xx) +
                 2.0 * mm * (mm - 1.0) * (xixj * xixj + 2.0 * y * y * xixj) +
                 2.0 * mm * pp * pp + 2.0 * mm * (mm - 1.0) * pipj * pipj - mm;
    m.derivative = 2.0 * mm * y * std::sqrt(eta1 * eta2) * std::exp(rm);
    return m;
}

double scheme2_exact(double r, double rm, double x, double xm, int modes) {
    const Moments m = scheme2_moments(r, rm, x, xm, modes);
    check_denominator(m.derivative);
    return m.variance / (m.derivative * m.derivative);
}

double scheme2_lossy(double r, double rm, double x, double xm, int modes, double eta1,
                     double eta2) {
    const Moments m = scheme2_moments(r, rm, x, xm, modes, eta1, eta2);
    check_denominator(m.derivative);
    return m.variance / (m.derivative * m.derivative);
}

double single_mode_highgain(double r, double x, double x0) {
    return scheme1_highgain(r, x, x0, 1);
}

double scheme1_highgain(double r, double x, double x0, int modes) {
    check_modes(modes);
    const double y = x + x0;
    check_denominator(y);
    return 0.5 * std::exp(-2.0 * r) / modes + std::exp(-4.0 * r) / (8.0 * modes * y * y);
}

double scheme2_highgain(double r, double x, double x0, int modes) {
    check_modes(modes);
    const double y = x + x0;
    check_denominator(y);
    const double mm = static_cast<double>(modes);
    return (4.0 * mm * std::exp(-2.0 * r) * y * y + std::exp(-4.0 * r) + mm - 1.0) /
           (8.0 * mm * mm * y * y);
}

double optimal_bound(double r, int modes, double eta1) {
    check_modes(modes);
    if (eta1 < 0.0 || eta1 > 1.0) {
        throw std::domain_error("transmissivity must lie in [0, 1]");
    }
    const double mm = static_cast<double>(modes);
    return eta1 / (2.0 * mm * std::exp(2.0 * r)) + (1.0 - eta1) / (2.0 * mm);
}

}  // namespace closed_form
}  // namespace dqs
