#pragma once

namespace dqs {
namespace closed_form {

/// Mean, variance and signal derivative of the measured intensity observable
/// (normalized as sum_i (x_i^2 + p_i^2) over the detected modes).
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double derivative = 0.0;  // d<O>/dx
};

/// Gain bookkeeping: G = e^{2 r_m}, gain_db = 10 log10(G).
double gain_db_to_rm(double gain_db);
double rm_to_gain_db(double rm);

/// Covariance coefficients of the balanced-splitter state:
/// eps_{1,2} = (Ns -/+ sqrt(Ns(Ns+1))) / M with Ns = sinh^2 r.
void splitter_epsilons(double r, int modes, double& eps1, double& eps2);

// Detected-mode moments for the single-mode pipeline (also the measured-mode
// moments of scheme 1 and of the weighted scheme evaluated at x*).
Moments single_mode_moments(double r, double rm, double x, double xm,
                            double eta1 = 1.0, double eta2 = 1.0);

/// Exact lossless single-mode estimation error.
double single_mode_exact(double r, double rm, double x, double xm);

/// Single-mode estimation error with loss eta1 (after encoding) and eta2
/// (before the intensity measurement).
double single_mode_lossy(double r, double rm, double x, double xm, double eta1,
                         double eta2);

/// Scheme 1 (recombine and measure mode 1): the single-mode error divided by M.
double scheme1_exact(double r, double rm, double x, double xm, int modes);
double scheme1_lossy(double r, double rm, double x, double xm, int modes, double eta1,
                     double eta2);

/// Scheme 2 (per-mode amplification and collective intensity) moments and errors.
Moments scheme2_moments(double r, double rm, double x, double xm, int modes,
                        double eta1 = 1.0, double eta2 = 1.0);
double scheme2_exact(double r, double rm, double x, double xm, int modes);
double scheme2_lossy(double r, double rm, double x, double xm, int modes, double eta1,
                     double eta2);

/// High-gain limits (r_m >> r), with the gain-scaled displacement x0.
double single_mode_highgain(double r, double x, double x0);
double scheme1_highgain(double r, double x, double x0, int modes);
double scheme2_highgain(double r, double x, double x0, int modes);

/// Fisher-information optimum: 1/(2 M e^{2r}) lossless, degraded to
/// eta1/(2 M e^{2r}) + (1 - eta1)/(2M) under encoding-side loss.
double optimal_bound(double r, int modes, double eta1 = 1.0);

}  // namespace closed_form
}  // namespace dqs
