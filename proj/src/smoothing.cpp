#include "screenlap/smoothing.hpp"

#include <cmath>

namespace screenlap::smoothing {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2 pi)

void check_phi_args(int nu, double t) {
    if (nu < 0 || nu > 16) throw input_error("smoothing: order nu outside [0, 16]");
    if (!(t >= 0.0)) throw input_error("smoothing: phi argument must be nonnegative");
}
}  // namespace

KernelOrder KernelOrder::make(int nu, int n) {
    if (nu < 0 || nu > 16) throw input_error("KernelOrder: nu outside [0, 16]");
    if (n < 1) throw input_error("KernelOrder: dimension must be positive");
    return {nu, n};
}

double phi_factor(int nu, double t) {
    check_phi_args(nu, t);
    if (t == 0.0) return 1.0;
    // partial exponential sum in log domain: terms exp(k ln t - t - ln k!)
    double sum = 0.0;
    for (int k = 0; k <= nu; ++k)
        sum += std::exp(double(k) * std::log(t) - t - std::lgamma(double(k) + 1.0));
    return sum < 1.0 ? sum : 1.0;
}

double phi_factor_complement(int nu, double t) {
    check_phi_args(nu, t);
    if (t == 0.0) return 0.0;
    if (t >= double(nu) + 2.0) return 1.0 - phi_factor(nu, t);  // no cancellation here
    // tail of the exponential series, term ratio t/(k+1) < 1 throughout
    double term = std::exp(double(nu + 1) * std::log(t) - t - std::lgamma(double(nu) + 2.0));
    double sum = term;
    for (int k = nu + 2; term > 1e-20 * sum; ++k) {
        term *= t / double(k);
        sum += term;
    }
    return sum;
}

double khat(const KernelOrder& order, const Eigen::VectorXd& omega) {
    if (omega.size() != order.n) throw input_error("khat: omega has wrong dimension");
    double product = std::exp(-double(order.n) * kLogSqrt2Pi);
    for (int i = 0; i < order.n; ++i) product *= phi_factor(order.nu, 0.5 * omega[i] * omega[i]);
    return product;
}

double log_khat(const KernelOrder& order, const Eigen::VectorXd& omega) {
    if (omega.size() != order.n) throw input_error("log_khat: omega has wrong dimension");
    double sum = -double(order.n) * kLogSqrt2Pi;
    for (int i = 0; i < order.n; ++i)
        sum += std::log(phi_factor(order.nu, 0.5 * omega[i] * omega[i]));
    return sum;
}

double khat_scaled(const KernelOrder& order, double eps, const Eigen::VectorXd& omega) {
    if (!(eps > 0.0)) throw input_error("khat_scaled: eps must be positive");
    return khat(order, (eps * omega).eval());
}

double fourier_multiplier(const KernelOrder& order, double eps, const Eigen::VectorXd& omega) {
    if (!(eps > 0.0)) throw input_error("fourier_multiplier: eps must be positive");
    if (omega.size() != order.n) throw input_error("fourier_multiplier: wrong dimension");
    double product = 1.0;
    for (int i = 0; i < order.n; ++i) {
        const double s = eps * omega[i];
        product *= phi_factor(order.nu, 0.5 * s * s);
    }
    return product;
}

}  // namespace screenlap::smoothing
