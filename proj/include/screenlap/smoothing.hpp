#pragma once

#include <Eigen/Dense>

#include "screenlap/errors.hpp"

namespace screenlap::smoothing {

// Mollifier family given on the Fourier side: the transform of the kernel of
// order nu in n dimensions is (1/sqrt(2 pi))^n prod_i phi(omega_i^2 / 2) with
// phi(t) = e^{-t} sum_{k<=nu} t^k / k!.  Raising nu flattens phi at zero, so
// the kernel keeps more moments while still damping high frequencies.

struct KernelOrder {
    int nu = 0;  // 0 <= nu <= 16 (log-domain evaluation keeps factorials tame)
    int n = 1;   // ambient dimension >= 1

    static KernelOrder make(int nu, int n);
};

// e^{-t} sum_{k=0}^{nu} t^k/k!, in (0,1] for t >= 0, decreasing in t
double phi_factor(int nu, double t);

// 1 - phi_factor without cancellation: the tail e^{-t} sum_{k>nu} t^k/k!
double phi_factor_complement(int nu, double t);

// (1/sqrt(2 pi))^n prod_i phi(omega_i^2/2), evaluated as a plain product
double khat(const KernelOrder& order, const Eigen::VectorXd& omega);

// log of khat via summed logs (the product and this must agree)
double log_khat(const KernelOrder& order, const Eigen::VectorXd& omega);

// khat at eps * omega: Fourier transform of the rescaled kernel
// eps^{-n} K(x/eps)
double khat_scaled(const KernelOrder& order, double eps, const Eigen::VectorXd& omega);

// The multiplier (sqrt(2 pi))^n khat(eps omega) applied to Fourier
// integrands by convolution; lies in (0,1] and tends to 1 as eps -> 0.
double fourier_multiplier(const KernelOrder& order, double eps, const Eigen::VectorXd& omega);

}  // namespace screenlap::smoothing
