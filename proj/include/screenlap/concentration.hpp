#pragma once

#include <cstdint>
#include <vector>

#include "screenlap/tspace.hpp"

namespace screenlap::conc {

// Sector measure of an orthogonal projection R^n -> R^m: the fraction of
// the unit sphere on which the projected length falls below delta.  Computed
// as a ratio of two quadratures of (1-t^2)^((n-m-2)/2) t^(m-1), so no Gamma
// prefactor is needed; the integrand is handled in log form and remains
// usable up to m ~ 2^16.
double volume_ratio_F(int m, int n, double delta);

// 1 - volume_ratio_F without cancellation (the tail integral over [delta,1]).
double volume_ratio_F_complement(int m, int n, double delta);

// theta * exp((1-theta^2)/2); equals one exactly at theta=1, its maximum.
double phi(double theta);
double log_phi(double theta);

// Upper bound on the sector where ||Ax|| >= theta*xi*||A||*||x||, theta > 1:
// min(1, phi(theta)^m).  The ambient dimension enters only through xi and is
// kept for interface symmetry.
double tail_bound_above(int m, int n, double theta);

// Upper bound phi(theta)^(m-m0) on the sector where ||Ax|| < theta*xi'*||A||*||x||,
// 0 < theta < 1, for matrices whose trailing singular values are all equal.
double tail_bound_below(int m, int m0, int n, double theta);

// The constants enclosing one: xi'*||T^t|| and xi*||T^t||.
struct EnclosureConstants {
    double lower = 0;
    double upper = 0;
};
EnclosureConstants enclosure_constants(const tspace::SystemDims& dims);

// Lower bounds on the probability that a random direction is mapped into the
// relative-norm window [(1-eps)*xi'*||T^t||, (1+eps)*xi*||T^t||).
struct SimpleProbBounds {
    double two_sided = 0;    // 1 - (phi(1-eps)^m' + phi(1+eps)^m)
    double exponential = 0;  // 1 - 2 exp(-c eps^2 m'), c = 3/2 - ln 2
};
SimpleProbBounds prob_bound_simple(const tspace::SystemDims& dims, double eps);

struct SharpProbBound {
    double value = 0;            // F(m,n;(1+eps)xi) - F(m',n;(1-eps)xi')
    double distance_to_one = 0;  // 1 - value, formed from tail quadratures
    double projection_variant = 0;  // F(m,n;(1+eps)xi) - F(m,n;(1-eps)xi)
    bool clamped = false;           // (1+eps)xi exceeded 1 and was clamped
};
SharpProbBound prob_bound_sharp(const tspace::SystemDims& dims, double eps);

// Singular-value profile of an m x n matrix; by orthogonal invariance it
// determines the sector measure completely.
struct SingularProfile {
    std::vector<double> sigmas;  // descending, strictly positive
    int n = 0;                   // ambient dimension

    static SingularProfile projection(int m, int n);
    static SingularProfile for_Tt(const tspace::SystemDims& dims);
};

enum class EstimateMethod { quadrature, monte_carlo };

struct VolumeRatioEstimate {
    double value = 0.0;
    EstimateMethod method = EstimateMethod::monte_carlo;
    double std_error = 0.0;
    long samples = 0;
};

// Monte-Carlo sector measure with standard Gaussian directions.  Draws are
// addressed by (seed, sample index), so the result is bit-identical for any
// worker count.
VolumeRatioEstimate mc_volume_ratio(const SingularProfile& profile, double delta, long samples,
                                    std::uint64_t seed, int workers = 0);

}  // namespace screenlap::conc
