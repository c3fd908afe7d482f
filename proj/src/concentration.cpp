#include "screenlap/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "screenlap/philox.hpp"
#include "screenlap/quadrature.hpp"

namespace screenlap::conc {

namespace {

constexpr double kPiHalf = 1.57079632679489661923;

// After t = sin(u) the density (1-t^2)^alpha t^(m-1) dt becomes
// sin(u)^(m-1) cos(u)^(n-m-1) du, smooth on [0, pi/2] for all n > m.
struct SectorIntegrand {
    double c_sin = 0;  // m - 1
    double c_cos = 0;  // n - m - 1
    double u_peak = 0;
    double width = 0;

    SectorIntegrand(int m, int n) {
        c_sin = double(m - 1);
        c_cos = double(n - m - 1);
        u_peak = std::atan2(std::sqrt(c_sin), std::sqrt(c_cos));
        const double curvature = (c_cos > 0 ? c_cos / square(std::cos(u_peak)) : 0.0) +
                                 (c_sin > 0 ? c_sin / square(std::sin(u_peak)) : 0.0);
        width = curvature > 0 ? 1.0 / std::sqrt(curvature) : kPiHalf;
    }

    static double square(double v) { return v * v; }

    double log_value(double u) const {
        double lv = 0.0;
        if (c_sin > 0) lv += c_sin * std::log(std::sin(u));
        if (c_cos > 0) lv += c_cos * std::log(std::sin(kPiHalf - u));
        return lv;
    }

    // d/du log_value: decay rate of the integrand away from an endpoint.
    double dlog_value(double u) const {
        double d = 0.0;
        if (c_sin > 0) d += c_sin / std::tan(u);
        if (c_cos > 0) d -= c_cos * std::tan(u);
        return d;
    }

    // Seeds that resolve the thin layer where the integrand on [lo, hi] is
    // non-negligible: around the interior peak when the piece contains it,
    // otherwise stepping inward from the dominant endpoint at multiples of
    // the local e-folding length.
    std::vector<double> seed_points(double lo, double hi) const {
        std::vector<double> seeds;
        const auto fan_out = [&seeds](double center, double scale) {
            for (double k : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
                seeds.push_back(center - k * scale);
                seeds.push_back(center + k * scale);
            }
            seeds.push_back(center);
        };
        if (u_peak > lo && u_peak < hi) {
            fan_out(u_peak, width);
        } else {
            const double edge = std::clamp(u_peak, lo, hi);
            const double rate = std::abs(dlog_value(edge));
            const double layer = rate > 1.0 / width ? 1.0 / rate : width;
            fan_out(edge, layer);
        }
        return seeds;
    }

    // log of the integral over [lo, hi], evaluated with the integrand
    // renormalized by its maximum on that interval so the quadrature always
    // works at unit scale (a global normalization underflows for large
    // exponents once the piece sits hundreds of e-folds below the peak).
    double log_integral(double lo, double hi) const {
        if (hi <= lo) return -std::numeric_limits<double>::infinity();
        const double at = std::clamp(u_peak, lo, hi);
        const double shift = log_value(at);
        // Each sample of the shifted integrand is exp of a difference of
        // log sums whose individual terms reach c * |log sin|; rounding
        // leaves relative noise of that magnitude times epsilon in every
        // value, and error estimates cannot fall below it.  Request a
        // tolerance comfortably above that floor, never looser than the
        // closed-form small-exponent cases can deliver.
        double term_mag = 1.0;
        if (c_sin > 0) term_mag += std::abs(c_sin * std::log(std::sin(at)));
        if (c_cos > 0) term_mag += std::abs(c_cos * std::log(std::sin(kPiHalf - at)));
        const double rel_tol =
            std::max(1e-12, 32.0 * std::numeric_limits<double>::epsilon() * term_mag);
        const auto f = [this, shift](double u) { return std::exp(log_value(u) - shift); };
        const double v = quad::integrate(f, lo, hi, rel_tol, 0.0, seed_points(lo, hi)).value;
        return shift + std::log(v);
    }
};

void check_F_args(int m, int n, double delta) {
    if (m <= 0 || n <= m) throw input_error("volume_ratio_F: need 0 < m < n");
    if (!(delta >= 0.0 && delta <= 1.0)) throw input_error("volume_ratio_F: delta outside [0,1]");
}

}  // namespace

double volume_ratio_F(int m, int n, double delta) {
    check_F_args(m, n, delta);
    if (delta == 0.0) return 0.0;
    if (delta == 1.0) return 1.0;
    const SectorIntegrand f(m, n);
    const double split = std::asin(delta);
    // F = head / (head + tail) = 1 / (1 + exp(log_tail - log_head)); the log
    // form keeps ratios like 1e-300 / 1e-280 exact where the direct quotient
    // of renormalized integrals would lose them.
    const double log_head = f.log_integral(0.0, split);
    const double log_tail = f.log_integral(split, kPiHalf);
    return 1.0 / (1.0 + std::exp(log_tail - log_head));
}

double volume_ratio_F_complement(int m, int n, double delta) {
    check_F_args(m, n, delta);
    if (delta == 0.0) return 1.0;
    if (delta == 1.0) return 0.0;
    const SectorIntegrand f(m, n);
    const double split = std::asin(delta);
    const double log_head = f.log_integral(0.0, split);
    const double log_tail = f.log_integral(split, kPiHalf);
    return 1.0 / (1.0 + std::exp(log_head - log_tail));
}

double phi(double theta) {
    if (theta < 0.0) throw input_error("phi: negative argument");
    return theta * std::exp(0.5 * (1.0 - theta * theta));
}

double log_phi(double theta) {
    if (theta <= 0.0) throw input_error("log_phi: argument must be positive");
    return std::log(theta) + 0.5 * (1.0 - theta * theta);
}

double tail_bound_above(int m, int n, double theta) {
    if (m <= 0 || n <= m) throw input_error("tail_bound_above: need 0 < m < n");
    if (!(theta > 1.0)) throw input_error("tail_bound_above: bound requires theta > 1");
    return std::min(1.0, std::exp(double(m) * log_phi(theta)));
}

double tail_bound_below(int m, int m0, int n, double theta) {
    if (m <= 0 || n <= m) throw input_error("tail_bound_below: need 0 < m < n");
    if (m0 < 0 || m0 >= m) throw input_error("tail_bound_below: need 0 <= m0 < m");
    if (!(theta > 0.0 && theta < 1.0))
        throw input_error("tail_bound_below: bound requires 0 < theta < 1");
    return std::exp(double(m - m0) * log_phi(theta));
}

EnclosureConstants enclosure_constants(const tspace::SystemDims& dims) {
    const double nn = dims.electrons;
    return {std::sqrt(1.0 - 2.0 / (nn * (nn + 1.0))), std::sqrt(1.0 + 1.0 / (nn + 1.0))};
}

SimpleProbBounds prob_bound_simple(const tspace::SystemDims& dims, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw input_error("prob_bound_simple: eps outside (0,1)");
    SimpleProbBounds b;
    b.two_sided = 1.0 - (std::exp(dims.mprime * log_phi(1.0 - eps)) +
                         std::exp(dims.m * log_phi(1.0 + eps)));
    const double c = 1.5 - std::log(2.0);  // -ln(phi(2))
    b.exponential = 1.0 - 2.0 * std::exp(-c * eps * eps * dims.mprime);
    return b;
}

SharpProbBound prob_bound_sharp(const tspace::SystemDims& dims, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw input_error("prob_bound_sharp: eps outside (0,1)");
    const double xi = std::sqrt(double(dims.m) / dims.n);
    const double xi_p = std::sqrt(double(dims.mprime) / dims.n);
    SharpProbBound b;
    double upper = (1.0 + eps) * xi;
    if (upper > 1.0) {
        upper = 1.0;
        b.clamped = true;
    }
    const double miss_above = volume_ratio_F_complement(dims.m, dims.n, upper);
    const double miss_below = volume_ratio_F(dims.mprime, dims.n, (1.0 - eps) * xi_p);
    b.distance_to_one = miss_above + miss_below;
    b.value = 1.0 - b.distance_to_one;
    b.projection_variant = volume_ratio_F(dims.m, dims.n, upper) -
                           volume_ratio_F(dims.m, dims.n, (1.0 - eps) * xi);
    return b;
}

SingularProfile SingularProfile::projection(int m, int n) {
    if (m <= 0 || n <= m) throw input_error("SingularProfile: need 0 < m < n");
    return {std::vector<double>(m, 1.0), n};
}

SingularProfile SingularProfile::for_Tt(const tspace::SystemDims& dims) {
    return {tspace::singular_values_Tt(dims), dims.n};
}

VolumeRatioEstimate mc_volume_ratio(const SingularProfile& profile, double delta, long samples,
                                    std::uint64_t seed, int workers) {
    if (profile.sigmas.empty()) throw input_error("mc_volume_ratio: empty singular profile");
    if (int(profile.sigmas.size()) > profile.n)
        throw input_error("mc_volume_ratio: more singular values than ambient dimensions");
    if (samples < 1) throw input_error("mc_volume_ratio: need at least one sample");

    const int n = profile.n;
    const int m = int(profile.sigmas.size());
    const double sigma_max = *std::max_element(profile.sigmas.begin(), profile.sigmas.end());
    std::vector<double> weight(m);
    for (int k = 0; k < m; ++k) weight[k] = profile.sigmas[k] * profile.sigmas[k];
    const double threshold = delta * delta * sigma_max * sigma_max;

    auto count_range = [&](long lo, long hi) {
        long hits = 0;
        for (long s = lo; s < hi; ++s) {
            rng::NormalStream stream(seed, std::uint64_t(s));
            double mapped = 0.0, full = 0.0;
            for (int k = 0; k < n; ++k) {
                const double z = stream.next();
                full += z * z;
                if (k < m) mapped += weight[k] * z * z;
            }
            if (mapped < threshold * full) ++hits;
        }
        return hits;
    };

    int n_workers = workers > 0 ? workers : int(std::thread::hardware_concurrency());
    n_workers = std::clamp<long>(n_workers, 1, std::max<long>(1, samples / 4096));

    long hits = 0;
    if (n_workers == 1) {
        hits = count_range(0, samples);
    } else {
        std::vector<long> partial(n_workers, 0);
        std::vector<std::thread> pool;
        const long chunk = (samples + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&, w] {
                partial[w] = count_range(w * chunk, std::min<long>(samples, (w + 1) * chunk));
            });
        for (auto& t : pool) t.join();
        for (long p : partial) hits += p;
    }

    VolumeRatioEstimate est;
    est.value = double(hits) / double(samples);
    est.method = EstimateMethod::monte_carlo;
    est.samples = samples;
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / double(samples));
    return est;
}

}  // namespace screenlap::conc
