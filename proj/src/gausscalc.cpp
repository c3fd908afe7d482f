#include "screenlap/gausscalc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "screenlap/philox.hpp"

namespace screenlap::gausscalc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& A, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw input_error(std::string(what) + ": quadratic form is not positive definite");
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    double sum = 0.0;
    const auto& packed = llt.matrixLLT();
    for (Eigen::Index i = 0; i < packed.rows(); ++i) sum += std::log(packed(i, i));
    return 2.0 * sum;
}

Eigen::MatrixXd inverse_spd(const Eigen::LLT<Eigen::MatrixXd>& llt, Eigen::Index d) {
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    return 0.5 * (inv + inv.transpose());
}

// c scaled by e^{log_factor} without forming over/underflowing intermediates
double scaled_coeff(double c, double log_factor) {
    if (c == 0.0) return 0.0;
    const double magnitude = std::exp(std::log(std::abs(c)) + log_factor);
    return std::copysign(magnitude, c);
}

void check_dim(const GaussianSum& s, Eigen::Index d, const char* what) {
    if (s.dim != d) throw input_error(std::string(what) + ": dimension mismatch");
}

std::vector<double> eval_many(const GaussianSum& U, const std::vector<Eigen::VectorXd>& pts,
                              const char* what) {
    for (const auto& p : pts) check_dim(U, p.size(), what);
    std::vector<double> out(pts.size(), 0.0);
    for (const GaussianTerm& t : U.terms) {
        const auto llt = factor_spd(t.qform, what);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Eigen::VectorXd u = llt.matrixU() * (pts[i] - t.center);
            out[i] += t.coeff * std::exp(-u.squaredNorm());
        }
    }
    return out;
}

// Core of the solve: transform each term, multiply by the kernel factors
// a e^{-b mu} exp(-b S-form), transform back.  S = nullptr means the
// identity (decoupled coordinates).
GaussianSum apply_kernel_terms(const GaussianSum& F, const std::vector<expsum::Term>& kterms,
                               double mu, const Eigen::MatrixXd* S, long term_budget,
                               const char* what) {
    if (F.dim < 1) throw input_error(std::string(what) + ": sum has no dimension");
    const long projected = long(F.terms.size()) * long(kterms.size());
    if (projected > term_budget)
        throw capacity_error(std::string(what) + ": output would exceed the term budget");
    for (const expsum::Term& k : kterms) {
        if (!(k.weight > 0.0)) throw input_error(std::string(what) + ": kernel weight <= 0");
        if (k.rate < 0.0) throw input_error(std::string(what) + ": kernel rate < 0");
    }

    const int d = F.dim;
    GaussianSum out;
    out.dim = d;
    out.terms.reserve(std::size_t(projected));
    for (const GaussianTerm& t : F.terms) {
        check_dim(F, t.center.size(), what);
        const auto lltA = factor_spd(t.qform, what);
        const double logdetA = log_det(lltA);
        const Eigen::MatrixXd B = 0.25 * inverse_spd(lltA, d);
        for (const expsum::Term& k : kterms) {
            Eigen::MatrixXd Bk = B;
            if (k.rate != 0.0) {
                if (S)
                    Bk += k.rate * (*S);
                else
                    Bk.diagonal().array() += k.rate;
            }
            const auto lltB = factor_spd(Bk, what);
            const double log_factor = std::log(k.weight) - k.rate * mu - double(d) * kLn2 -
                                      0.5 * (logdetA + log_det(lltB));
            out.terms.push_back(
                {scaled_coeff(t.coeff, log_factor), t.center, 0.25 * inverse_spd(lltB, d)});
        }
    }
    return compress(std::move(out));
}

// Band of transform-side radii-squared that carries all but ~1e-16 of the
// mass of a Gaussian with minimal eigenvalue lam in dimension n: the tail of
// the radial density r^{n-1} e^{-lam r^2} beyond lam r^2 = (n/2) w is about
// exp(-(n/2)(w - 1 - ln w)).
double mass_band(double lam, int n) {
    const double target = std::log(1e16) / (0.5 * double(n));
    double lo = 1.0 + 1e-12, hi = 2.0;
    auto g = [&](double w) { return w - 1.0 - std::log(w) - target; };
    while (g(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 1.2 * (0.5 * double(n)) * hi / lam;
}

// Upper end of the spectral interval the kernel must resolve for F: mu plus
// the radial band carrying the transform mass of F, stretched by the largest
// factor the degenerate quadratic form can apply.
double kernel_band_hi(KernelMode mode, double mu, const GaussianSum& F,
                      const tspace::SystemDims* dims) {
    if (!(mu > 0.0)) throw input_error("make_kernel: mu must be positive");
    if (F.dim < 1) throw input_error("make_kernel: right-hand side has no dimension");
    if (mode == KernelMode::degenerate && !dims)
        throw input_error("make_kernel: degenerate mode needs system dimensions");
    if (dims && F.dim != dims->n)
        throw input_error("make_kernel: right-hand side dimension does not match the system");

    double band;
    if (F.terms.empty()) {
        band = mu;  // nothing to resolve; keep the interval nondegenerate
    } else {
        double lam_min = std::numeric_limits<double>::infinity();
        for (const GaussianTerm& t : F.terms) {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.qform);
            if (es.info() != Eigen::Success)
                throw input_error("make_kernel: eigenvalue computation failed");
            // transform-side minimal eigenvalue of qform^{-1}/4
            lam_min = std::min(lam_min, 0.25 / es.eigenvalues().maxCoeff());
        }
        band = std::max(mass_band(lam_min, F.dim), 0.01 * mu);
    }
    const double scale =
        mode == KernelMode::degenerate
            ? tspace::spectral_norm_Tt(*dims) * tspace::spectral_norm_Tt(*dims)
            : 1.0;
    return mu + band * scale;
}

KernelSpec certify_kernel(KernelMode mode, double mu, double tol, double hi,
                          const expsum::GridParams& params) {
    KernelSpec spec;
    spec.mode = mode;
    spec.mu = mu;
    spec.sum = expsum::rescale(expsum::build(params.h, params.k1, params.k2), mu / 10.0);
    const expsum::RelErrorReport report = expsum::rel_error_sup_on(spec.sum, mu, hi);
    if (report.sup_error > tol)
        throw certification_error("make_kernel: kernel failed certification on its band");
    spec.certified_tol = tol;
    spec.certified_lo = mu;
    spec.certified_hi = hi;
    return spec;
}

KernelSpec make_kernel_impl(KernelMode mode, double mu, double tol, const GaussianSum& F,
                            const tspace::SystemDims* dims) {
    const double hi = kernel_band_hi(mode, mu, F, dims);
    const expsum::GridParams params = expsum::suggest_params(mu / 10.0, 100.0 * hi / mu, tol);
    return certify_kernel(mode, mu, tol, hi, params);
}

}  // namespace

GaussianTerm make_term(double coeff, const Eigen::VectorXd& center,
                       const Eigen::MatrixXd& qform) {
    const Eigen::Index d = center.size();
    if (d < 1) throw input_error("make_term: empty center");
    if (qform.rows() != d || qform.cols() != d)
        throw input_error("make_term: qform shape does not match the center");
    const double scale = std::max(1.0, qform.cwiseAbs().maxCoeff());
    if ((qform - qform.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw input_error("make_term: qform is not symmetric");
    GaussianTerm t;
    t.coeff = coeff;
    t.center = center;
    t.qform = 0.5 * (qform + qform.transpose());
    factor_spd(t.qform, "make_term");
    return t;
}

GaussianSum make_sum(int dim, std::vector<GaussianTerm> terms) {
    if (dim < 1) throw input_error("make_sum: dimension must be positive");
    for (const GaussianTerm& t : terms)
        if (t.center.size() != dim) throw input_error("make_sum: term dimension mismatch");
    GaussianSum s;
    s.dim = dim;
    s.terms = std::move(terms);
    return s;
}

PhasedGaussianTerm fourier(const GaussianTerm& t) {
    const Eigen::Index d = t.center.size();
    const auto llt = factor_spd(t.qform, "fourier");
    PhasedGaussianTerm out;
    out.shift = t.center;
    out.qform = 0.25 * inverse_spd(llt, d);
    out.coeff = scaled_coeff(t.coeff, -0.5 * double(d) * kLn2 - 0.5 * log_det(llt));
    return out;
}

GaussianTerm inverse_fourier(const PhasedGaussianTerm& t) {
    const Eigen::Index d = t.shift.size();
    const auto llt = factor_spd(t.qform, "inverse_fourier");
    GaussianTerm out;
    out.center = t.shift;
    out.qform = 0.25 * inverse_spd(llt, d);
    out.coeff = scaled_coeff(t.coeff, -0.5 * double(d) * kLn2 - 0.5 * log_det(llt));
    return out;
}

KernelSpec make_kernel(KernelMode mode, double mu, double tol, const GaussianSum& F,
                       const tspace::SystemDims& dims) {
    return make_kernel_impl(mode, mu, tol, F, &dims);
}

KernelSpec make_kernel(KernelMode mode, double mu, double tol, const GaussianSum& F) {
    if (mode != KernelMode::decoupled)
        throw input_error("make_kernel: degenerate mode needs system dimensions");
    return make_kernel_impl(mode, mu, tol, F, nullptr);
}

KernelSpec make_kernel_from_grid(KernelMode mode, double mu, double tol,
                                 const expsum::GridParams& grid, const GaussianSum& F,
                                 const tspace::SystemDims& dims) {
    if (!(tol > 0.0) || tol >= 1.0) throw input_error("make_kernel: tol outside (0, 1)");
    const double hi = kernel_band_hi(mode, mu, F, &dims);
    return certify_kernel(mode, mu, tol, hi, grid);
}

GaussianSum apply_screened_inverse(const GaussianSum& F, const KernelSpec& kernel,
                                   const tspace::SystemDims& dims, int term_budget) {
    check_dim(F, dims.n, "apply_screened_inverse");
    if (kernel.mode == KernelMode::degenerate) {
        const Eigen::MatrixXd T = tspace::dense_T(dims);
        const Eigen::MatrixXd S = T * T.transpose();
        return apply_kernel_terms(F, kernel.sum.terms, kernel.mu, &S, term_budget,
                                  "apply_screened_inverse");
    }
    return apply_kernel_terms(F, kernel.sum.terms, kernel.mu, nullptr, term_budget,
                              "apply_screened_inverse");
}

GaussianSum apply_screened_inverse(const GaussianSum& F, const KernelSpec& kernel,
                                   int term_budget) {
    if (kernel.mode != KernelMode::decoupled)
        throw input_error("apply_screened_inverse: degenerate mode needs system dimensions");
    return apply_kernel_terms(F, kernel.sum.terms, kernel.mu, nullptr, term_budget,
                              "apply_screened_inverse");
}

double eval(const GaussianSum& U, const Eigen::VectorXd& y) {
    return eval_many(U, {y}, "eval")[0];
}

double eval_trace(const GaussianSum& U, const tspace::SystemDims& dims,
                  const Eigen::VectorXd& x) {
    check_dim(U, dims.n, "eval_trace");
    if (x.size() != dims.m) throw input_error("eval_trace: point dimension mismatch");
    return eval(U, tspace::apply_T(dims, x));
}

GaussianSum materialize_trace(const GaussianSum& U, const tspace::SystemDims& dims) {
    check_dim(U, dims.n, "materialize_trace");
    const Eigen::MatrixXd T = tspace::dense_T(dims);
    GaussianSum out;
    out.dim = dims.m;
    out.terms.reserve(U.terms.size());
    for (const GaussianTerm& t : U.terms) {
        const Eigen::MatrixXd AT = t.qform * T;
        Eigen::MatrixXd M = T.transpose() * AT;
        M = 0.5 * (M + M.transpose()).eval();
        const Eigen::VectorXd v = AT.transpose() * t.center;
        const auto llt = factor_spd(M, "materialize_trace");
        const Eigen::VectorXd x0 = llt.solve(v);
        // leftover of completing the square; nonnegative since it is the
        // minimum of the original form over the image of T
        const double shift = std::max(0.0, t.center.dot(t.qform * t.center) - v.dot(x0));
        out.terms.push_back({scaled_coeff(t.coeff, -shift), x0, M});
    }
    return compress(std::move(out));
}

double laplacian(const GaussianSum& g, const Eigen::VectorXd& x) {
    check_dim(g, x.size(), "laplacian");
    double sum = 0.0;
    for (const GaussianTerm& t : g.terms) {
        const auto llt = factor_spd(t.qform, "laplacian");
        const Eigen::VectorXd d = x - t.center;
        const Eigen::VectorXd u = llt.matrixU() * d;
        const Eigen::VectorXd grad_dir = t.qform * d;
        sum += t.coeff * std::exp(-u.squaredNorm()) *
               (4.0 * grad_dir.squaredNorm() - 2.0 * t.qform.trace());
    }
    return sum;
}

double laplacian_trace(const GaussianSum& U, const tspace::SystemDims& dims,
                       const Eigen::VectorXd& x) {
    return laplacian(materialize_trace(U, dims), x);
}

double residual(const GaussianSum& F, const GaussianSum& U, double mu,
                const tspace::SystemDims& dims, const std::vector<Eigen::VectorXd>& points) {
    check_dim(F, dims.n, "residual");
    check_dim(U, dims.n, "residual");
    const GaussianSum u = materialize_trace(U, dims);
    const GaussianSum f = materialize_trace(F, dims);
    const std::vector<double> u_vals = eval_many(u, points, "residual");
    const std::vector<double> f_vals = eval_many(f, points, "residual");
    double sup_f = 0.0, sup_res = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sup_f = std::max(sup_f, std::abs(f_vals[i]));
        const double res = -laplacian(u, points[i]) + mu * u_vals[i] - f_vals[i];
        sup_res = std::max(sup_res, std::abs(res));
    }
    return sup_res / std::max(1.0, sup_f);
}

DeviationReport compare_U_Utilde(const GaussianSum& F, double mu, double tol,
                                 const tspace::SystemDims& dims,
                                 const std::vector<Eigen::VectorXd>& points) {
    const KernelSpec degenerate = make_kernel(KernelMode::degenerate, mu, tol, F, dims);
    KernelSpec decoupled = degenerate;  // shared exponential sum and certification
    decoupled.mode = KernelMode::decoupled;
    const GaussianSum U = apply_screened_inverse(F, degenerate, dims);
    const GaussianSum Ut = apply_screened_inverse(F, decoupled, dims);

    double max_coeff = 0.0;
    for (const GaussianTerm& t : U.terms) max_coeff = std::max(max_coeff, std::abs(t.coeff));
    const double floor = 1e-12 * max_coeff;

    const std::vector<double> u_vals = eval_many(U, points, "compare_U_Utilde");
    const std::vector<double> ut_vals = eval_many(Ut, points, "compare_U_Utilde");
    DeviationReport report;
    report.per_point.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double diff = std::abs(u_vals[i] - ut_vals[i]);
        const double dev = diff == 0.0 ? 0.0 : diff / std::max(std::abs(u_vals[i]), floor);
        report.per_point.push_back(dev);
        report.max_rel_dev = std::max(report.max_rel_dev, dev);
    }
    return report;
}

GaussianSum antisymmetrize(const GaussianSum& F, const tspace::SystemDims& dims,
                           const std::vector<std::vector<int>>& group, int term_budget) {
    check_dim(F, dims.n, "antisymmetrize");
    if (group.empty()) throw input_error("antisymmetrize: empty permutation group");

    std::set<std::vector<int>> members(group.begin(), group.end());
    if (members.size() != group.size())
        throw input_error("antisymmetrize: repeated group element");
    for (const auto& g : group)
        for (const auto& h : group) {
            std::vector<int> composed(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) composed[i] = g[std::size_t(h[i])];
            if (!members.count(composed))
                throw input_error("antisymmetrize: set is not closed under composition");
        }

    if (long(group.size()) * long(F.terms.size()) > long(term_budget))
        throw capacity_error("antisymmetrize: output would exceed the term budget");

    GaussianSum out;
    out.dim = F.dim;
    out.terms.reserve(group.size() * F.terms.size());
    const double weight = 1.0 / double(group.size());
    for (const auto& g : group) {
        const tspace::PermutationAction action = tspace::build_actions(dims, g);
        const Eigen::MatrixXd Q = action.dense_Q();
        for (const GaussianTerm& t : F.terms) {
            Eigen::MatrixXd rotated = Q.transpose() * t.qform * Q;
            rotated = 0.5 * (rotated + rotated.transpose()).eval();
            out.terms.push_back({t.coeff * double(action.sign) * weight,
                                 action.apply_Q_inverse(t.center), rotated});
        }
    }
    return compress(std::move(out));
}

GaussianSum smooth_nu0(const GaussianSum& F, double eps) {
    if (!(eps > 0.0)) throw input_error("smooth_nu0: eps must be positive");
    const std::vector<expsum::Term> mollifier{{1.0, 0.5 * eps * eps}};
    return apply_kernel_terms(F, mollifier, 0.0, nullptr, kDefaultTermBudget, "smooth_nu0");
}

GaussianSum compress(GaussianSum s) {
    auto key_less = [](const GaussianTerm& a, const GaussianTerm& b) {
        for (Eigen::Index i = 0; i < a.center.size(); ++i)
            if (a.center[i] != b.center[i]) return a.center[i] < b.center[i];
        for (Eigen::Index i = 0; i < a.qform.size(); ++i)
            if (a.qform.data()[i] != b.qform.data()[i])
                return a.qform.data()[i] < b.qform.data()[i];
        return a.coeff < b.coeff;
    };
    std::sort(s.terms.begin(), s.terms.end(), key_less);

    std::vector<GaussianTerm> merged;
    merged.reserve(s.terms.size());
    for (GaussianTerm& t : s.terms) {
        if (!merged.empty()) {
            GaussianTerm& last = merged.back();
            const bool same_center =
                (last.center - t.center).cwiseAbs().maxCoeff() <= 1e-12;
            const bool same_qform = (last.qform - t.qform).cwiseAbs().maxCoeff() <= 1e-12;
            if (same_center && same_qform) {
                last.coeff += t.coeff;
                continue;
            }
        }
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const GaussianTerm& t) { return t.coeff == 0.0; }),
                 merged.end());
    s.terms = std::move(merged);
    return s;
}

std::vector<Eigen::VectorXd> gaussian_points(int dim, int count, std::uint64_t seed) {
    if (dim < 1 || count < 0) throw input_error("gaussian_points: bad dimensions");
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        rng::NormalStream stream(seed, std::uint64_t(i));
        Eigen::VectorXd p(dim);
        for (int k = 0; k < dim; ++k) p[k] = stream.next();
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace screenlap::gausscalc
