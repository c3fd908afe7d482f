#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "screenlap/expsum.hpp"
#include "screenlap/tspace.hpp"

namespace screenlap::gausscalc {

// Calculus over finite sums of shifted anisotropic Gaussians.  The class is
// closed under Fourier transform, under multiplication of the transform by
// Gaussian kernel factors, and under restriction to the image of the trace
// map, so the screened-Laplace solve never leaves it.

struct GaussianTerm {
    double coeff = 0;
    Eigen::VectorXd center;  // length d
    Eigen::MatrixXd qform;   // d x d symmetric positive definite
};

// Validates dimensions, symmetry, and positive definiteness (via a Cholesky
// factorization); throws input_error otherwise.
GaussianTerm make_term(double coeff, const Eigen::VectorXd& center,
                       const Eigen::MatrixXd& qform);

struct GaussianSum {
    int dim = 0;
    std::vector<GaussianTerm> terms;  // empty = the zero function
};

// Validates every term against dim.
GaussianSum make_sum(int dim, std::vector<GaussianTerm> terms);

// A transform-side term coeff * exp(-w^t qform w) * e^{-i w.shift}: real
// amplitude with the physical-space center carried as a phase, never
// materialized as complex data.
struct PhasedGaussianTerm {
    double coeff = 0;
    Eigen::VectorXd shift;
    Eigen::MatrixXd qform;
};

// Symmetric-convention transform (prefactor (1/sqrt(2 pi))^d in both
// directions): coeff picks up (1/sqrt(2))^d det(qform)^{-1/2}, the quadratic
// form becomes qform^{-1}/4, the center moves into the phase.
PhasedGaussianTerm fourier(const GaussianTerm& t);
GaussianTerm inverse_fourier(const PhasedGaussianTerm& t);

// Which quadratic form the resolvent kernel sees: the plain Laplacian
// multiplier |w|^2, or the degenerate-operator multiplier |T^t w|^2.
enum class KernelMode { decoupled, degenerate };

struct KernelSpec {
    KernelMode mode = KernelMode::decoupled;
    double mu = 1.0;
    expsum::ExpSum sum;  // approximates 1/rho on [certified_lo, certified_hi]
    // certification metadata (zero when the spec was assembled by hand)
    double certified_tol = 0;
    double certified_lo = 0;
    double certified_hi = 0;
};

// Builds an exponential-sum kernel certified on [mu, mu + L*scale], where L
// bounds the transform-side support of F (the radius beyond which its
// Gaussian mass is below double precision) and scale accounts for the
// spectral norm of T^t in degenerate mode.
KernelSpec make_kernel(KernelMode mode, double mu, double tol, const GaussianSum& F,
                       const tspace::SystemDims& dims);
// Decoupled-mode kernel for a right-hand side over plain R^d.
KernelSpec make_kernel(KernelMode mode, double mu, double tol, const GaussianSum& F);
// Same certification against the band required by F, but with a caller-fixed
// grid instead of the parameter search.  The grid uses the convention of
// suggest_params: it is rescaled by mu/10 so its accuracy window sits inside
// the approximation interval.  Throws certification_error when the grid does
// not meet tol on the band.
KernelSpec make_kernel_from_grid(KernelMode mode, double mu, double tol,
                                 const expsum::GridParams& grid, const GaussianSum& F,
                                 const tspace::SystemDims& dims);

inline constexpr int kDefaultTermBudget = 100000;

// The screened solve: transform F, multiply by sum_k a_k e^{-b_k mu}
// exp(-b_k S-form), transform back.  Output has |F| * |kernel| terms before
// compression; exceeding the budget raises capacity_error.
GaussianSum apply_screened_inverse(const GaussianSum& F, const KernelSpec& kernel,
                                   const tspace::SystemDims& dims,
                                   int term_budget = kDefaultTermBudget);
// Decoupled-mode overload for right-hand sides over plain R^d (no trace map).
GaussianSum apply_screened_inverse(const GaussianSum& F, const KernelSpec& kernel,
                                   int term_budget = kDefaultTermBudget);

double eval(const GaussianSum& U, const Eigen::VectorXd& y);

// U composed with the trace map: x -> U(Tx).
double eval_trace(const GaussianSum& U, const tspace::SystemDims& dims,
                  const Eigen::VectorXd& x);

// The same composition as an explicit GaussianSum over R^m (complete the
// square in T^t qform T).
GaussianSum materialize_trace(const GaussianSum& U, const tspace::SystemDims& dims);

// Laplacian of a GaussianSum at a point, closed form.
double laplacian(const GaussianSum& g, const Eigen::VectorXd& x);

// Laplacian of the trace x -> U(Tx).
double laplacian_trace(const GaussianSum& U, const tspace::SystemDims& dims,
                       const Eigen::VectorXd& x);

// sup over the points of |-(Delta u)(x) + mu u(x) - f(x)| / max(1, sup|f|),
// where u, f are the traces of U, F.
double residual(const GaussianSum& F, const GaussianSum& U, double mu,
                const tspace::SystemDims& dims, const std::vector<Eigen::VectorXd>& points);

struct DeviationReport {
    double max_rel_dev = 0;
    std::vector<double> per_point;
};

// Solves with both kernel modes on one shared exponential sum and reports
// the pointwise relative gap between the two solutions.
DeviationReport compare_U_Utilde(const GaussianSum& F, double mu, double tol,
                                 const tspace::SystemDims& dims,
                                 const std::vector<Eigen::VectorXd>& points);

// Signed group average (1/|G|) sum_g sign(g) F(Q_g y).  The group must be
// closed under composition.
GaussianSum antisymmetrize(const GaussianSum& F, const tspace::SystemDims& dims,
                           const std::vector<std::vector<int>>& group,
                           int term_budget = kDefaultTermBudget);

// Mollification with the order-zero kernel: exact on Gaussian sums (adds
// eps^2/2 per axis to the transform-side quadratic form).
GaussianSum smooth_nu0(const GaussianSum& F, double eps);

// Canonical ordering plus merging of coincident terms (centers and qforms
// within 1e-12 in max norm); zero-coefficient terms are dropped.
GaussianSum compress(GaussianSum s);

// Deterministic standard-normal sample points (counter-based draws).
std::vector<Eigen::VectorXd> gaussian_points(int dim, int count, std::uint64_t seed);

}  // namespace screenlap::gausscalc
