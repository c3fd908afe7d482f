#pragma once

#include <optional>
#include <string>
#include <vector>

#include "screenlap/errors.hpp"

namespace screenlap::expsum {

// Finite sum of decaying exponentials approximating 1/r.  The grid
// construction places quadrature points kh, k1 <= k <= k2, on the
// substituted integral 1/r = ∫ exp(-e^s r + s) ds, giving weights
// h e^{-kh} and rates e^{-kh}.  The parameter h controls accuracy, the
// products k1 h and k2 h the approximation interval.

struct Term {
    double weight = 0;  // a_k > 0
    double rate = 0;    // b_k > 0
};

struct GridProvenance {
    double h = 0;
    int k1 = 0;
    int k2 = 0;
    double mu = 1.0;  // accumulated rescale factor
};

struct ExpSum {
    // sorted by descending rate; the value at r is sum of weight*exp(-rate*r)
    std::vector<Term> terms;
    std::optional<GridProvenance> provenance;
};

// Grid construction: terms (h e^{-kh}, e^{-kh}) for k1 <= k <= k2.
// k2 < k1 yields the empty (zero) sum.
ExpSum build(double h, int k1, int k2);

// Substitution r -> r/mu: term-wise (a/mu, b/mu).  The relative error on
// [mu, R mu] equals that of the input on [1, R].
ExpSum rescale(const ExpSum& v, double mu);

// sum of weight * exp(-rate * r), accumulated in descending-rate order
double eval(const ExpSum& v, double r);

// The window function h * sum_k exp(-e^{s-kh} + s - kh).  The grid sum
// satisfies v(r) = window(ln r)/r, so window - 1 is the relative error.
double window_value(double h, int k1, int k2, double s);

struct RelErrorReport {
    double sup_error = 0;    // sup over the grid of |r v(r) - 1|
    double argmax_r = 0;     // grid point attaining the sup
    int grid_points = 0;     // points actually used
    double max_form_gap = 0; // |direct - window| agreement over the grid
};

// Sup of |r v(r) - 1| over a log-uniform grid on [r_lo, r_hi].  When the
// sum carries grid provenance the window form is evaluated as well and the
// two are compared point by point.  grid_points = 0 selects at least 40
// points per h-period automatically.
RelErrorReport rel_error_sup_on(const ExpSum& v, double r_lo, double r_hi, int grid_points = 0);

// Convenience form on the interval [1, R].
RelErrorReport rel_error_sup(const ExpSum& v, double R, int grid_points = 0);

struct GridParams {
    double h = 0;
    int k1 = 0;
    int k2 = 0;
};

// Smallest grid (h halving from 2, boundary margins sized so truncation
// effects stay below tol/10) whose build + rescale(mu/...) certifies
// sup error <= tol on [10 mu, R mu / 10].  The parameters depend on R and
// tol only; mu enters through the rescale invariance.
// Throws capacity_error when no grid within the term budget certifies.
GridParams suggest_params(double mu, double R, double tol, int term_budget = 512);

// Two-column CSV (weight, rate) with provenance carried in '#' comments.
std::string to_csv(const ExpSum& v);
ExpSum from_csv(const std::string& text);

}  // namespace screenlap::expsum
