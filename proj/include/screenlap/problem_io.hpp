#pragma once

#include <optional>
#include <string>

#include "screenlap/gausscalc.hpp"

namespace screenlap::io {

// Problem documents are JSON ("screenlap.problem/1"):
//   {
//     "schema": "screenlap.problem/1",
//     "electrons": 2,
//     "mu": 1.0,
//     "kernel": { "tol": 1e-3 },            (or { "h":..., "k1":..., "k2":... })
//     "rhs": [ { "coeff": 1.0,
//                "center": [ ... 3N(N+1)/2 values ... ],
//                "qform_lower": [ ... row-major lower triangle ... ] } ]
//   }
// Solutions use "screenlap.solution/1" and serialize Gaussian sums with the
// same term layout.

struct Problem {
    tspace::SystemDims dims;
    double mu = 1.0;
    double kernel_tol = 1e-3;
    std::optional<expsum::GridParams> kernel_grid;  // explicit grid overrides tol
    gausscalc::GaussianSum rhs;                     // over R^n
};

Problem load_problem(const std::string& path);

// Serialized term list for embedding in reports and solution files.
std::string sum_to_json_text(const gausscalc::GaussianSum& s, int indent = 2);

// Parses a term list of the same shape; validates against the expected
// dimension.
gausscalc::GaussianSum sum_from_json_text(const std::string& text, int expected_dim);

struct SolveReport {
    Problem problem;
    gausscalc::KernelSpec kernel;  // the shared, certified exponential sum
    gausscalc::GaussianSum degenerate;
    gausscalc::GaussianSum decoupled;
    double residual = 0;
    double max_rel_deviation = 0;
    int points = 0;
    std::uint64_t seed = 0;
};

void save_solution(const SolveReport& report, const std::string& path);

}  // namespace screenlap::io
