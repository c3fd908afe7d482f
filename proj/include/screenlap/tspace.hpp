#pragma once

#include <Eigen/Dense>
#include <vector>

#include "screenlap/errors.hpp"

namespace screenlap::tspace {

// Dimensions of the N-particle lifting.  Vectors in R^m hold N position
// blocks of size three; vectors in R^n hold those blocks followed by one
// block per pair (i,j), i<j, in lexicographic order.
struct SystemDims {
    int electrons = 0;  // N
    int m = 0;          // 3N
    int n = 0;          // 3N(N+1)/2
    int mprime = 0;     // 3(N-1)

    static SystemDims for_electrons(int n_electrons);

    // 0-based particle indices i<j -> position of the pair block among the
    // N(N-1)/2 difference blocks.
    int pair_index(int i, int j) const;
    // offset of the pair block inside an R^n vector
    int pair_offset(int i, int j) const { return 3 * (electrons + pair_index(i, j)); }
};

// y = Tx: y|_i = x_i, y|_ij = (x_i - x_j)/sqrt(2)
Eigen::VectorXd apply_T(const SystemDims& dims, const Eigen::VectorXd& x);

// adjoint: (T^t w)_i = w_i + sum_{j>i} w_ij/sqrt(2) - sum_{j<i} w_ji/sqrt(2)
Eigen::VectorXd apply_Tt(const SystemDims& dims, const Eigen::VectorXd& omega);

// ||Tx||^2 = ((N+2)/2)||x||^2 - (1/2)||x_1+...+x_N||^2, evaluated without
// forming Tx
double t_norm_sq(const SystemDims& dims, const Eigen::VectorXd& x);

// Exact spectrum of T^t: 1 with multiplicity three, sqrt((N+2)/2) with
// multiplicity m-3.  Returned descending.
std::vector<double> singular_values_Tt(const SystemDims& dims);

double spectral_norm_Tt(const SystemDims& dims);

// Dense n x m assembly.  The apply_* routines above are matrix-free; this
// exists for spectral checks and for forming T T^t where a factorization of
// the full matrix is genuinely needed.
Eigen::MatrixXd dense_T(const SystemDims& dims);

// Orthogonal actions induced by a particle permutation: P permutes the
// position blocks of R^m, Q additionally transports the pair blocks of R^n
// with a sign when the pair orientation flips.
struct PermutationAction {
    SystemDims dims;
    std::vector<int> perm;  // 0-based images, perm[i] = pi(i)
    int sign = 1;           // permutation signature

    Eigen::VectorXd apply_P(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_Q(const Eigen::VectorXd& y) const;
    Eigen::VectorXd apply_P_inverse(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_Q_inverse(const Eigen::VectorXd& y) const;

    // dense n x n matrix of Q (a signed block permutation)
    Eigen::MatrixXd dense_Q() const;
};

// Validates that perm is a bijection of {0,..,N-1} and precomputes the sign.
PermutationAction build_actions(const SystemDims& dims, const std::vector<int>& perm);

// All N! permutations in lexicographic order (guarded: N <= 8).
std::vector<std::vector<int>> all_permutations(int n_electrons);

}  // namespace screenlap::tspace
