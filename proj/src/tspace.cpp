#include "screenlap/tspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace screenlap::tspace {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_length(const Eigen::VectorXd& v, int expected, const char* what) {
    if (v.size() != expected)
        throw input_error(std::string(what) + ": expected length " + std::to_string(expected) +
                          ", got " + std::to_string(v.size()));
}
}  // namespace

SystemDims SystemDims::for_electrons(int n_electrons) {
    if (n_electrons < 2) throw input_error("SystemDims: need at least two particles");
    SystemDims d;
    d.electrons = n_electrons;
    d.m = 3 * n_electrons;
    d.n = 3 * n_electrons * (n_electrons + 1) / 2;
    d.mprime = d.m - 3;
    return d;
}

int SystemDims::pair_index(int i, int j) const {
    if (i < 0 || j <= i || j >= electrons) throw input_error("pair_index: need 0 <= i < j < N");
    return i * electrons - i * (i + 1) / 2 + (j - i - 1);
}

Eigen::VectorXd apply_T(const SystemDims& dims, const Eigen::VectorXd& x) {
    check_length(x, dims.m, "apply_T");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dims.n);
    y.head(dims.m) = x;
    for (int i = 0; i < dims.electrons; ++i)
        for (int j = i + 1; j < dims.electrons; ++j)
            y.segment<3>(dims.pair_offset(i, j)) =
                kInvSqrt2 * (x.segment<3>(3 * i) - x.segment<3>(3 * j));
    return y;
}

Eigen::VectorXd apply_Tt(const SystemDims& dims, const Eigen::VectorXd& omega) {
    check_length(omega, dims.n, "apply_Tt");
    Eigen::VectorXd r = omega.head(dims.m);
    for (int i = 0; i < dims.electrons; ++i)
        for (int j = i + 1; j < dims.electrons; ++j) {
            const auto w = omega.segment<3>(dims.pair_offset(i, j));
            r.segment<3>(3 * i) += kInvSqrt2 * w;
            r.segment<3>(3 * j) -= kInvSqrt2 * w;
        }
    return r;
}

double t_norm_sq(const SystemDims& dims, const Eigen::VectorXd& x) {
    check_length(x, dims.m, "t_norm_sq");
    Eigen::Vector3d block_sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < dims.electrons; ++i) block_sum += x.segment<3>(3 * i);
    return 0.5 * (dims.electrons + 2) * x.squaredNorm() - 0.5 * block_sum.squaredNorm();
}

std::vector<double> singular_values_Tt(const SystemDims& dims) {
    std::vector<double> sigma(dims.m, std::sqrt(0.5 * (dims.electrons + 2)));
    sigma[dims.m - 1] = sigma[dims.m - 2] = sigma[dims.m - 3] = 1.0;
    return sigma;
}

double spectral_norm_Tt(const SystemDims& dims) { return std::sqrt(0.5 * (dims.electrons + 2)); }

Eigen::MatrixXd dense_T(const SystemDims& dims) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dims.n, dims.m);
    t.topRows(dims.m).setIdentity();
    for (int i = 0; i < dims.electrons; ++i)
        for (int j = i + 1; j < dims.electrons; ++j) {
            const int row = dims.pair_offset(i, j);
            for (int c = 0; c < 3; ++c) {
                t(row + c, 3 * i + c) = kInvSqrt2;
                t(row + c, 3 * j + c) = -kInvSqrt2;
            }
        }
    return t;
}

Eigen::VectorXd PermutationAction::apply_P(const Eigen::VectorXd& x) const {
    check_length(x, dims.m, "apply_P");
    Eigen::VectorXd r(dims.m);
    for (int i = 0; i < dims.electrons; ++i) r.segment<3>(3 * i) = x.segment<3>(3 * perm[i]);
    return r;
}

Eigen::VectorXd PermutationAction::apply_P_inverse(const Eigen::VectorXd& x) const {
    check_length(x, dims.m, "apply_P_inverse");
    Eigen::VectorXd r(dims.m);
    for (int i = 0; i < dims.electrons; ++i) r.segment<3>(3 * perm[i]) = x.segment<3>(3 * i);
    return r;
}

Eigen::VectorXd PermutationAction::apply_Q(const Eigen::VectorXd& y) const {
    check_length(y, dims.n, "apply_Q");
    Eigen::VectorXd r(dims.n);
    for (int i = 0; i < dims.electrons; ++i) r.segment<3>(3 * i) = y.segment<3>(3 * perm[i]);
    for (int i = 0; i < dims.electrons; ++i)
        for (int j = i + 1; j < dims.electrons; ++j) {
            const int pi = perm[i], pj = perm[j];
            if (pi < pj)
                r.segment<3>(dims.pair_offset(i, j)) = y.segment<3>(dims.pair_offset(pi, pj));
            else
                r.segment<3>(dims.pair_offset(i, j)) = -y.segment<3>(dims.pair_offset(pj, pi));
        }
    return r;
}

Eigen::VectorXd PermutationAction::apply_Q_inverse(const Eigen::VectorXd& y) const {
    check_length(y, dims.n, "apply_Q_inverse");
    Eigen::VectorXd r(dims.n);
    for (int i = 0; i < dims.electrons; ++i) r.segment<3>(3 * perm[i]) = y.segment<3>(3 * i);
    for (int i = 0; i < dims.electrons; ++i)
        for (int j = i + 1; j < dims.electrons; ++j) {
            const int pi = perm[i], pj = perm[j];
            if (pi < pj)
                r.segment<3>(dims.pair_offset(pi, pj)) = y.segment<3>(dims.pair_offset(i, j));
            else
                r.segment<3>(dims.pair_offset(pj, pi)) = -y.segment<3>(dims.pair_offset(i, j));
        }
    return r;
}

Eigen::MatrixXd PermutationAction::dense_Q() const {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dims.n, dims.n);
    for (int col = 0; col < dims.n; ++col) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dims.n);
        e(col) = 1.0;
        q.col(col) = apply_Q(e);
    }
    return q;
}

PermutationAction build_actions(const SystemDims& dims, const std::vector<int>& perm) {
    const int n = dims.electrons;
    if (int(perm.size()) != n) throw input_error("build_actions: permutation length != N");
    std::vector<bool> seen(n, false);
    for (int v : perm) {
        if (v < 0 || v >= n || seen[v]) throw input_error("build_actions: not a bijection");
        seen[v] = true;
    }
    int sign = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (perm[i] > perm[j]) sign = -sign;
    return PermutationAction{dims, perm, sign};
}

std::vector<std::vector<int>> all_permutations(int n_electrons) {
    if (n_electrons < 1 || n_electrons > 8)
        throw capacity_error("all_permutations: supported for 1 <= N <= 8");
    std::vector<int> p(n_electrons);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

}  // namespace screenlap::tspace
