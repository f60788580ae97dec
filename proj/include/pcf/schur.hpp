#pragma once
// Trace of a symmetric matrix on a subset (Schur complement) and harmonic prolongation.
#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pcf/error.hpp"

namespace pcf {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Interior block treated as singular below this reciprocal condition number.
inline constexpr double kPoleRcond = 1e-13;

namespace detail {

template <class Mat>
Mat submatrix(const Mat& Q, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat S(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) S(i, j) = Q(rows[i], cols[j]);
    return S;
}

inline std::vector<int> complement(int n, const std::vector<int>& sub) {
    std::vector<char> in(n, 0);
    for (int v : sub) {
        if (v < 0 || v >= n) throw DomainError("subset index out of range");
        in[v] = 1;
    }
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (!in[v]) out.push_back(v);
    return out;
}

template <class Mat>
auto checked_lu(const Mat& M) {
    Eigen::PartialPivLU<Mat> lu(M);
    if (M.rows() > 0) {
        double rc = lu.rcond();
        if (!(rc >= kPoleRcond)) throw PoleError("pole of the trace map: singular interior block");
    }
    return lu;
}

} // namespace detail

// Q_{F'} = Q|F' - B (Q|F\F')^{-1} B^t, rows/cols ordered as F_prime.
template <class Mat>
Mat trace_on_subset(const Mat& Q, const std::vector<int>& F_prime) {
    const auto rest = detail::complement(static_cast<int>(Q.rows()), F_prime);
    Mat QF = detail::submatrix(Q, F_prime, F_prime);
    if (rest.empty()) return QF;
    Mat B = detail::submatrix(Q, F_prime, rest);
    Mat Bt = detail::submatrix(Q, rest, F_prime);
    auto lu = detail::checked_lu(Mat(detail::submatrix(Q, rest, rest)));
    Mat X = lu.solve(Bt);
    return QF - B * X;
}

// Hf = f on F', -(Q|F\F')^{-1} B^t f elsewhere.
template <class Mat, class Vec>
Vec harmonic_prolongation(const Mat& Q, const std::vector<int>& F_prime, const Vec& f) {
    const int n = static_cast<int>(Q.rows());
    const auto rest = detail::complement(n, F_prime);
    Vec h = Vec::Zero(n);
    for (std::size_t i = 0; i < F_prime.size(); ++i) h(F_prime[i]) = f(i);
    if (rest.empty()) return h;
    Mat Bt = detail::submatrix(Q, rest, F_prime);
    auto lu = detail::checked_lu(Mat(detail::submatrix(Q, rest, rest)));
    Vec inner = -lu.solve(Bt * f);
    for (std::size_t i = 0; i < rest.size(); ++i) h(rest[i]) = inner(i);
    return h;
}

} // namespace pcf
