#pragma once
// Dense symmetric eigensolver (LAPACK dsyevd) and small helpers.
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "pcf/error.hpp"

namespace pcf {

struct SymEig {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // orthonormal columns (empty if not requested)
};

inline SymEig sym_eig(const Eigen::MatrixXd& M, bool want_vectors) {
    const lapack_int n = static_cast<lapack_int>(M.rows());
    SymEig out;
    out.values.resize(n);
    if (n == 0) return out;
    Eigen::MatrixXd a = M; // column major
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                                     out.values.data());
    if (info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
    if (want_vectors) out.vectors = std::move(a);
    return out;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return Eigen::VectorXd();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues();
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& M) {
    if (M.size() == 0) return Eigen::VectorXd();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues();
}

// Smallest characteristic root, i.e. smallest singular value.
template <class Mat>
double rho_min(const Mat& M) {
    auto s = singular_values(Eigen::MatrixXcd(M.template cast<std::complex<double>>()));
    return s.size() ? s.minCoeff() : 0.0;
}

} // namespace pcf
