#pragma once
// Small dense matrices over Q with row reduction.
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "pcf/error.hpp"

namespace pcf {

class QMatrix {
public:
    QMatrix() = default;
    QMatrix(int r, int c) : rows_(r), cols_(c), a_(static_cast<std::size_t>(r) * c, mpq_class(0)) {}
    static QMatrix identity(int n) {
        QMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    mpq_class& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const mpq_class& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    friend QMatrix operator*(const QMatrix& A, const QMatrix& B) {
        if (A.cols_ != B.rows_) throw DomainError("shape mismatch");
        QMatrix C(A.rows_, B.cols_);
        for (int i = 0; i < A.rows_; ++i)
            for (int k = 0; k < A.cols_; ++k) {
                if (A(i, k) == 0) continue;
                for (int j = 0; j < B.cols_; ++j) C(i, j) += A(i, k) * B(k, j);
            }
        return C;
    }
    friend QMatrix operator+(QMatrix A, const QMatrix& B) {
        for (std::size_t i = 0; i < A.a_.size(); ++i) A.a_[i] += B.a_[i];
        return A;
    }
    friend QMatrix operator-(QMatrix A, const QMatrix& B) {
        for (std::size_t i = 0; i < A.a_.size(); ++i) A.a_[i] -= B.a_[i];
        return A;
    }
    friend QMatrix operator*(const mpq_class& s, QMatrix A) {
        for (auto& v : A.a_) v *= s;
        return A;
    }
    QMatrix transpose() const {
        QMatrix T(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
        return T;
    }
    friend bool operator==(const QMatrix& A, const QMatrix& B) {
        return A.rows_ == B.rows_ && A.cols_ == B.cols_ && A.a_ == B.a_;
    }

    Eigen::MatrixXd to_double() const {
        Eigen::MatrixXd M(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) M(i, j) = (*this)(i, j).get_d();
        return M;
    }

    // Reduced row echelon form in place; returns pivot columns.
    std::vector<int> rref() {
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows_; ++c) {
            int p = -1;
            for (int i = r; i < rows_; ++i)
                if ((*this)(i, c) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            for (int j = 0; j < cols_; ++j) std::swap((*this)(r, j), (*this)(p, j));
            mpq_class inv = 1 / (*this)(r, c);
            for (int j = 0; j < cols_; ++j) (*this)(r, j) *= inv;
            for (int i = 0; i < rows_; ++i) {
                if (i == r || (*this)(i, c) == 0) continue;
                mpq_class f = (*this)(i, c);
                for (int j = 0; j < cols_; ++j) (*this)(i, j) -= f * (*this)(r, j);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    int rank() const {
        QMatrix m = *this;
        return static_cast<int>(m.rref().size());
    }

    // Basis of the right kernel, one column per vector.
    QMatrix nullspace() const {
        QMatrix m = *this;
        auto piv = m.rref();
        std::vector<int> is_piv(cols_, -1);
        for (std::size_t k = 0; k < piv.size(); ++k) is_piv[piv[k]] = static_cast<int>(k);
        std::vector<int> free;
        for (int c = 0; c < cols_; ++c)
            if (is_piv[c] < 0) free.push_back(c);
        QMatrix K(cols_, static_cast<int>(free.size()));
        for (std::size_t f = 0; f < free.size(); ++f) {
            K(free[f], static_cast<int>(f)) = 1;
            for (std::size_t k = 0; k < piv.size(); ++k) K(piv[k], static_cast<int>(f)) = -m(static_cast<int>(k), free[f]);
        }
        return K;
    }

    mpq_class det() const {
        if (rows_ != cols_) throw DomainError("det of non-square matrix");
        QMatrix m = *this;
        mpq_class d = 1;
        for (int c = 0; c < cols_; ++c) {
            int p = -1;
            for (int i = c; i < rows_; ++i)
                if (m(i, c) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) return 0;
            if (p != c) {
                for (int j = 0; j < cols_; ++j) std::swap(m(c, j), m(p, j));
                d = -d;
            }
            d *= m(c, c);
            for (int i = c + 1; i < rows_; ++i) {
                if (m(i, c) == 0) continue;
                mpq_class f = m(i, c) / m(c, c);
                for (int j = c; j < cols_; ++j) m(i, j) -= f * m(c, j);
            }
        }
        return d;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<mpq_class> a_;
};

} // namespace pcf
