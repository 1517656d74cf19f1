#pragma once

#include <cstddef>
#include <initializer_list>
#include <random>
#include <vector>

#include "neurogrow/errors.hpp"

namespace neurogrow {

using Rng = std::mt19937_64;

/// Dense row-major matrix of 64-bit floats.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A (m x k) * B (k x n).
Matrix matmul(const Matrix& a, const Matrix& b);

/// C = A (m x k) * B^T, with B given as (n x k).
Matrix matmul_bt(const Matrix& a, const Matrix& b);

/// C = A^T * B, with A given as (k x m) and B as (k x n).
Matrix matmul_at(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
bool all_finite(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// One normal draw with the given standard deviation.
double draw_normal(Rng& rng, double stddev);

}  // namespace neurogrow
