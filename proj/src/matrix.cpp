#include "neurogrow/matrix.hpp"

#include <cmath>

namespace neurogrow {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != m.cols()) throw DimensionError("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = b.cols(), k = a.cols();
#pragma omp parallel for schedule(static) if (a.rows() * n * k > 65536)
    for (long long ii = 0; ii < static_cast<long long>(a.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b.row(p);
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
    return c;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("matmul_bt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    const std::size_t n = b.rows(), k = a.cols();
#pragma omp parallel for schedule(static) if (a.rows() * n * k > 65536)
    for (long long ii = 0; ii < static_cast<long long>(a.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
    return c;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_at: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    const std::size_t m = a.cols(), n = b.cols(), k = a.rows();
#pragma omp parallel for schedule(static) if (m * n * k > 65536)
    for (long long jj = 0; jj < static_cast<long long>(m); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double* cj = c.row(j);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a(p, j);
            const double* bp = b.row(p);
            for (std::size_t q = 0; q < n; ++q) cj[q] += av * bp[q];
        }
    }
    return c;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

bool all_finite(const Matrix& m) {
    for (double v : m.values())
        if (!std::isfinite(v)) return false;
    return true;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw DimensionError("max_abs_diff: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

double draw_normal(Rng& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    return dist(rng);
}

}  // namespace neurogrow
