#include "plucker/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace plucker {

namespace {

void validate_components(const std::vector<double>& v) {
    if (v.size() < 2) {
        throw DimensionError("RealVec requires dim >= 2, got " + std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw InvalidInputError("non-finite component at index " + std::to_string(i));
        }
    }
}

void require_same_dim(std::size_t lhs, std::size_t rhs, const char* what) {
    if (lhs != rhs) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(lhs) +
                             " vs " + std::to_string(rhs) + ")");
    }
}

}  // namespace

RealVec::RealVec(std::vector<double> components) : data_(std::move(components)) {
    validate_components(data_);
}

RealVec::RealVec(std::initializer_list<double> components)
    : RealVec(std::vector<double>(components)) {}

RealVec::RealVec(std::span<const double> components)
    : RealVec(std::vector<double>(components.begin(), components.end())) {}

RealVec RealVec::zeros(std::size_t dim) { return RealVec(std::vector<double>(dim, 0.0)); }

RealVec RealVec::scaled(double c) const {
    std::vector<double> out(data_);
    for (double& v : out) v *= c;
    return RealVec(std::move(out));
}

double RealVec::norm() const noexcept { return std::sqrt(squared_norm()); }

double RealVec::squared_norm() const noexcept { return plucker::squared_norm(data_); }

VecPair::VecPair(RealVec a, RealVec b) : a_(std::move(a)), b_(std::move(b)) {
    require_same_dim(a_.dim(), b_.dim(), "VecPair");
}

std::string_view to_string(Branch branch) noexcept {
    switch (branch) {
        case Branch::Generic: return "generic";
        case Branch::OrthogonalInput: return "orthogonal-input";
        case Branch::EqualVectors: return "equal-vectors";
        case Branch::OppositeVectors: return "opposite-vectors";
        case Branch::BothZero: return "both-zero";
    }
    return "unknown";
}

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::LMPC: return "lmpc";
        case Method::BS: return "bs";
        case Method::BS_LSVD: return "bs-lsvd";
        case Method::BS_ITER: return "bs-iter";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    std::string key;
    for (char c : name) {
        key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (Method m : {Method::LMPC, Method::BS, Method::BS_LSVD, Method::BS_ITER}) {
        if (key == to_string(m)) return m;
    }
    return std::nullopt;
}

PluckerLine::PluckerLine(RealVec direction, RealVec moment, double tolerance)
    : direction_(std::move(direction)), moment_(std::move(moment)), tolerance_(tolerance) {
    if (direction_.dim() != 3 || moment_.dim() != 3) {
        throw DimensionError("PluckerLine requires 3-dimensional direction and moment");
    }
    if (!(tolerance_ >= 0.0) || !std::isfinite(tolerance_)) {
        throw InvalidInputError("PluckerLine tolerance must be finite and nonnegative");
    }
    const double residual = std::abs(klein_residual(direction_, moment_));
    const double bound = tolerance_ * (1.0 + direction_.norm() * moment_.norm());
    if (residual > bound) {
        throw InvalidInputError("direction and moment violate the Klein constraint: |u.v| = " +
                                std::to_string(residual));
    }
}

PluckerLine PluckerLine::from_correction(const CorrectionResult& result, double tolerance) {
    return PluckerLine(result.x, result.y, tolerance);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> row_major)
    : rows_(rows), cols_(cols), data_(row_major) {
    if (data_.size() != rows * cols) {
        throw DimensionError("Matrix initializer has " + std::to_string(data_.size()) +
                             " entries, expected " + std::to_string(rows * cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_columns(const RealVec& c0, const RealVec& c1) {
    require_same_dim(c0.dim(), c1.dim(), "Matrix::from_columns");
    Matrix m(c0.dim(), 2);
    for (std::size_t i = 0; i < c0.dim(); ++i) {
        m(i, 0) = c0[i];
        m(i, 1) = c1[i];
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::frobenius_norm() const noexcept { return std::sqrt(plucker::squared_norm(data_)); }

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols_ != rhs.rows_) {
        throw DimensionError("Matrix product: inner dimensions differ");
    }
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t r = 0; r < lhs.rows_; ++r)
        for (std::size_t k = 0; k < lhs.cols_; ++k) {
            const double l = lhs(r, k);
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += l * rhs(k, c);
        }
    return out;
}

Matrix operator-(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows_ != rhs.rows_ || lhs.cols_ != rhs.cols_) {
        throw DimensionError("Matrix difference: shapes differ");
    }
    Matrix out(lhs);
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

double dot(std::span<const double> u, std::span<const double> v) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double squared_norm(std::span<const double> u) noexcept { return dot(u, u); }

double squared_distance(std::span<const double> u, std::span<const double> v) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return s;
}

double klein_residual(const RealVec& x, const RealVec& y) {
    require_same_dim(x.dim(), y.dim(), "klein_residual");
    return dot(x.values(), y.values());
}

double objective(const VecPair& input, const RealVec& x, const RealVec& y) {
    require_same_dim(input.dim(), x.dim(), "objective");
    require_same_dim(input.dim(), y.dim(), "objective");
    return squared_distance(input.a().values(), x.values()) +
           squared_distance(input.b().values(), y.values());
}

}  // namespace plucker
