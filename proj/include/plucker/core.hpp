#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "plucker/errors.hpp"

namespace plucker {

/// Finite real vector of dimension >= 2. Validated on construction, immutable afterwards.
class RealVec {
public:
    explicit RealVec(std::vector<double> components);
    RealVec(std::initializer_list<double> components);
    explicit RealVec(std::span<const double> components);

    static RealVec zeros(std::size_t dim);

    std::size_t dim() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    std::span<const double> values() const noexcept { return data_; }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    RealVec scaled(double c) const;
    double norm() const noexcept;
    double squared_norm() const noexcept;

    friend bool operator==(const RealVec&, const RealVec&) = default;

private:
    std::vector<double> data_;
};

/// The unconstrained input (a, b).
class VecPair {
public:
    VecPair(RealVec a, RealVec b);

    const RealVec& a() const noexcept { return a_; }
    const RealVec& b() const noexcept { return b_; }
    std::size_t dim() const noexcept { return a_.dim(); }

private:
    RealVec a_;
    RealVec b_;
};

enum class Branch { Generic, OrthogonalInput, EqualVectors, OppositeVectors, BothZero };
enum class Method { LMPC, BS, BS_LSVD, BS_ITER };

std::string_view to_string(Branch branch) noexcept;
std::string_view to_string(Method method) noexcept;
/// Accepts "lmpc", "bs", "bs-lsvd", "bs-iter" (case-insensitive, '_' or '-').
std::optional<Method> parse_method(std::string_view name);

struct CorrectionResult {
    RealVec x;
    RealVec y;
    double objective;
    std::optional<double> lambda;
    Branch branch;
    Method method;
};

/// Direction/moment pair satisfying the Klein constraint |u.v| <= tol * (1 + |u||v|).
class PluckerLine {
public:
    static constexpr double kDefaultTolerance = 1e-9;

    PluckerLine(RealVec direction, RealVec moment, double tolerance = kDefaultTolerance);
    static PluckerLine from_correction(const CorrectionResult& result,
                                       double tolerance = kDefaultTolerance);

    const RealVec& direction() const noexcept { return direction_; }
    const RealVec& moment() const noexcept { return moment_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    RealVec direction_;
    RealVec moment_;
    double tolerance_;
};

// Row-major 2x2, indexed m[row][col].
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Small dense row-major matrix. Only what the correction methods and the oracle need.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> row_major);
    static Matrix identity(std::size_t n);
    static Matrix from_columns(const RealVec& c0, const RealVec& c1);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    Matrix transposed() const;
    double frobenius_norm() const noexcept;
    std::vector<double> column(std::size_t c) const;

    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend Matrix operator-(const Matrix& lhs, const Matrix& rhs);

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

// Span helpers shared by the allocation-free kernels.
double dot(std::span<const double> u, std::span<const double> v) noexcept;
double squared_norm(std::span<const double> u) noexcept;
double squared_distance(std::span<const double> u, std::span<const double> v) noexcept;

/// x.y as the plain sum of componentwise products.
double klein_residual(const RealVec& x, const RealVec& y);

/// |a - x|^2 + |b - y|^2.
double objective(const VecPair& input, const RealVec& x, const RealVec& y);

}  // namespace plucker
