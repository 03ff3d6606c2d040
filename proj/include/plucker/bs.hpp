#pragma once

#include <array>
#include <span>
#include <vector>

#include "plucker/core.hpp"

namespace plucker {

/// A = U * diag(s) * V^T for an n x 2 matrix; V columns are the right singular vectors.
struct ThinSvd {
    Matrix u;  // n x 2, orthonormal columns
    std::array<double, 2> s;
    Mat2 v;
};

/// Closed-form thin SVD of an n x 2 matrix through the 2 x 2 Gram eigenproblem.
/// s[0] >= s[1] >= 0; the first nonzero entry of each column of V is nonnegative.
/// A rank-one input gets its second left singular vector completed to an orthonormal pair.
ThinSvd svd_thin_n2(const Matrix& a);

struct JacobiSvd {
    Matrix u;              // m x n
    std::vector<double> s; // descending
    Matrix v;              // n x n
    int sweeps;
};

/// One-sided (Hestenes) Jacobi SVD of an m x n matrix, m >= n. General-purpose and iterative;
/// used as the iterative-SVD baseline. Columns of U whose singular value is zero are left zero.
JacobiSvd jacobi_svd(const Matrix& a, int max_sweeps = 60);

/// Everything the SVD-based projection builds on its way to (x, y).
struct BsIntermediates {
    Matrix u;   // n x 2
    Mat2 s;     // diag(s1, s2)
    Mat2 v;
    Mat2 z;     // S V^T
    Mat2 t;     // [[z01, z11], [z10, -z00]]
    Mat2 vhat;  // [[h0, -h1], [h1, h0]], h the minimizing right singular vector of T
};

/// Intermediates of correct_bs (closed-form thin SVD for both decompositions).
BsIntermediates bs_intermediates(const VecPair& input);

/// Intermediates of correct_bs_lsvd; dim must be 3 and A must have rank two.
BsIntermediates bs_lsvd_intermediates(const VecPair& input);

/// SVD-based projection with the corrected T layout; thin SVDs in closed form.
CorrectionResult correct_bs(const VecPair& input);

/// Same projection, both SVDs computed by the iterative Jacobi routine.
CorrectionResult correct_bs_iter(const VecPair& input);

/// Fully scalar closed-form variant for dim 3.
CorrectionResult correct_bs_lsvd(const VecPair& input);

// Allocation-free kernels. They return false when A == 0 and leave x, y untouched.
bool bs_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
               std::span<double> y) noexcept;
bool bs_lsvd_kernel(std::span<const double, 3> a, std::span<const double, 3> b,
                    std::span<double, 3> x, std::span<double, 3> y, Branch& branch) noexcept;
// Allocates (general SVD on dynamic matrices).
bool bs_iter_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
                    std::span<double> y);

}  // namespace plucker
