#pragma once

#include <optional>
#include <span>

#include "plucker/core.hpp"

namespace plucker {

/// Relative threshold on |a -+ b| / max(|a|, |b|) below which the equal/opposite branches apply.
/// Roughly the square root of double epsilon.
inline constexpr double kDefaultDegeneracyTol = 0x1p-26;

struct LambdaRoots {
    std::optional<double> lambda1;  // absent when p == 0
    double lambda2;
};

/// Scalar pipeline of the multiplier method for one input.
struct LmpcIntermediates {
    double p;     // a.b
    double q;     // |a|^2 + |b|^2
    double disc;  // q^2 - 4 p^2
    std::optional<double> lambda1;
    double lambda2;  // the selected multiplier
    double scale;    // 1 / (1 - lambda2^2)
};

/// Roots of p*l^2 - q*l + p = 0. The small root is evaluated as 2p / (q + sqrt(q^2 - 4p^2)),
/// which is exact at p == 0 and free of cancellation as p -> 0.
LambdaRoots lambda_roots(double p, double q);

LmpcIntermediates lmpc_intermediates(const VecPair& input);

/// Objective along the stationary curve x(l) = (a - l b)/(1 - l^2), y(l) = (b - l a)/(1 - l^2):
/// g(l) = (l / (1 - l^2))^2 (q l^2 - 4 p l + q).
double g_value(double lambda, double p, double q);

/// Closed-form projection of (a, b) onto the quadric x.y = 0, any dimension >= 2.
CorrectionResult correct_lmpc(const VecPair& input, double degeneracy_tol = kDefaultDegeneracyTol);

/// Allocation-free core of correct_lmpc. `x` and `y` must have a.size() entries.
/// `lambda` receives the multiplier on the generic and orthogonal branches, NaN otherwise.
Branch lmpc_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
                   std::span<double> y, double degeneracy_tol, double& lambda) noexcept;

}  // namespace plucker
