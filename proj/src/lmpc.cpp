#include "plucker/lmpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace plucker {

namespace {

// Slack on q >= 2|p| for values that were rounded on the way in.
constexpr double kRootSlack = 8.0 * std::numeric_limits<double>::epsilon();

}  // namespace

LambdaRoots lambda_roots(double p, double q) {
    if (!std::isfinite(p) || !std::isfinite(q)) {
        throw InvalidInputError("lambda_roots: non-finite p or q");
    }
    if (q == 0.0) {
        throw DegenerateInputError("lambda_roots: q == 0 (both vectors are zero)");
    }
    if (q < 0.0 || 2.0 * std::abs(p) > q * (1.0 + kRootSlack)) {
        throw InvariantViolation("lambda_roots: q < 2|p| (p = " + std::to_string(p) +
                                 ", q = " + std::to_string(q) + ")");
    }
    const double root = std::sqrt(std::max(q * q - 4.0 * p * p, 0.0));
    LambdaRoots out{std::nullopt, 2.0 * p / (q + root)};
    if (p != 0.0) out.lambda1 = (q + root) / (2.0 * p);
    return out;
}

LmpcIntermediates lmpc_intermediates(const VecPair& input) {
    const double p = dot(input.a().values(), input.b().values());
    const double q = input.a().squared_norm() + input.b().squared_norm();
    const LambdaRoots roots = lambda_roots(p, q);
    const double alpha = roots.lambda2;
    return LmpcIntermediates{p, q, std::max(q * q - 4.0 * p * p, 0.0), roots.lambda1, alpha,
                             1.0 / (1.0 - alpha * alpha)};
}

double g_value(double lambda, double p, double q) {
    if (lambda == 1.0 || lambda == -1.0) {
        throw PoleError("g_value: lambda = +-1 is a pole");
    }
    const double phi = lambda / (1.0 - lambda * lambda);
    const double psi = q * lambda * lambda - 4.0 * p * lambda + q;
    return phi * phi * psi;
}

Branch lmpc_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
                   std::span<double> y, double degeneracy_tol, double& lambda) noexcept {
    const std::size_t n = a.size();
    double p = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    double minus = 0.0;
    double plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
        const double d = a[i] - b[i];
        const double s = a[i] + b[i];
        minus += d * d;
        plus += s * s;
    }
    const double q = aa + bb;

    if (q == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        std::fill(y.begin(), y.end(), 0.0);
        lambda = std::numeric_limits<double>::quiet_NaN();
        return Branch::BothZero;
    }
    if (p == 0.0) {
        std::copy(a.begin(), a.end(), x.begin());
        std::copy(b.begin(), b.end(), y.begin());
        lambda = 0.0;
        return Branch::OrthogonalInput;
    }
    const double threshold = degeneracy_tol * degeneracy_tol * std::max(aa, bb);
    if (minus <= threshold || plus <= threshold) {
        std::copy(a.begin(), a.end(), x.begin());
        std::fill(y.begin(), y.end(), 0.0);
        lambda = std::numeric_limits<double>::quiet_NaN();
        return minus <= threshold ? Branch::EqualVectors : Branch::OppositeVectors;
    }

    // q^2 - 4p^2 = |a-b|^2 |a+b|^2, and 1 -+ mu follow from the same sums, so nothing cancels
    // when a is close to +-b. x = h + d and y = h - d with h along a+b and d along a-b.
    const double root = std::sqrt(minus * plus);
    const double den = q + root;
    const double km = 0.5 * den / (minus + root);  // 1 / (2 (1 - mu))
    const double kp = 0.5 * den / (plus + root);   // 1 / (2 (1 + mu))
    for (std::size_t i = 0; i < n; ++i) {
        const double h = (a[i] + b[i]) * kp;
        const double d = (a[i] - b[i]) * km;
        x[i] = h + d;
        y[i] = h - d;
    }
    lambda = 2.0 * p / den;
    return Branch::Generic;
}

CorrectionResult correct_lmpc(const VecPair& input, double degeneracy_tol) {
    if (!(degeneracy_tol >= 0.0) || !std::isfinite(degeneracy_tol)) {
        throw InvalidInputError("correct_lmpc: degeneracy tolerance must be finite and >= 0");
    }
    const std::size_t n = input.dim();
    std::vector<double> x(n);
    std::vector<double> y(n);
    double lambda = 0.0;
    const Branch branch =
        lmpc_kernel(input.a().values(), input.b().values(), x, y, degeneracy_tol, lambda);

    RealVec xs(std::move(x));
    RealVec ys(std::move(y));
    const double f = objective(input, xs, ys);
    std::optional<double> multiplier;
    if (branch == Branch::Generic || branch == Branch::OrthogonalInput) multiplier = lambda;
    return CorrectionResult{std::move(xs), std::move(ys), f, multiplier, branch, Method::LMPC};
}

}  // namespace plucker
