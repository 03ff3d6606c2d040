#include "plucker/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plucker/lmpc.hpp"

namespace plucker {

namespace {

constexpr int kMaxRedraws = 100;
constexpr double kParallelTol = 1e-6;

// Gram-Schmidt of (s, t) in place; false if t is (nearly) parallel to s or s is ~0.
bool orthonormalize(std::span<double> s, std::span<double> t) noexcept {
    const double ns = std::sqrt(squared_norm(s));
    if (!(ns > 0.0)) return false;
    for (double& v : s) v /= ns;
    const double nt0 = std::sqrt(squared_norm(t));
    // Two passes keep s.t at rounding level.
    for (int pass = 0; pass < 2; ++pass) {
        const double c = dot(s, t);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] -= c * s[i];
    }
    const double nt = std::sqrt(squared_norm(t));
    if (!(nt > kParallelTol * nt0)) return false;
    for (double& v : t) v /= nt;
    return true;
}

void draw_pair(Rng& rng, std::span<double> s, std::span<double> t) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        for (double& v : s) v = rng.normal();
        for (double& v : t) v = rng.normal();
        if (orthonormalize(s, t)) return;
    }
    throw RngError("sample_orthonormal_pair: no usable draw in 100 attempts");
}

double line_residual_sq(std::span<const double> a, std::span<const double> s) noexcept {
    const double c = dot(a, s);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - c * s[i];
        acc += d * d;
    }
    return acc;
}

double projected(std::span<const double> a, std::span<const double> b, std::span<const double> s,
                 std::span<const double> t) noexcept {
    return line_residual_sq(a, s) + line_residual_sq(b, t);
}

struct SearchState {
    std::vector<double> s;
    std::vector<double> t;
    double value = std::numeric_limits<double>::infinity();
};

void sample_range(const VecPair& input, std::size_t count, Rng& rng, SearchState& best) {
    const std::size_t n = input.dim();
    std::vector<double> s(n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < count; ++i) {
        draw_pair(rng, s, t);
        const double f = projected(input.a().values(), input.b().values(), s, t);
        if (f < best.value) {
            best.value = f;
            best.s = s;
            best.t = t;
        }
    }
}

// (1+1) evolution strategy on the frame: perturb, re-orthonormalize, keep if better.
void refine_best(const VecPair& input, Rng& rng, SearchState& best) {
    const std::size_t n = input.dim();
    std::vector<double> s(n);
    std::vector<double> t(n);
    double sigma = 0.1;
    for (int step = 0; step < kRefineSteps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = best.s[i] + sigma * rng.normal();
            t[i] = best.t[i] + sigma * rng.normal();
        }
        if (!orthonormalize(s, t)) {
            sigma *= 0.5;
            continue;
        }
        const double f = projected(input.a().values(), input.b().values(), s, t);
        if (f < best.value) {
            best.value = f;
            best.s = s;
            best.t = t;
            sigma = std::min(sigma * 1.5, 1.0);
        } else {
            sigma = std::max(sigma * 0.9, 1e-12);
        }
    }
}

OracleReport make_report(SearchState&& best, std::size_t samples, double method_objective) {
    OrthonormalPair pair{RealVec(std::move(best.s)), RealVec(std::move(best.t))};
    return OracleReport{best.value, std::move(pair), samples, method_objective,
                        method_objective - best.value};
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

double Rng::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

OrthonormalPair::OrthonormalPair(RealVec s, RealVec t) : s_(std::move(s)), t_(std::move(t)) {
    if (s_.dim() != t_.dim()) throw DimensionError("OrthonormalPair: dimension mismatch");
    constexpr double tol = 1e-12;
    if (std::abs(s_.norm() - 1.0) > tol || std::abs(t_.norm() - 1.0) > tol ||
        std::abs(dot(s_.values(), t_.values())) > tol) {
        throw InvalidInputError("OrthonormalPair: s and t must be orthonormal");
    }
}

double OrthonormalPair::d1(const RealVec& a) const {
    if (a.dim() != dim()) throw DimensionError("OrthonormalPair::d1: dimension mismatch");
    return std::sqrt(line_residual_sq(a.values(), s_.values()));
}

double OrthonormalPair::d2(const RealVec& b) const {
    if (b.dim() != dim()) throw DimensionError("OrthonormalPair::d2: dimension mismatch");
    return std::sqrt(line_residual_sq(b.values(), t_.values()));
}

OrthonormalPair sample_orthonormal_pair(Rng& rng, std::size_t dim) {
    if (dim < 2) throw DimensionError("sample_orthonormal_pair: dim must be >= 2");
    std::vector<double> s(dim);
    std::vector<double> t(dim);
    draw_pair(rng, s, t);
    return OrthonormalPair{RealVec(std::move(s)), RealVec(std::move(t))};
}

double projected_objective(const VecPair& input, const OrthonormalPair& pair) {
    if (pair.dim() != input.dim()) throw DimensionError("projected_objective: dimension mismatch");
    return projected(input.a().values(), input.b().values(), pair.s().values(),
                     pair.t().values());
}

OracleReport global_min_search(const VecPair& input, std::size_t samples, Rng& rng, bool refine,
                               double method_objective) {
    if (samples < 1) throw InvalidInputError("global_min_search: samples must be >= 1");
    SearchState best;
    sample_range(input, samples, rng, best);
    if (refine) refine_best(input, rng, best);
    return make_report(std::move(best), samples, method_objective);
}

OracleReport global_min_search_parallel(const VecPair& input, std::size_t samples,
                                        std::uint64_t seed, bool refine, double method_objective,
                                        int workers) {
    if (samples < 1) throw InvalidInputError("global_min_search: samples must be >= 1");
#ifdef _OPENMP
    if (workers <= 0) workers = omp_get_max_threads();
#else
    workers = 1;
#endif
    const auto w_count = static_cast<std::size_t>(std::max(workers, 1));
    std::vector<SearchState> partial(w_count);

#pragma omp parallel for num_threads(workers) schedule(static, 1)
    for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(w_count); ++w) {
        const auto idx = static_cast<std::size_t>(w);
        const std::size_t begin = samples * idx / w_count;
        const std::size_t end = samples * (idx + 1) / w_count;
        Rng rng = Rng::for_stream(seed, idx);
        sample_range(input, end - begin, rng, partial[idx]);
    }

    // Ties resolve to the lowest worker index, independent of thread timing.
    std::size_t winner = 0;
    for (std::size_t w = 1; w < w_count; ++w) {
        if (partial[w].value < partial[winner].value) winner = w;
    }
    SearchState best = std::move(partial[winner]);
    if (refine) {
        Rng rng = Rng::for_stream(seed, w_count);
        refine_best(input, rng, best);
    }
    return make_report(std::move(best), samples, method_objective);
}

KktResiduals kkt_residuals(const VecPair& input, const CorrectionResult& result) {
    if (!result.lambda) {
        throw NotApplicableError("kkt_residuals: result carries no multiplier");
    }
    if (result.x.dim() != input.dim() || result.y.dim() != input.dim()) {
        throw DimensionError("kkt_residuals: dimension mismatch");
    }
    const double l = *result.lambda;
    const auto a = input.a().values();
    const auto b = input.b().values();
    const auto x = result.x.values();
    const auto y = result.y.values();
    double r1 = 0.0;
    double r2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e1 = a[i] - x[i] - l * y[i];
        const double e2 = b[i] - y[i] - l * x[i];
        r1 += e1 * e1;
        r2 += e2 * e2;
    }
    return KktResiduals{std::sqrt(r1), std::sqrt(r2), std::abs(dot(x, y))};
}

OrderingCheck check_candidate_ordering(const VecPair& input) {
    const double p = dot(input.a().values(), input.b().values());
    const double q = input.a().squared_norm() + input.b().squared_norm();
    if (p == 0.0) {
        throw NotApplicableError("check_candidate_ordering: p == 0 leaves a single candidate");
    }
    const LambdaRoots roots = lambda_roots(p, q);
    const double g2 = g_value(roots.lambda2, p, q);
    const double g1 = g_value(*roots.lambda1, p, q);
    const double slack = 1e-12 * q;
    return OrderingCheck{g2, g1, q, g2 <= g1 + slack && g1 <= q + slack};
}

double frobenius_identity_gap(const Matrix& u, const Matrix& a, const Matrix& b) {
    const std::size_t n = u.rows();
    const std::size_t k = u.cols();
    if (!(n > k) || a.rows() != k || a.cols() != k || b.rows() != n || b.cols() != k) {
        throw DimensionError("frobenius_identity_gap: expects U n x k, A k x k, B n x k, n > k");
    }
    const Matrix gram = u.transposed() * u;
    if ((gram - Matrix::identity(k)).frobenius_norm() > 1e-10) {
        throw InvalidInputError("frobenius_identity_gap: U must have orthonormal columns");
    }
    return (u * a - b).frobenius_norm() - (a - u.transposed() * b).frobenius_norm();
}

}  // namespace plucker
