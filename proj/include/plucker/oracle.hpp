#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "plucker/core.hpp"

namespace plucker {

/// Seedable generator with a platform-independent sample sequence.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard).
/// uniform(): the top 53 bits of one engine output scaled by 2^-53, in [0, 1).
/// normal(): Box-Muller on two uniforms, u1 mapped to (0, 1]; both variates of a pair are used,
///           cosine branch first.
/// for_stream(seed, index) derives independent seeds with the SplitMix64 finalizer.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    static Rng for_stream(std::uint64_t seed, std::uint64_t index);

    double uniform() noexcept;
    double normal() noexcept;
    std::uint64_t next_u64() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Ordered orthonormal pair (s, t).
class OrthonormalPair {
public:
    OrthonormalPair(RealVec s, RealVec t);

    const RealVec& s() const noexcept { return s_; }
    const RealVec& t() const noexcept { return t_; }
    std::size_t dim() const noexcept { return s_.dim(); }

    /// Distance from a to the line spanned by s.
    double d1(const RealVec& a) const;
    /// Distance from b to the line spanned by t.
    double d2(const RealVec& b) const;

private:
    RealVec s_;
    RealVec t_;
};

/// Uniform draw from the orthonormal 2-frames of R^dim (Gram-Schmidt of two Gaussian vectors).
OrthonormalPair sample_orthonormal_pair(Rng& rng, std::size_t dim);

/// f at x = (a.s) s, y = (b.t) t.
double projected_objective(const VecPair& input, const OrthonormalPair& pair);

struct OracleReport {
    double best_objective;
    OrthonormalPair best_pair;
    std::size_t samples;
    double method_objective;
    double gap;  // method_objective - best_objective; negative means the method beat every sample
};

inline constexpr int kRefineSteps = 1000;

/// Random search over orthonormal pairs, optionally followed by accept/reject refinement of the
/// best pair. Single worker; the reference for global_min_search_parallel.
OracleReport global_min_search(const VecPair& input, std::size_t samples, Rng& rng, bool refine,
                               double method_objective);

/// Sample loop split across OpenMP threads; worker w draws from Rng::for_stream(seed, w) and the
/// refinement uses stream `workers`. Deterministic for a fixed worker count. workers <= 0 uses
/// the OpenMP default.
OracleReport global_min_search_parallel(const VecPair& input, std::size_t samples,
                                        std::uint64_t seed, bool refine, double method_objective,
                                        int workers = 0);

struct KktResiduals {
    double r1;  // |a - x - l y|
    double r2;  // |b - y - l x|
    double r3;  // |x.y|
};

KktResiduals kkt_residuals(const VecPair& input, const CorrectionResult& result);

struct OrderingCheck {
    double g2;
    double g1;
    double q;
    bool ok;
};

/// g(l2) <= g(l1) <= q, each with 1e-12 q slack.
OrderingCheck check_candidate_ordering(const VecPair& input);

/// |U A - B| - |A - U^T B| for U (n x k, orthonormal columns), A (k x k), B (n x k), n > k.
double frobenius_identity_gap(const Matrix& u, const Matrix& a, const Matrix& b);

}  // namespace plucker
