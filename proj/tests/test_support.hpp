#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "plucker/core.hpp"
#include "plucker/oracle.hpp"

namespace plucker::test {

inline VecPair uniform_pair(Rng& rng, std::size_t dim = 3) {
    std::vector<double> a(dim);
    std::vector<double> b(dim);
    for (double& v : a) v = 2.0 * rng.uniform() - 1.0;
    for (double& v : b) v = 2.0 * rng.uniform() - 1.0;
    return VecPair{RealVec(std::move(a)), RealVec(std::move(b))};
}

inline double max_abs_diff(const RealVec& u, const RealVec& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
    return m;
}

inline bool bit_identical(const RealVec& u, const RealVec& v) {
    if (u.dim() != v.dim()) return false;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        if (std::signbit(u[i]) != std::signbit(v[i]) || u[i] != v[i]) return false;
    }
    return true;
}

}  // namespace plucker::test
