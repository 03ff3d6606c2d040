#include "plucker/bs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace plucker {

namespace {

// Second singular value below this fraction of the first is treated as exact rank one.
constexpr double kRankTol = 1e-14;

struct GramEigen {
    double l1;  // larger eigenvalue
    double l2;
    Mat2 v;     // columns are eigenvectors, first nonzero entry of each nonnegative
};

void pin_sign(double& c0, double& c1) noexcept {
    if (c0 < 0.0 || (c0 == 0.0 && c1 < 0.0)) {
        c0 = -c0;
        c1 = -c1;
    }
}

// Eigen-decomposition of [[g11, g12], [g12, g22]] without subtractive cancellation in the
// eigenvector: of the two equivalent null-vector formulas, take the one with the larger norm.
GramEigen gram_eigen(double g11, double g12, double g22) noexcept {
    const double dif = g11 - g22;
    const double r = std::hypot(dif, 2.0 * g12);
    const double tr = g11 + g22;
    double e0 = 1.0;
    double e1 = 0.0;
    if (r > 0.0) {
        if (dif >= 0.0) {
            e0 = 0.5 * (r + dif);
            e1 = g12;
        } else {
            e0 = g12;
            e1 = 0.5 * (r - dif);
        }
        const double nv = std::hypot(e0, e1);
        e0 /= nv;
        e1 /= nv;
    }
    pin_sign(e0, e1);
    double f0 = -e1;
    double f1 = e0;
    pin_sign(f0, f1);
    return GramEigen{0.5 * (tr + r), 0.5 * (tr - r), Mat2{{{e0, f0}, {e1, f1}}}};
}

// Thin SVD of [a b] kept in scalar form so that U entries can be produced on demand.
struct ThinSvdCore {
    double s[2];
    Mat2 v;
    double inv_s1;
    // Regular second column: u2 = (A v2 - c u1) * inv_r. Completed: u2 = (e_k - u1_k u1) * inv_r.
    bool completed;
    double c;
    double inv_r;
    std::size_t k;

    double u1(std::span<const double> a, std::span<const double> b, std::size_t i) const noexcept {
        return (a[i] * v[0][0] + b[i] * v[1][0]) * inv_s1;
    }
    double u2(std::span<const double> a, std::span<const double> b, std::size_t i) const noexcept {
        const double u1i = u1(a, b, i);
        if (completed) {
            const double u1k = u1(a, b, k);
            return ((i == k ? 1.0 : 0.0) - u1k * u1i) * inv_r;
        }
        return (a[i] * v[0][1] + b[i] * v[1][1] - c * u1i) * inv_r;
    }
};

bool thin_svd_core(std::span<const double> a, std::span<const double> b,
                   ThinSvdCore& out) noexcept {
    const std::size_t n = a.size();
    double g11 = 0.0;
    double g12 = 0.0;
    double g22 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g11 += a[i] * a[i];
        g12 += a[i] * b[i];
        g22 += b[i] * b[i];
    }
    if (g11 + g22 == 0.0) return false;

    Mat2 v = gram_eigen(g11, g12, g22).v;
    double w11 = 0.0;
    double w22 = 0.0;
    double w12 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w1 = a[i] * v[0][0] + b[i] * v[1][0];
        const double w2 = a[i] * v[0][1] + b[i] * v[1][1];
        w11 += w1 * w1;
        w22 += w2 * w2;
        w12 += w1 * w2;
    }
    if (w22 > w11) {
        std::swap(v[0][0], v[0][1]);
        std::swap(v[1][0], v[1][1]);
        std::swap(w11, w22);
    }
    out.v = v;
    out.s[0] = std::sqrt(w11);
    out.s[1] = std::sqrt(w22);
    out.inv_s1 = 1.0 / out.s[0];
    out.c = w12 * out.inv_s1;
    const double r2 = w22 - out.c * out.c;
    const double r = std::sqrt(std::max(r2, 0.0));
    out.completed = !(r > kRankTol * out.s[0]);
    if (!out.completed) {
        out.inv_r = 1.0 / r;
        return true;
    }
    // u2: the coordinate axis least aligned with u1, made orthogonal to it.
    std::size_t k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(out.u1(a, b, i));
        if (m < best) {
            best = m;
            k = i;
        }
    }
    out.k = k;
    out.c = 0.0;
    out.inv_r = 1.0 / std::sqrt(1.0 - best * best);
    return true;
}

// Smaller-singular-value right singular vector of the 2 x 2 matrix t, via t^T t.
std::array<double, 2> minimizing_direction(const Mat2& t) noexcept {
    const double m11 = t[0][0] * t[0][0] + t[1][0] * t[1][0];
    const double m12 = t[0][0] * t[0][1] + t[1][0] * t[1][1];
    const double m22 = t[0][1] * t[0][1] + t[1][1] * t[1][1];
    const GramEigen e = gram_eigen(m11, m12, m22);
    return {e.v[0][1], e.v[1][1]};
}

Mat2 build_z(double s1, double s2, const Mat2& v) noexcept {
    // Z = S V^T
    return Mat2{{{s1 * v[0][0], s1 * v[1][0]}, {s2 * v[0][1], s2 * v[1][1]}}};
}

Mat2 build_t(const Mat2& z) noexcept { return Mat2{{{z[0][1], z[1][1]}, {z[1][0], -z[0][0]}}}; }

Mat2 build_vhat(const std::array<double, 2>& h) noexcept {
    return Mat2{{{h[0], -h[1]}, {h[1], h[0]}}};
}

// diag(V^_T Z)
std::array<double, 2> projected_diagonal(const Mat2& vhat, const Mat2& z) noexcept {
    return {vhat[0][0] * z[0][0] + vhat[1][0] * z[1][0],
            vhat[0][1] * z[0][1] + vhat[1][1] * z[1][1]};
}

CorrectionResult finish(const VecPair& input, std::vector<double> x, std::vector<double> y,
                        Method method, Branch branch = Branch::Generic) {
    RealVec xs(std::move(x));
    RealVec ys(std::move(y));
    const double f = objective(input, xs, ys);
    return CorrectionResult{std::move(xs), std::move(ys), f, std::nullopt, branch, method};
}

// ---------------------------------------------------------------------------------------------
// Scalar closed form for n = 3.

struct LsvdTrace {
    double s1, s2;
    double v11, v21, v12, v22;
    double z11, z12, z21, z22;
    double t11, t12, t21, t22;
    double h11, h12, h21, h22;
};

enum class LsvdStatus { Ok, Zero, RankOne };

// Eigenvector of the symmetric [[m11, m12], [m12, m22]] for eigenvalue st, normalized.
// Uses the form (m12 / (st - m11), 1) unless the other row gives a better-conditioned
// vector of the same direction.
void symmetric_eigvec(double m11, double m12, double m22, double st, double& e0,
                      double& e1) noexcept {
    const double d1 = st - m11;
    const double d2 = st - m22;
    if (std::abs(d1) >= std::abs(d2)) {
        if (d1 == 0.0) {
            e0 = 1.0;
            e1 = 0.0;
            return;
        }
        e0 = m12 / d1;
        e1 = 1.0;
    } else {
        e0 = 1.0;
        e1 = m12 / d2;
    }
    const double nv = std::sqrt(e0 * e0 + e1 * e1);
    e0 /= nv;
    e1 /= nv;
}

LsvdStatus lsvd_trace(std::span<const double, 3> a, std::span<const double, 3> b,
                      LsvdTrace& tr) noexcept {
    const double a11 = a[0], a21 = a[1], a31 = a[2];
    const double a12 = b[0], a22 = b[1], a32 = b[2];

    const double aa = a11 * a11 + a21 * a21 + a31 * a31;
    const double bb = a12 * a12 + a22 * a22 + a32 * a32;
    const double p = a11 * a12 + a21 * a22 + a31 * a32;
    if (aa + bb == 0.0) return LsvdStatus::Zero;

    // Gram eigenvalues; s1^2 - aa and s1^2 - bb evaluated without cancellation.
    const double dif = aa - bb;
    const double r = std::sqrt(dif * dif + 4.0 * p * p);
    const double s1sq = 0.5 * (aa + bb + r);
    double gap_a;  // s1^2 - aa
    double gap_b;  // s1^2 - bb
    if (dif >= 0.0) {
        gap_b = 0.5 * (r + dif);
        gap_a = gap_b > 0.0 ? 2.0 * p * p / (r + dif) : 0.0;
    } else {
        gap_a = 0.5 * (r - dif);
        gap_b = 2.0 * p * p / (r - dif);
    }
    const double s1 = std::sqrt(s1sq);

    double v11;
    double v21;
    if (gap_a >= gap_b && gap_a > 0.0) {
        v11 = p / gap_a;  // -(p) / (aa - s1^2)
        v21 = 1.0;
    } else if (gap_b > 0.0) {
        v11 = 1.0;
        v21 = p / gap_b;
    } else {
        v11 = 1.0;
        v21 = 0.0;
    }
    double nv = std::sqrt(v11 * v11 + v21 * v21);
    v11 /= nv;
    v21 /= nv;
    pin_sign(v11, v21);
    const double v12 = v21;
    const double v22 = -v11;

    // |A v2| rather than the Gram eigenvalue: accurate down to rank one.
    const double w1 = a11 * v12 + a12 * v22;
    const double w2 = a21 * v12 + a22 * v22;
    const double w3 = a31 * v12 + a32 * v22;
    const double s2 = std::sqrt(w1 * w1 + w2 * w2 + w3 * w3);

    tr.s1 = s1;
    tr.s2 = s2;
    tr.v11 = v11;
    tr.v21 = v21;
    tr.v12 = v12;
    tr.v22 = v22;
    if (!(s2 > kRankTol * s1)) return LsvdStatus::RankOne;

    tr.z11 = s1 * v11;
    tr.z12 = s1 * v21;
    tr.z21 = s2 * v12;
    tr.z22 = s2 * v22;

    tr.t11 = tr.z12;
    tr.t12 = tr.z22;
    tr.t21 = tr.z21;
    tr.t22 = -tr.z11;

    // Smallest singular direction of T from the eigenproblem of T^T T.
    const double m11 = tr.t11 * tr.t11 + tr.t21 * tr.t21;
    const double m12 = tr.t11 * tr.t12 + tr.t21 * tr.t22;
    const double m22 = tr.t12 * tr.t12 + tr.t22 * tr.t22;
    const double rt = std::sqrt((m11 - m22) * (m11 - m22) + 4.0 * m12 * m12);
    const double st1 = 0.5 * (m11 + m22 - rt);
    const double st2 = 0.5 * (m11 + m22 + rt);
    double h1;
    double h2;
    if (st1 <= st2) {
        symmetric_eigvec(m11, m12, m22, st1, h1, h2);
    } else {
        symmetric_eigvec(m11, m12, m22, st2, h1, h2);
    }
    tr.h11 = h1;
    tr.h12 = -h2;
    tr.h21 = h2;
    tr.h22 = h1;
    return LsvdStatus::Ok;
}

}  // namespace

ThinSvd svd_thin_n2(const Matrix& a) {
    if (a.cols() != 2 || a.rows() < 2) {
        throw DimensionError("svd_thin_n2 expects an n x 2 matrix with n >= 2");
    }
    const std::vector<double> c0 = a.column(0);
    const std::vector<double> c1 = a.column(1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (!std::isfinite(c0[i]) || !std::isfinite(c1[i])) {
            throw InvalidInputError("svd_thin_n2: non-finite entry");
        }
    }
    ThinSvdCore core{};
    if (!thin_svd_core(c0, c1, core)) {
        throw DegenerateInputError("svd_thin_n2: zero matrix");
    }
    ThinSvd out{Matrix(a.rows(), 2), {core.s[0], core.s[1]}, core.v};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out.u(i, 0) = core.u1(c0, c1, i);
        out.u(i, 1) = core.u2(c0, c1, i);
    }
    return out;
}

JacobiSvd jacobi_svd(const Matrix& a, int max_sweeps) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n || n == 0) throw DimensionError("jacobi_svd expects m >= n >= 1");

    Matrix w(a);
    Matrix v = Matrix::identity(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double alpha = 0.0;
                double beta = 0.0;
                double gamma = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    alpha += w(k, i) * w(k, i);
                    beta += w(k, j) * w(k, j);
                    gamma += w(k, i) * w(k, j);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double wi = w(k, i);
                    const double wj = w(k, j);
                    w(k, i) = c * wi - s * wj;
                    w(k, j) = s * wi + c * wj;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vi = v(k, i);
                    const double vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += w(k, j) * w(k, j);
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return norms[l] > norms[r]; });

    JacobiSvd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n), sweeps};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        const double sigma = norms[src];
        out.s[j] = sigma;
        std::size_t first = 0;
        while (first + 1 < n && v(first, src) == 0.0) ++first;
        const double sign = v(first, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.v(k, j) = sign * v(k, src);
        for (std::size_t k = 0; k < m; ++k) {
            out.u(k, j) = sigma > 0.0 ? sign * w(k, src) / sigma : 0.0;
        }
    }
    return out;
}

BsIntermediates bs_intermediates(const VecPair& input) {
    const Matrix a = Matrix::from_columns(input.a(), input.b());
    const ThinSvd svd = svd_thin_n2(a);
    const Mat2 z = build_z(svd.s[0], svd.s[1], svd.v);
    const Mat2 t = build_t(z);
    const Mat2 vhat = build_vhat(minimizing_direction(t));
    return BsIntermediates{svd.u, Mat2{{{svd.s[0], 0.0}, {0.0, svd.s[1]}}}, svd.v, z, t, vhat};
}

bool bs_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
               std::span<double> y) noexcept {
    ThinSvdCore core{};
    if (!thin_svd_core(a, b, core)) return false;
    const Mat2 z = build_z(core.s[0], core.s[1], core.v);
    const Mat2 vhat = build_vhat(minimizing_direction(build_t(z)));
    const auto d = projected_diagonal(vhat, z);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u1 = core.u1(a, b, i);
        const double u2 = core.u2(a, b, i);
        x[i] = (u1 * vhat[0][0] + u2 * vhat[1][0]) * d[0];
        y[i] = (u1 * vhat[0][1] + u2 * vhat[1][1]) * d[1];
    }
    return true;
}

bool bs_iter_kernel(std::span<const double> a, std::span<const double> b, std::span<double> x,
                    std::span<double> y) {
    const std::size_t n = a.size();
    Matrix am(n, 2);
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
        am(i, 0) = a[i];
        am(i, 1) = b[i];
        nonzero = nonzero || a[i] != 0.0 || b[i] != 0.0;
    }
    if (!nonzero) return false;

    const JacobiSvd svd = jacobi_svd(am);
    Mat2 v{{{svd.v(0, 0), svd.v(0, 1)}, {svd.v(1, 0), svd.v(1, 1)}}};
    const Mat2 z = build_z(svd.s[0], svd.s[1], v);
    const Mat2 t = build_t(z);

    const JacobiSvd tsvd = jacobi_svd(Matrix(2, 2, {t[0][0], t[0][1], t[1][0], t[1][1]}));
    const Mat2 vhat = build_vhat({tsvd.v(0, 1), tsvd.v(1, 1)});
    const auto d = projected_diagonal(vhat, z);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = svd.u(i, 0);
        const double u2 = svd.u(i, 1);
        x[i] = (u1 * vhat[0][0] + u2 * vhat[1][0]) * d[0];
        y[i] = (u1 * vhat[0][1] + u2 * vhat[1][1]) * d[1];
    }
    return true;
}

bool bs_lsvd_kernel(std::span<const double, 3> a, std::span<const double, 3> b,
                    std::span<double, 3> x, std::span<double, 3> y, Branch& branch) noexcept {
    LsvdTrace tr{};
    const LsvdStatus status = lsvd_trace(a, b, tr);
    if (status == LsvdStatus::Zero) return false;
    if (status == LsvdStatus::RankOne) {
        // Parallel columns: the optimum keeps the longer vector and zeroes the other.
        const double aa = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        const double bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        const double p = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        for (std::size_t i = 0; i < 3; ++i) {
            x[i] = aa >= bb ? a[i] : 0.0;
            y[i] = aa >= bb ? 0.0 : b[i];
        }
        branch = p >= 0.0 ? Branch::EqualVectors : Branch::OppositeVectors;
        return true;
    }

    const double s1 = tr.s1, s2 = tr.s2;
    const double v11 = tr.v11, v21 = tr.v21, v12 = tr.v12, v22 = tr.v22;
    const double h11 = tr.h11, h12 = tr.h12, h21 = tr.h21, h22 = tr.h22;

    const double u11 = (b[0] * v21 + a[0] * v11) / s1, u12 = (b[0] * v22 + a[0] * v12) / s2;
    const double u21 = (a[1] * v11 + b[1] * v21) / s1, u22 = (a[1] * v12 + b[1] * v22) / s2;
    const double u31 = (a[2] * v11 + b[2] * v21) / s1, u32 = (a[2] * v12 + b[2] * v22) / s2;

    const double dx = h11 * s1 * v11 + h21 * s2 * v12;
    const double dy = h12 * s1 * v21 + h22 * s2 * v22;
    x[0] = (u11 * h11 + u12 * h21) * dx;
    y[0] = (u11 * h12 + u12 * h22) * dy;
    x[1] = (u21 * h11 + u22 * h21) * dx;
    y[1] = (u21 * h12 + u22 * h22) * dy;
    x[2] = (u31 * h11 + u32 * h21) * dx;
    y[2] = (u31 * h12 + u32 * h22) * dy;
    branch = Branch::Generic;
    return true;
}

BsIntermediates bs_lsvd_intermediates(const VecPair& input) {
    if (input.dim() != 3) throw DimensionError("BS-LSVD requires dim == 3");
    const std::span<const double, 3> a(input.a().values().data(), 3);
    const std::span<const double, 3> b(input.b().values().data(), 3);
    LsvdTrace tr{};
    switch (lsvd_trace(a, b, tr)) {
        case LsvdStatus::Zero: throw DegenerateInputError("BS-LSVD: A == 0");
        case LsvdStatus::RankOne:
            throw NotApplicableError("BS-LSVD: rank-one input has no second singular vector");
        case LsvdStatus::Ok: break;
    }
    Matrix u(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        u(i, 0) = (a[i] * tr.v11 + b[i] * tr.v21) / tr.s1;
        u(i, 1) = (a[i] * tr.v12 + b[i] * tr.v22) / tr.s2;
    }
    return BsIntermediates{u,
                           Mat2{{{tr.s1, 0.0}, {0.0, tr.s2}}},
                           Mat2{{{tr.v11, tr.v12}, {tr.v21, tr.v22}}},
                           Mat2{{{tr.z11, tr.z12}, {tr.z21, tr.z22}}},
                           Mat2{{{tr.t11, tr.t12}, {tr.t21, tr.t22}}},
                           Mat2{{{tr.h11, tr.h12}, {tr.h21, tr.h22}}}};
}

CorrectionResult correct_bs(const VecPair& input) {
    const std::size_t n = input.dim();
    std::vector<double> x(n);
    std::vector<double> y(n);
    if (!bs_kernel(input.a().values(), input.b().values(), x, y)) {
        throw DegenerateInputError("BS: A == 0");
    }
    return finish(input, std::move(x), std::move(y), Method::BS);
}

CorrectionResult correct_bs_iter(const VecPair& input) {
    const std::size_t n = input.dim();
    std::vector<double> x(n);
    std::vector<double> y(n);
    if (!bs_iter_kernel(input.a().values(), input.b().values(), x, y)) {
        throw DegenerateInputError("BS-ITER: A == 0");
    }
    return finish(input, std::move(x), std::move(y), Method::BS_ITER);
}

CorrectionResult correct_bs_lsvd(const VecPair& input) {
    if (input.dim() != 3) throw DimensionError("BS-LSVD requires dim == 3");
    std::vector<double> x(3);
    std::vector<double> y(3);
    Branch branch = Branch::Generic;
    if (!bs_lsvd_kernel(std::span<const double, 3>(input.a().values().data(), 3),
                        std::span<const double, 3>(input.b().values().data(), 3),
                        std::span<double, 3>(x.data(), 3), std::span<double, 3>(y.data(), 3),
                        branch)) {
        throw DegenerateInputError("BS-LSVD: A == 0");
    }
    return finish(input, std::move(x), std::move(y), Method::BS_LSVD, branch);
}

}  // namespace plucker
