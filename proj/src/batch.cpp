#include "plucker/batch.hpp"

#include <algorithm>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plucker/bs.hpp"

namespace plucker {

namespace {

void check_shapes(Method method, std::size_t dim, std::span<const double> records,
                  std::span<double> out, std::span<RecordStatus> status) {
    if (dim < 2) throw DimensionError("batch: dim must be >= 2");
    if (method == Method::BS_LSVD && dim != 3) {
        throw DimensionError("BS-LSVD requires dim == 3, got " + std::to_string(dim));
    }
    const std::size_t stride = 2 * dim;
    if (records.size() % stride != 0 || out.size() != records.size() ||
        status.size() != records.size() / stride) {
        throw DimensionError("batch: buffer sizes do not match dim");
    }
}

RecordStatus run_one(Method method, std::size_t dim, const double* in, double* out,
                     double tol) {
    const std::span<const double> a(in, dim);
    const std::span<const double> b(in + dim, dim);
    const std::span<double> x(out, dim);
    const std::span<double> y(out + dim, dim);
    RecordStatus status;
    switch (method) {
        case Method::LMPC: {
            double lambda = 0.0;
            status.branch = lmpc_kernel(a, b, x, y, tol, lambda);
            break;
        }
        case Method::BS:
            status.ok = bs_kernel(a, b, x, y);
            break;
        case Method::BS_ITER:
            status.ok = bs_iter_kernel(a, b, x, y);
            break;
        case Method::BS_LSVD:
            status.ok = bs_lsvd_kernel(std::span<const double, 3>(in, 3),
                                       std::span<const double, 3>(in + 3, 3),
                                       std::span<double, 3>(out, 3),
                                       std::span<double, 3>(out + 3, 3), status.branch);
            break;
    }
    if (!status.ok) {
        status.branch = Branch::BothZero;
        std::fill(out, out + 2 * dim, 0.0);
    }
    return status;
}

}  // namespace

RecordStatus correct_record(Method method, std::span<const double> record, std::span<double> out,
                            double degeneracy_tol) {
    if (record.size() % 2 != 0 || out.size() != record.size()) {
        throw DimensionError("correct_record: record must hold 2n values");
    }
    const std::size_t dim = record.size() / 2;
    RecordStatus status;
    check_shapes(method, dim, record, out, std::span<RecordStatus>(&status, 1));
    return run_one(method, dim, record.data(), out.data(), degeneracy_tol);
}

void correct_batch_serial(Method method, std::size_t dim, std::span<const double> records,
                          std::span<double> out, std::span<RecordStatus> status,
                          double degeneracy_tol) {
    check_shapes(method, dim, records, out, status);
    const std::size_t stride = 2 * dim;
    for (std::size_t r = 0; r < status.size(); ++r) {
        status[r] = run_one(method, dim, records.data() + r * stride, out.data() + r * stride,
                            degeneracy_tol);
    }
}

void correct_batch_parallel(Method method, std::size_t dim, std::span<const double> records,
                            std::span<double> out, std::span<RecordStatus> status,
                            double degeneracy_tol, int threads) {
    check_shapes(method, dim, records, out, status);
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#endif
    const std::size_t stride = 2 * dim;
    const auto count = static_cast<std::ptrdiff_t>(status.size());
    const double* in = records.data();
    double* dst = out.data();
    RecordStatus* st = status.data();
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        const auto i = static_cast<std::size_t>(r);
        st[i] = run_one(method, dim, in + i * stride, dst + i * stride, degeneracy_tol);
    }
}

}  // namespace plucker
