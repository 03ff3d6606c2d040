#pragma once

#include <cstddef>
#include <span>

#include "plucker/core.hpp"
#include "plucker/lmpc.hpp"

namespace plucker {

// Records are packed as [a_0..a_{n-1}, b_0..b_{n-1}] and outputs as [x..., y...], stride 2n.

struct RecordStatus {
    Branch branch = Branch::Generic;
    bool ok = true;  // false: the method has no answer for this record (BS family on a == b == 0)
};

/// Runs one method on one packed record. Throws DimensionError for BS-LSVD with dim != 3.
RecordStatus correct_record(Method method, std::span<const double> record, std::span<double> out,
                            double degeneracy_tol = kDefaultDegeneracyTol);

/// Serial reference loop.
void correct_batch_serial(Method method, std::size_t dim, std::span<const double> records,
                          std::span<double> out, std::span<RecordStatus> status,
                          double degeneracy_tol = kDefaultDegeneracyTol);

/// OpenMP loop over records; output is bit-identical to correct_batch_serial.
/// threads <= 0 uses the OpenMP default.
void correct_batch_parallel(Method method, std::size_t dim, std::span<const double> records,
                            std::span<double> out, std::span<RecordStatus> status,
                            double degeneracy_tol = kDefaultDegeneracyTol, int threads = 0);

}  // namespace plucker
