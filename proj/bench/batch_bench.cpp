// Serial vs OpenMP batch correction over the same random records.
//
//   batch_bench [records=1000000] [threads=0]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include <omp.h>

#include "plucker/batch.hpp"
#include "plucker/bench.hpp"

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace plucker;
    BenchConfig config;
    config.trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
    const int threads = argc > 2 ? std::atoi(argv[2]) : 0;
    const int used = threads > 0 ? threads : omp_get_max_threads();

    const std::vector<double> records = generate_inputs(config);
    std::vector<double> serial_out(records.size());
    std::vector<double> parallel_out(records.size());
    std::vector<RecordStatus> status(config.trials);

    std::printf("records: %zu, threads: %d\n", config.trials, used);
    std::printf("%-8s %12s %12s %9s %s\n", "method", "serial (s)", "omp (s)", "speedup", "match");
    for (Method m : {Method::LMPC, Method::BS, Method::BS_LSVD, Method::BS_ITER}) {
        const double ts = seconds([&] { correct_batch_serial(m, 3, records, serial_out, status); });
        const double tp = seconds(
            [&] { correct_batch_parallel(m, 3, records, parallel_out, status, kDefaultDegeneracyTol, threads); });
        const bool match = std::memcmp(serial_out.data(), parallel_out.data(),
                                       serial_out.size() * sizeof(double)) == 0;
        std::printf("%-8s %12.4f %12.4f %8.2fx %s\n", std::string(to_string(m)).c_str(), ts, tp,
                    ts / tp, match ? "yes" : "NO");
    }
    return 0;
}
