#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plucker/bench.hpp"
#include "plucker/core.hpp"
#include "plucker/lmpc.hpp"

namespace plucker::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRecordErrors = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that overrides the default degeneracy tolerance.
inline constexpr const char* kToleranceEnv = "PLUCKER_TOL";

enum class OutputFormat { Csv, Json };

struct CorrectOptions {
    Method method = Method::LMPC;
    double tolerance = kDefaultDegeneracyTol;
    OutputFormat format = OutputFormat::Csv;
    std::size_t dim = 3;
    int precision = 17;
    bool with_objective = false;
    bool with_branch = false;
    bool with_residual = false;
    int threads = 0;
};

/// Reads records from `in`, writes one corrected record per valid line to `out`, diagnostics to
/// `err`. Returns 0 when every line parsed, 1 when any record failed.
int cmd_correct(const CorrectOptions& options, std::istream& in, std::ostream& out,
                std::ostream& err);

struct VerifyOptions {
    std::size_t trials = 100;
    std::size_t samples = 100'000;
    std::uint64_t seed = 1;
    std::size_t dim = 3;
    bool refine = true;
    double oracle_tol = 1e-9;  // lmpc <= oracle best + oracle_tol
    double kkt_tol = 1e-9;     // each residual <= kkt_tol (1 + |a| + |b|)
    double agree_tol = 1e-8;   // |f_lmpc - f_other| <= agree_tol (1 + q)
    int threads = 0;
};

/// Seeded oracle run; prints a summary and returns 0 iff every check passed.
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

int cmd_bench(const BenchConfig& config, ReportFormat format,
              const std::optional<std::string>& output_path, std::ostream& out, std::ostream& err);

/// Default tolerance, honoring PLUCKER_TOL when it holds a finite nonnegative number.
double default_tolerance(std::ostream& err);

/// Full command-line entry point (argv[0] is the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace plucker::cli
