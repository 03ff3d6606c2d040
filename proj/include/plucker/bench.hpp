#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plucker/core.hpp"

namespace plucker {

enum class InputDistribution { UniformCube, StandardNormal };
enum class ReportFormat { Markdown, Csv, Json };

std::string_view to_string(InputDistribution d) noexcept;
std::optional<InputDistribution> parse_distribution(std::string_view name);
std::optional<ReportFormat> parse_report_format(std::string_view name);

struct BenchConfig {
    std::size_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::LMPC, Method::BS, Method::BS_LSVD, Method::BS_ITER};
    std::size_t warmup = 10'000;
    InputDistribution distribution = InputDistribution::UniformCube;
    std::size_t batch_size = 1000;  // calls per clock reading
    bool pin_cpu = true;
};

/// Largest input buffer run_benchmark will allocate.
inline constexpr std::size_t kMaxInputBytes = std::size_t{4} << 30;

struct MethodTiming {
    Method method;
    double total_seconds;
    double median_call_us;
    double mean_call_us;
    std::size_t calls;
    double checksum;  // sum of every output component, in input order
};

/// median(other) / median(baseline): how many times slower `other` is.
struct SpeedupRatio {
    Method baseline;
    Method other;
    double ratio;
};

struct BenchEnvironment {
    std::string cpu;
    std::string build_profile;
    std::string compiler;
};

struct BenchReport {
    std::size_t trials;
    std::uint64_t seed;
    std::size_t warmup;
    InputDistribution distribution;
    std::vector<MethodTiming> methods;
    std::vector<SpeedupRatio> ratios;
    BenchEnvironment environment;
};

/// Throws ConfigError on trials == 0, batch_size == 0, empty or duplicated method lists, or an
/// input buffer larger than kMaxInputBytes.
void validate(const BenchConfig& config);

/// The 3D input pairs, packed [a, b] per trial. Same seed, same stream.
std::vector<double> generate_inputs(const BenchConfig& config);

/// Untimed run over the inputs producing the same checksum the timed loop accumulates.
double checksum_pass(Method method, const std::vector<double>& inputs);

/// All ordered pairs (i < j) of the report's methods, in report order.
std::vector<SpeedupRatio> compute_ratios(const std::vector<MethodTiming>& methods);

BenchEnvironment current_environment();

/// Single-threaded timed loops; only one may run at a time in the process.
BenchReport run_benchmark(const BenchConfig& config);

std::string emit_report(const BenchReport& report, ReportFormat format);

/// Inverse of emit_report(report, ReportFormat::Csv).
BenchReport parse_report_csv(std::string_view text);

}  // namespace plucker
