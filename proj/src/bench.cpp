#include "plucker/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>

#ifdef __linux__
#include <sched.h>
#endif

#include <json.hpp>

#include "plucker/batch.hpp"
#include "plucker/bs.hpp"
#include "plucker/lmpc.hpp"
#include "plucker/oracle.hpp"
#include "plucker/record_io.hpp"

#ifndef PLUCKER_BUILD_PROFILE
#define PLUCKER_BUILD_PROFILE "unknown"
#endif

namespace plucker {

namespace {

constexpr std::size_t kDim = 3;
constexpr std::size_t kStride = 2 * kDim;

std::mutex& timed_section_mutex() {
    static std::mutex m;
    return m;
}

// Pins the calling thread to the CPU it is running on; restores the old mask on destruction.
class CpuPin {
public:
    explicit CpuPin(bool enable) {
#ifdef __linux__
        if (!enable) return;
        if (sched_getaffinity(0, sizeof(old_), &old_) != 0) return;
        const int cpu = sched_getcpu();
        if (cpu < 0) return;
        cpu_set_t one;
        CPU_ZERO(&one);
        CPU_SET(cpu, &one);
        active_ = sched_setaffinity(0, sizeof(one), &one) == 0;
#else
        (void)enable;
#endif
    }
    ~CpuPin() {
#ifdef __linux__
        if (active_) sched_setaffinity(0, sizeof(old_), &old_);
#endif
    }
    CpuPin(const CpuPin&) = delete;
    CpuPin& operator=(const CpuPin&) = delete;

private:
#ifdef __linux__
    cpu_set_t old_{};
#endif
    bool active_ = false;
};

inline void call_kernel(Method method, const double* in, double* out) {
    const std::span<const double> a(in, kDim);
    const std::span<const double> b(in + kDim, kDim);
    const std::span<double> x(out, kDim);
    const std::span<double> y(out + kDim, kDim);
    switch (method) {
        case Method::LMPC: {
            double lambda;
            lmpc_kernel(a, b, x, y, kDefaultDegeneracyTol, lambda);
            break;
        }
        case Method::BS:
            bs_kernel(a, b, x, y);
            break;
        case Method::BS_ITER:
            bs_iter_kernel(a, b, x, y);
            break;
        case Method::BS_LSVD: {
            Branch branch;
            bs_lsvd_kernel(std::span<const double, 3>(in, 3), std::span<const double, 3>(in + 3, 3),
                           std::span<double, 3>(out, 3), std::span<double, 3>(out + 3, 3), branch);
            break;
        }
    }
}

inline double output_sum(const double* out) {
    double s = 0.0;
    for (std::size_t i = 0; i < kStride; ++i) s += out[i];
    return s;
}

MethodTiming time_method(Method method, const std::vector<double>& inputs,
                         const BenchConfig& config) {
    using clock = std::chrono::steady_clock;
    const std::size_t trials = inputs.size() / kStride;
    double out[kStride] = {};

    volatile double sink = 0.0;
    for (std::size_t i = 0; i < config.warmup; ++i) {
        call_kernel(method, inputs.data() + (i % trials) * kStride, out);
        sink = sink + out[0];
    }

    std::vector<double> per_call;
    per_call.reserve(trials / config.batch_size + 1);
    double checksum = 0.0;
    double total = 0.0;
    for (std::size_t start = 0; start < trials; start += config.batch_size) {
        const std::size_t end = std::min(trials, start + config.batch_size);
        const auto t0 = clock::now();
        for (std::size_t i = start; i < end; ++i) {
            call_kernel(method, inputs.data() + i * kStride, out);
            checksum += output_sum(out);
        }
        const auto t1 = clock::now();
        const double seconds = std::chrono::duration<double>(t1 - t0).count();
        total += seconds;
        per_call.push_back(seconds / static_cast<double>(end - start));
    }

    const std::size_t mid = per_call.size() / 2;
    std::nth_element(per_call.begin(), per_call.begin() + static_cast<std::ptrdiff_t>(mid),
                     per_call.end());
    double median = per_call[mid];
    if (per_call.size() % 2 == 0) {
        const double lower =
            *std::max_element(per_call.begin(), per_call.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    return MethodTiming{method, total, median * 1e6, total / static_cast<double>(trials) * 1e6,
                        trials, checksum};
}

std::string read_cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                std::string v = line.substr(colon + 1);
                v.erase(0, v.find_first_not_of(' '));
                return v;
            }
        }
    }
    return "unknown";
}

std::string method_label(Method m) {
    switch (m) {
        case Method::LMPC: return "LMPC";
        case Method::BS: return "BS";
        case Method::BS_LSVD: return "BS-LSVD";
        case Method::BS_ITER: return "BS-ITER";
    }
    return "?";
}

Method require_method(std::string_view name) {
    if (auto m = parse_method(name)) return *m;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

double require_number(std::string_view field) {
    std::string s(field);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric field '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("bad numeric field '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_row(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                            : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// CSV cells may not contain commas or newlines; the environment strings are sanitized.
std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

std::string_view to_string(InputDistribution d) noexcept {
    return d == InputDistribution::UniformCube ? "uniform" : "normal";
}

std::optional<InputDistribution> parse_distribution(std::string_view name) {
    if (name == "uniform" || name == "uniform-cube") return InputDistribution::UniformCube;
    if (name == "normal" || name == "standard-normal") return InputDistribution::StandardNormal;
    return std::nullopt;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    return std::nullopt;
}

void validate(const BenchConfig& config) {
    if (config.trials < 1) throw ConfigError("trials must be >= 1");
    if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (config.methods.empty()) throw ConfigError("at least one method is required");
    std::set<Method> seen(config.methods.begin(), config.methods.end());
    if (seen.size() != config.methods.size()) throw ConfigError("duplicate method in list");
    if (config.trials > kMaxInputBytes / (kStride * sizeof(double))) {
        throw ConfigError("trials = " + std::to_string(config.trials) +
                          " needs more than the 4 GiB input limit; split the run into "
                          "several smaller runs with distinct seeds (streaming mode)");
    }
}

std::vector<double> generate_inputs(const BenchConfig& config) {
    validate(config);
    Rng rng(config.seed);
    std::vector<double> inputs(config.trials * kStride);
    for (double& v : inputs) {
        v = config.distribution == InputDistribution::UniformCube ? 2.0 * rng.uniform() - 1.0
                                                                  : rng.normal();
    }
    return inputs;
}

double checksum_pass(Method method, const std::vector<double>& inputs) {
    const std::size_t trials = inputs.size() / kStride;
    std::vector<double> out(inputs.size());
    std::vector<RecordStatus> status(trials);
    correct_batch_serial(method, kDim, inputs, out, status);
    double checksum = 0.0;
    for (std::size_t i = 0; i < trials; ++i) checksum += output_sum(out.data() + i * kStride);
    return checksum;
}

std::vector<SpeedupRatio> compute_ratios(const std::vector<MethodTiming>& methods) {
    std::vector<SpeedupRatio> out;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            out.push_back(SpeedupRatio{methods[i].method, methods[j].method,
                                       methods[j].median_call_us / methods[i].median_call_us});
        }
    }
    return out;
}

BenchEnvironment current_environment() {
    std::string compiler = "unknown";
#ifdef __VERSION__
    compiler = __VERSION__;
#endif
    return BenchEnvironment{read_cpu_model(), PLUCKER_BUILD_PROFILE, compiler};
}

BenchReport run_benchmark(const BenchConfig& config) {
    validate(config);
    std::unique_lock lock(timed_section_mutex(), std::try_to_lock);
    if (!lock.owns_lock()) {
        throw ConfigError("another benchmark is already running in this process");
    }
    const std::vector<double> inputs = generate_inputs(config);

    BenchReport report{config.trials, config.seed, config.warmup, config.distribution, {}, {},
                       current_environment()};
    {
        CpuPin pin(config.pin_cpu);
        for (Method m : config.methods) report.methods.push_back(time_method(m, inputs, config));
    }
    report.ratios = compute_ratios(report.methods);
    return report;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
    std::ostringstream os;
    switch (format) {
        case ReportFormat::Markdown: {
            os << "| Algorithm | For all trials (s) | For each trial, median (us) | "
                  "Mean per trial (us) |\n";
            os << "|---|---|---|---|\n";
            for (const auto& m : report.methods) {
                os << "| " << method_label(m.method) << " | " << format_number(m.total_seconds, 6)
                   << " | " << format_number(m.median_call_us, 6) << " | "
                   << format_number(m.mean_call_us, 6) << " |\n";
            }
            if (!report.ratios.empty()) {
                os << "\n| Median ratio | Value |\n|---|---|\n";
                for (const auto& r : report.ratios) {
                    os << "| " << method_label(r.other) << " / " << method_label(r.baseline)
                       << " | " << format_number(r.ratio, 4) << " |\n";
                }
            }
            os << "\ntrials: " << report.trials << ", seed: " << report.seed
               << ", warmup: " << report.warmup << ", inputs: " << to_string(report.distribution)
               << "\ncpu: " << report.environment.cpu
               << "\nbuild: " << report.environment.build_profile << " ("
               << report.environment.compiler << ")\n";
            break;
        }
        case ReportFormat::Csv: {
            os << "# plucker-bench 1\n";
            os << "# cpu=" << sanitize(report.environment.cpu) << "\n";
            os << "# build_profile=" << sanitize(report.environment.build_profile) << "\n";
            os << "# compiler=" << sanitize(report.environment.compiler) << "\n";
            os << "# trials=" << report.trials << "\n";
            os << "# seed=" << report.seed << "\n";
            os << "# warmup=" << report.warmup << "\n";
            os << "# distribution=" << to_string(report.distribution) << "\n";
            os << "record,method,baseline,total_seconds,median_call_us,mean_call_us,calls,"
                  "checksum,ratio\n";
            for (const auto& m : report.methods) {
                os << "timing," << to_string(m.method) << ",," << format_number(m.total_seconds)
                   << ',' << format_number(m.median_call_us) << ','
                   << format_number(m.mean_call_us) << ',' << m.calls << ','
                   << format_number(m.checksum) << ",\n";
            }
            for (const auto& r : report.ratios) {
                os << "ratio," << to_string(r.other) << ',' << to_string(r.baseline) << ",,,,,,"
                   << format_number(r.ratio) << "\n";
            }
            break;
        }
        case ReportFormat::Json: {
            nlohmann::ordered_json j;
            j["format"] = "plucker-bench";
            j["version"] = 1;
            j["config"] = {{"trials", report.trials},
                           {"seed", report.seed},
                           {"warmup", report.warmup},
                           {"distribution", to_string(report.distribution)}};
            j["environment"] = {{"cpu", report.environment.cpu},
                                {"build_profile", report.environment.build_profile},
                                {"compiler", report.environment.compiler}};
            j["methods"] = nlohmann::ordered_json::array();
            for (const auto& m : report.methods) {
                j["methods"].push_back({{"method", to_string(m.method)},
                                        {"total_seconds", m.total_seconds},
                                        {"median_call_us", m.median_call_us},
                                        {"mean_call_us", m.mean_call_us},
                                        {"calls", m.calls},
                                        {"checksum", m.checksum}});
            }
            j["ratios"] = nlohmann::ordered_json::array();
            for (const auto& r : report.ratios) {
                j["ratios"].push_back({{"method", to_string(r.other)},
                                       {"baseline", to_string(r.baseline)},
                                       {"ratio", r.ratio}});
            }
            os << j.dump(2) << "\n";
            break;
        }
    }
    return os.str();
}

BenchReport parse_report_csv(std::string_view text) {
    BenchReport report{0, 0, 0, InputDistribution::UniformCube, {}, {}, {}};
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) continue;
            const std::string_view key = line.substr(2, eq - 2);
            const std::string value(line.substr(eq + 1));
            if (key == "cpu") report.environment.cpu = value;
            else if (key == "build_profile") report.environment.build_profile = value;
            else if (key == "compiler") report.environment.compiler = value;
            else if (key == "trials") report.trials = std::stoull(value);
            else if (key == "seed") report.seed = std::stoull(value);
            else if (key == "warmup") report.warmup = std::stoull(value);
            else if (key == "distribution") {
                const auto d = parse_distribution(value);
                if (!d) throw ConfigError("unknown distribution '" + value + "'");
                report.distribution = *d;
            }
            continue;
        }
        const auto cells = split_csv_row(line);
        if (!header_seen) {
            if (cells.size() != 9 || cells[0] != "record") {
                throw ConfigError("bench CSV: missing header row");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != 9) throw ConfigError("bench CSV: row with wrong field count");
        if (cells[0] == "timing") {
            report.methods.push_back(MethodTiming{require_method(cells[1]),
                                                  require_number(cells[3]),
                                                  require_number(cells[4]),
                                                  require_number(cells[5]),
                                                  static_cast<std::size_t>(std::stoull(cells[6])),
                                                  require_number(cells[7])});
        } else if (cells[0] == "ratio") {
            report.ratios.push_back(SpeedupRatio{require_method(cells[2]), require_method(cells[1]),
                                                 require_number(cells[8])});
        } else {
            throw ConfigError("bench CSV: unknown record kind '" + cells[0] + "'");
        }
    }
    if (!header_seen) throw ConfigError("bench CSV: missing header row");
    return report;
}

}  // namespace plucker
