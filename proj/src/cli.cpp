#include "plucker/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>
#include <sstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "plucker/batch.hpp"
#include "plucker/bs.hpp"
#include "plucker/oracle.hpp"
#include "plucker/record_io.hpp"

namespace plucker::cli {

namespace {

constexpr std::size_t kChunkLines = 1 << 16;

struct PendingLine {
    std::size_t line_number;
    std::size_t record_index;  // into the chunk buffers
};

void emit_csv(const CorrectOptions& o, std::span<const double> in, std::span<const double> res,
              const RecordStatus& status, std::ostream& out) {
    const std::size_t n = o.dim;
    std::string line;
    for (std::size_t i = 0; i < 2 * n; ++i) {
        if (i) line.push_back(',');
        line += format_number(res[i], o.precision);
    }
    const std::span<const double> a = in.first(n), b = in.subspan(n, n);
    const std::span<const double> x = res.first(n), y = res.subspan(n, n);
    if (o.with_objective) {
        line.push_back(',');
        line += format_number(squared_distance(a, x) + squared_distance(b, y), o.precision);
    }
    if (o.with_branch) {
        line.push_back(',');
        line += to_string(status.branch);
    }
    if (o.with_residual) {
        line.push_back(',');
        line += format_number(dot(x, y), o.precision);
    }
    line.push_back('\n');
    out << line;
}

void emit_json(const CorrectOptions& o, std::size_t line_number, std::span<const double> in,
               std::span<const double> res, const RecordStatus& status, std::ostream& out) {
    const std::size_t n = o.dim;
    const std::span<const double> a = in.first(n), b = in.subspan(n, n);
    const std::span<const double> x = res.first(n), y = res.subspan(n, n);
    nlohmann::ordered_json j;
    j["line"] = line_number;
    j["method"] = to_string(o.method);
    j["x"] = std::vector<double>(x.begin(), x.end());
    j["y"] = std::vector<double>(y.begin(), y.end());
    j["objective"] = squared_distance(a, x) + squared_distance(b, y);
    j["branch"] = to_string(status.branch);
    j["klein_residual"] = dot(x, y);
    out << j.dump() << '\n';
}

// Returns the number of failed records in this chunk.
std::size_t flush_chunk(const CorrectOptions& o, std::vector<double>& records,
                        std::vector<PendingLine>& lines, std::ostream& out, std::ostream& err) {
    const std::size_t stride = 2 * o.dim;
    const std::size_t count = lines.size();
    std::vector<double> results(records.size());
    std::vector<RecordStatus> status(count);
    correct_batch_parallel(o.method, o.dim, records, results, status, o.tolerance, o.threads);

    std::size_t failed = 0;
    for (const PendingLine& pl : lines) {
        const std::size_t off = pl.record_index * stride;
        const std::span<const double> in(records.data() + off, stride);
        const std::span<const double> res(results.data() + off, stride);
        const RecordStatus& st = status[pl.record_index];
        if (!st.ok) {
            err << "line " << pl.line_number << ": method " << to_string(o.method)
                << " is undefined for a = b = 0\n";
            ++failed;
            continue;
        }
        if (o.format == OutputFormat::Csv) {
            emit_csv(o, in, res, st, out);
        } else {
            emit_json(o, pl.line_number, in, res, st, out);
        }
    }
    records.clear();
    lines.clear();
    return failed;
}

std::vector<Method> parse_method_list(const std::string& text) {
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto m = parse_method(item);
        if (!m) throw ConfigError("unknown method '" + item + "'");
        out.push_back(*m);
    }
    return out;
}

struct TrialOutcome {
    double margin;         // oracle best - lmpc objective
    double kkt_scaled;     // max residual / (1 + |a| + |b|), NaN when not applicable
    bool ordering_checked;
    bool ordering_ok;
    double cross_scaled;   // max |f_lmpc - f_other| / (1 + q)
};

TrialOutcome run_trial(const VerifyOptions& o, std::size_t index) {
    Rng rng = Rng::for_stream(o.seed, index);
    std::vector<double> a(o.dim);
    std::vector<double> b(o.dim);
    for (double& v : a) v = 2.0 * rng.uniform() - 1.0;
    for (double& v : b) v = 2.0 * rng.uniform() - 1.0;
    const VecPair input{RealVec(a), RealVec(b)};
    const double norms = 1.0 + input.a().norm() + input.b().norm();
    const double q = input.a().squared_norm() + input.b().squared_norm();

    TrialOutcome t{};
    const CorrectionResult lmpc = correct_lmpc(input);
    const OracleReport oracle = global_min_search(input, o.samples, rng, o.refine, lmpc.objective);
    t.margin = oracle.best_objective - lmpc.objective;

    t.kkt_scaled = std::numeric_limits<double>::quiet_NaN();
    if (lmpc.branch == Branch::Generic) {
        const KktResiduals r = kkt_residuals(input, lmpc);
        t.kkt_scaled = std::max({r.r1, r.r2, r.r3}) / norms;
    }
    t.ordering_checked = dot(input.a().values(), input.b().values()) != 0.0 &&
                         lmpc.branch == Branch::Generic;
    t.ordering_ok = !t.ordering_checked || check_candidate_ordering(input).ok;

    double cross = std::abs(lmpc.objective - correct_bs(input).objective);
    if (o.dim == 3) cross = std::max(cross, std::abs(lmpc.objective - correct_bs_lsvd(input).objective));
    t.cross_scaled = cross / (1.0 + q);
    return t;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

}  // namespace

double default_tolerance(std::ostream& err) {
    const char* env = std::getenv(kToleranceEnv);
    if (env == nullptr || *env == '\0') return kDefaultDegeneracyTol;
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !std::isfinite(v) || v < 0.0) {
        err << "warning: ignoring invalid " << kToleranceEnv << "='" << env << "'\n";
        return kDefaultDegeneracyTol;
    }
    return v;
}

int cmd_correct(const CorrectOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
    if (o.dim < 2) {
        err << "error: --dim must be >= 2\n";
        return kExitUsage;
    }
    if (o.method == Method::BS_LSVD && o.dim != 3) {
        err << "error: method bs-lsvd requires --dim 3\n";
        return kExitUsage;
    }
    if (!(o.tolerance >= 0.0) || !std::isfinite(o.tolerance)) {
        err << "error: tolerance must be finite and >= 0\n";
        return kExitUsage;
    }
    if (o.precision < 1 || o.precision > 17) {
        err << "error: --precision must be in [1, 17]\n";
        return kExitUsage;
    }

    std::vector<double> records;
    std::vector<PendingLine> lines;
    std::size_t failed = 0;
    std::size_t line_number = 0;
    std::string text;
    while (std::getline(in, text)) {
        ++line_number;
        const ParsedLine parsed = parse_record_line(text, line_number, o.dim);
        if (parsed.kind == LineKind::Skip) continue;
        if (parsed.kind == LineKind::Malformed) {
            err << parsed.error << '\n';
            ++failed;
            continue;
        }
        lines.push_back(PendingLine{line_number, lines.size()});
        records.insert(records.end(), parsed.record.values.begin(), parsed.record.values.end());
        if (lines.size() == kChunkLines) failed += flush_chunk(o, records, lines, out, err);
    }
    if (in.bad()) {
        err << "error: read failure on input\n";
        return kExitUsage;
    }
    if (!lines.empty()) failed += flush_chunk(o, records, lines, out, err);
    out.flush();
    if (failed > 0) {
        err << failed << " record(s) failed\n";
        return kExitRecordErrors;
    }
    return kExitOk;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    if (o.trials < 1 || o.samples < 1) {
        err << "error: --trials and --samples must be >= 1\n";
        return kExitUsage;
    }
    if (o.dim < 2) {
        err << "error: --dim must be >= 2\n";
        return kExitUsage;
    }
    std::vector<TrialOutcome> outcomes(o.trials);
    const auto count = static_cast<std::ptrdiff_t>(o.trials);
    int threads = o.threads;
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#endif
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        outcomes[static_cast<std::size_t>(i)] = run_trial(o, static_cast<std::size_t>(i));
    }

    std::size_t oracle_pass = 0, kkt_pass = 0, kkt_total = 0, order_pass = 0, order_total = 0,
                cross_pass = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_kkt = 0.0;
    double worst_cross = 0.0;
    for (const TrialOutcome& t : outcomes) {
        worst_margin = std::min(worst_margin, t.margin);
        if (t.margin >= -o.oracle_tol) ++oracle_pass;
        if (!std::isnan(t.kkt_scaled)) {
            ++kkt_total;
            worst_kkt = std::max(worst_kkt, t.kkt_scaled);
            if (t.kkt_scaled <= o.kkt_tol) ++kkt_pass;
        }
        if (t.ordering_checked) {
            ++order_total;
            if (t.ordering_ok) ++order_pass;
        }
        worst_cross = std::max(worst_cross, t.cross_scaled);
        if (t.cross_scaled <= o.agree_tol) ++cross_pass;
    }
    const bool pass = oracle_pass == o.trials && kkt_pass == kkt_total &&
                      order_pass == order_total && cross_pass == o.trials;

    out << "verify: trials=" << o.trials << " samples=" << o.samples << " seed=" << o.seed
        << " dim=" << o.dim << " refine=" << (o.refine ? "on" : "off") << '\n';
    out << "oracle    " << oracle_pass << '/' << o.trials
        << "  worst gap (oracle best - lmpc) = " << sci(worst_margin) << '\n';
    out << "kkt       " << kkt_pass << '/' << kkt_total
        << "  worst scaled residual = " << sci(worst_kkt) << '\n';
    out << "ordering  " << order_pass << '/' << order_total << '\n';
    out << "cross     " << cross_pass << '/' << o.trials
        << "  worst scaled objective difference = " << sci(worst_cross) << '\n';
    out << "result: " << (pass ? "PASS" : "FAIL") << '\n';
    if (!pass) err << "verification failed\n";
    return pass ? kExitOk : kExitRecordErrors;
}

int cmd_bench(const BenchConfig& config, ReportFormat format,
              const std::optional<std::string>& output_path, std::ostream& out,
              std::ostream& err) {
    std::string text;
    try {
        text = emit_report(run_benchmark(config), format);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (output_path) {
        std::ofstream file(*output_path, std::ios::binary);
        if (!file || !(file << text)) {
            err << "error: cannot write " << *output_path << '\n';
            return kExitUsage;
        }
    } else {
        out << text;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"Plucker correction: project 2n-vectors onto the Klein quadric x.y = 0"};
    app.require_subcommand(1);

    CorrectOptions correct;
    std::string input_path = "-";
    std::string output_path;
    std::string method_name = "lmpc";
    std::string format_name = "csv";
    std::optional<double> tol_flag;
    std::string columns;
    auto* c = app.add_subcommand("correct", "correct records read from a file or stdin");
    c->add_option("input", input_path, "input file, '-' for stdin")->capture_default_str();
    c->add_option("-o,--output", output_path, "output file (default stdout)");
    c->add_option("-m,--method", method_name, "lmpc | bs | bs-lsvd | bs-iter")
        ->capture_default_str();
    c->add_option("--tol", tol_flag, "degeneracy tolerance (overrides PLUCKER_TOL)");
    c->add_option("--format", format_name, "csv | json")->capture_default_str();
    c->add_option("--dim", correct.dim, "vector dimension n; records carry 2n values")
        ->capture_default_str();
    c->add_option("--precision", correct.precision, "significant digits in CSV output")
        ->capture_default_str();
    c->add_option("--columns", columns, "extra CSV columns: objective,branch,residual");
    c->add_option("--threads", correct.threads, "worker threads (0 = OpenMP default)");

    BenchConfig bench;
    std::string methods_list = "lmpc,bs,bs-lsvd,bs-iter";
    std::string dist_name = "uniform";
    std::string bench_format = "markdown";
    std::string bench_output;
    bool no_pin = false;
    auto* b = app.add_subcommand("bench", "time the correction methods on random inputs");
    b->add_option("--trials", bench.trials, "number of random inputs")->capture_default_str();
    b->add_option("--seed", bench.seed, "input generator seed")->capture_default_str();
    b->add_option("--methods", methods_list, "comma-separated methods")->capture_default_str();
    b->add_option("--warmup", bench.warmup, "untimed calls per method")->capture_default_str();
    b->add_option("--distribution", dist_name, "uniform | normal")->capture_default_str();
    b->add_option("--batch", bench.batch_size, "calls per clock reading")->capture_default_str();
    b->add_option("--format", bench_format, "markdown | csv | json")->capture_default_str();
    b->add_option("-o,--output", bench_output, "report file (default stdout)");
    b->add_flag("--no-pin", no_pin, "do not pin the timing thread to a CPU");

    VerifyOptions verify;
    bool no_refine = false;
    auto* v = app.add_subcommand("verify", "check LMPC against the sampling oracle and BS");
    v->add_option("--trials", verify.trials, "random inputs")->capture_default_str();
    v->add_option("--samples", verify.samples, "oracle samples per input")->capture_default_str();
    v->add_option("--seed", verify.seed, "seed")->capture_default_str();
    v->add_option("--dim", verify.dim, "vector dimension")->capture_default_str();
    v->add_flag("--no-refine", no_refine, "skip local refinement of the best sample");
    v->add_option("--oracle-tol", verify.oracle_tol, "allowed LMPC excess over the oracle")
        ->capture_default_str();
    v->add_option("--kkt-tol", verify.kkt_tol, "relative KKT residual bound")
        ->capture_default_str();
    v->add_option("--agree-tol", verify.agree_tol, "cross-method objective bound")
        ->capture_default_str();
    v->add_option("--threads", verify.threads, "worker threads (0 = OpenMP default)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (c->parsed()) {
            const auto m = parse_method(method_name);
            if (!m) throw ConfigError("unknown method '" + method_name + "'");
            correct.method = *m;
            if (format_name == "csv") correct.format = OutputFormat::Csv;
            else if (format_name == "json") correct.format = OutputFormat::Json;
            else throw ConfigError("unknown format '" + format_name + "'");
            correct.tolerance = tol_flag ? *tol_flag : default_tolerance(err);
            std::stringstream cs(columns);
            std::string col;
            while (std::getline(cs, col, ',')) {
                if (col == "objective") correct.with_objective = true;
                else if (col == "branch") correct.with_branch = true;
                else if (col == "residual" || col == "klein_residual") correct.with_residual = true;
                else if (!col.empty()) throw ConfigError("unknown column '" + col + "'");
            }

            std::ifstream file;
            std::istream* src = &in;
            if (input_path != "-") {
                file.open(input_path);
                if (!file) {
                    err << "error: cannot open " << input_path << '\n';
                    return kExitUsage;
                }
                src = &file;
            }
            std::ofstream dst_file;
            std::ostream* dst = &out;
            if (!output_path.empty()) {
                dst_file.open(output_path, std::ios::binary);
                if (!dst_file) {
                    err << "error: cannot write " << output_path << '\n';
                    return kExitUsage;
                }
                dst = &dst_file;
            }
            return cmd_correct(correct, *src, *dst, err);
        }
        if (b->parsed()) {
            bench.methods = parse_method_list(methods_list);
            const auto d = parse_distribution(dist_name);
            if (!d) throw ConfigError("unknown distribution '" + dist_name + "'");
            bench.distribution = *d;
            const auto f = parse_report_format(bench_format);
            if (!f) throw ConfigError("unknown format '" + bench_format + "'");
            bench.pin_cpu = !no_pin;
            validate(bench);
            return cmd_bench(bench, *f,
                             bench_output.empty() ? std::nullopt
                                                  : std::optional<std::string>(bench_output),
                             out, err);
        }
        verify.refine = !no_refine;
        return cmd_verify(verify, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace plucker::cli
