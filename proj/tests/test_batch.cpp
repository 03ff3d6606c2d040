#include <doctest.h>

#include <cstring>
#include <vector>

#include "plucker/batch.hpp"
#include "plucker/bs.hpp"
#include "plucker/record_io.hpp"
#include "test_support.hpp"

using namespace plucker;

namespace {

std::vector<double> random_records(std::size_t count, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> r(count * 2 * dim);
    for (double& v : r) v = 2.0 * rng.uniform() - 1.0;
    // A few degenerate records in the mix.
    if (count > 10) {
        for (std::size_t k = 0; k < dim; ++k) {
            r[2 * dim * 3 + dim + k] = r[2 * dim * 3 + k];           // a == b
            r[2 * dim * 5 + dim + k] = -r[2 * dim * 5 + k];          // a == -b
            r[2 * dim * 7 + k] = r[2 * dim * 7 + dim + k] = 0.0;     // both zero
        }
    }
    return r;
}

}  // namespace

TEST_CASE("serial and parallel batches are bit-identical") {
    for (Method m : {Method::LMPC, Method::BS, Method::BS_LSVD, Method::BS_ITER}) {
        for (std::size_t dim : {2u, 3u, 6u}) {
            if (m == Method::BS_LSVD && dim != 3) continue;
            const std::vector<double> rec = random_records(5000, dim, 100 + dim);
            std::vector<double> s(rec.size());
            std::vector<double> p(rec.size());
            std::vector<RecordStatus> ss(5000);
            std::vector<RecordStatus> ps(5000);
            correct_batch_serial(m, dim, rec, s, ss);
            for (int threads : {1, 2, 3, 8}) {
                correct_batch_parallel(m, dim, rec, p, ps, kDefaultDegeneracyTol, threads);
                CHECK(std::memcmp(s.data(), p.data(), s.size() * sizeof(double)) == 0);
                for (std::size_t i = 0; i < ss.size(); ++i) {
                    CHECK(ss[i].ok == ps[i].ok);
                    CHECK(ss[i].branch == ps[i].branch);
                }
            }
            CHECK(ss[7].branch == Branch::BothZero);
            CHECK(ss[7].ok == (m == Method::LMPC));
        }
    }
}

TEST_CASE("batch output matches the single-record entry points") {
    const std::size_t dim = 3;
    const std::vector<double> rec = random_records(200, dim, 9);
    std::vector<double> out(rec.size());
    std::vector<RecordStatus> st(200);
    correct_batch_serial(Method::LMPC, dim, rec, out, st);
    for (std::size_t i = 0; i < 200; ++i) {
        const auto* r = rec.data() + i * 6;
        const CorrectionResult c =
            correct_lmpc(VecPair{RealVec{r[0], r[1], r[2]}, RealVec{r[3], r[4], r[5]}});
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(out[i * 6 + k] == c.x[k]);
            CHECK(out[i * 6 + 3 + k] == c.y[k]);
        }
        CHECK(st[i].branch == c.branch);
    }
    correct_batch_serial(Method::BS, dim, rec, out, st);
    for (std::size_t i = 20; i < 40; ++i) {
        const auto* r = rec.data() + i * 6;
        const CorrectionResult c =
            correct_bs(VecPair{RealVec{r[0], r[1], r[2]}, RealVec{r[3], r[4], r[5]}});
        for (std::size_t k = 0; k < 3; ++k) CHECK(out[i * 6 + k] == c.x[k]);
    }
}

TEST_CASE("batch errors") {
    std::vector<double> rec(8, 1.0);
    std::vector<double> out(8);
    std::vector<RecordStatus> st(2);
    CHECK_THROWS_AS(correct_batch_serial(Method::BS_LSVD, 2, rec, out, st), DimensionError);
    CHECK_THROWS_AS(correct_batch_parallel(Method::BS_LSVD, 2, rec, out, st), DimensionError);
    std::vector<double> odd(7, 1.0);
    CHECK_THROWS_AS(correct_batch_serial(Method::LMPC, 2, odd, out, st), DimensionError);
}

TEST_CASE("record parsing") {
    const ParsedLine ok = parse_record_line("1 0 0, 1 1 0", 4, 3);
    REQUIRE(ok.kind == LineKind::Record);
    CHECK(ok.record.values == std::vector<double>{1, 0, 0, 1, 1, 0});
    CHECK(ok.record.line_number == 4);

    CHECK(parse_record_line("   ", 1, 3).kind == LineKind::Skip);
    CHECK(parse_record_line("  # comment", 1, 3).kind == LineKind::Skip);

    const ParsedLine five = parse_record_line("1 2 3 4 5", 7, 3);
    CHECK(five.kind == LineKind::Malformed);
    CHECK(five.error.find("line 7") != std::string::npos);

    CHECK(parse_record_line("1 2 3 4 5 x", 2, 3).kind == LineKind::Malformed);
    CHECK(parse_record_line("1 2 3 4 5 nan", 2, 3).kind == LineKind::Malformed);
    CHECK(parse_record_line("1 2 3 4 5 inf", 2, 3).kind == LineKind::Malformed);
    CHECK(parse_record_line("1e-3 -2.5E2 +3 4 5 6", 2, 3).kind == LineKind::Record);

    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(0.1, 6) == "0.1");
    CHECK(format_number(0.0) == "0");
    CHECK(split_fields(" a,,b  c ").size() == 3);
}
