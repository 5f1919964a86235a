#include <filesystem>
#include <random>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "stobb/diagnostics.hpp"

using namespace stobb;
using stobb::testing::FunctionAttributor;
using stobb::testing::FunctionOracle;

namespace {

Stobb random_run(std::uint64_t seed, int n) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coord(0, 6);
    auto oracle = FunctionOracle(2, 2, [](const Vector& x) { return x[0] > 3 ? 1 : 0; });
    auto phi = FunctionAttributor([](const Vector& x) { return Vector{1.0, x[1] - 3.0}; });
    Stobb s;
    for (int i = 0; i < n; ++i)
        s.process(oracle, phi, {double(coord(rng)), double(coord(rng))});
    return s;
}

// independent recount straight from the structures
DiagnosticsPoint recount(const Stobb& s) {
    DiagnosticsPoint p;
    p.samples = s.base().size();
    p.feature_sets = s.boxsystems().size();
    for (const auto& [I, sys] : s.boxsystems()) {
        p.boxes += sys.boxes.size();
        for (const Box& b : sys.boxes)
            if (b.support.size() == 1) ++p.singletons;
    }
    for (const UpdateEvent& e : s.update_log())
        if (!e.rejected && e.kase != UpdateCase::no_op) ++p.updates;
    p.k = s.k();
    if (p.samples) {
        p.compression = 1.0 - double(p.boxes) / double(p.samples);
        p.success_rate = double(p.samples - p.updates) / double(p.samples);
    }
    return p;
}

bool equal(const DiagnosticsPoint& a, const DiagnosticsPoint& b) {
    return a.samples == b.samples && a.feature_sets == b.feature_sets && a.boxes == b.boxes &&
           a.singletons == b.singletons && a.updates == b.updates && a.k == b.k &&
           a.compression == b.compression && a.success_rate == b.success_rate;
}

}  // namespace

TEST_CASE("first observation: known diagnostics point") {
    auto oracle = FunctionOracle(1, 2, [](const Vector&) { return ClassId(0); });
    auto phi = FunctionAttributor([](const Vector&) { return Vector{1.0}; });
    Stobb s;
    s.process(oracle, phi, {1.0});
    DiagnosticsPoint p = s.sample_diagnostics();
    CHECK(p.samples == 1);
    CHECK(p.feature_sets == 1);
    CHECK(p.boxes == 1);
    CHECK(p.singletons == 1);
    CHECK(p.updates == 1);
    CHECK(p.compression == 0.0);
    CHECK(p.success_rate == 0.0);  // the first sample necessarily triggered an update
}

TEST_CASE("series identities and recount oracle") {
    Stobb s = random_run(11, 400);
    const auto& series = s.diagnostics_series();
    REQUIRE(series.size() == s.base().size());  // one point per processed sample
    std::uint64_t prev_samples = 0;
    for (const DiagnosticsPoint& p : series) {
        CHECK(p.samples == prev_samples + 1);
        prev_samples = p.samples;
        CHECK(p.success_rate == double(p.samples - p.updates) / double(p.samples));
        CHECK(p.compression == 1.0 - double(p.boxes) / double(p.samples));
        CHECK(p.success_rate >= 0.0);
        CHECK(p.success_rate <= 1.0);
        CHECK(p.compression < 1.0);
        CHECK(p.singletons <= p.boxes);
        CHECK(p.feature_sets <= p.boxes);
    }
    CHECK(equal(series.back(), s.sample_diagnostics()));
    CHECK(equal(s.sample_diagnostics(), recount(s)));
}

TEST_CASE("incremental counters equal the recount at every checkpoint") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> coord(0, 6);
    auto oracle = FunctionOracle(2, 2, [](const Vector& x) { return x[0] > 3 ? 1 : 0; });
    auto phi = FunctionAttributor([](const Vector& x) { return Vector{1.0, x[1] - 3.0}; });
    Stobb s;
    for (int i = 0; i < 300; ++i) {
        s.process(oracle, phi, {double(coord(rng)), double(coord(rng))});
        if (i % 100 == 99) CHECK(equal(s.sample_diagnostics(), recount(s)));
    }
}

TEST_CASE("diagnostics CSV") {
    CHECK(diagnostics_csv({}) ==
          "samples,feature_sets,boxes,singletons,updates,k,compression,success_rate\n");

    DiagnosticsPoint p;
    p.samples = 10;
    p.feature_sets = 2;
    p.boxes = 3;
    p.singletons = 1;
    p.updates = 4;
    p.k = 3;
    p.compression = 0.7;
    p.success_rate = 0.6;
    std::string csv = diagnostics_csv({p});
    CHECK(csv == "samples,feature_sets,boxes,singletons,updates,k,compression,success_rate\n"
                 "10,2,3,1,4,3,0.7,0.6\n");

    Stobb s = random_run(3, 150);
    std::string full = diagnostics_csv(s.diagnostics_series());
    std::vector<DiagnosticsPoint> parsed = parse_diagnostics_csv(full);
    REQUIRE(parsed.size() == s.diagnostics_series().size());
    for (std::size_t i = 0; i < parsed.size(); ++i)
        CHECK(equal(parsed[i], s.diagnostics_series()[i]));
    CHECK_THROWS_AS(parse_diagnostics_csv("h\n1,2,3\n"), IoError);
}

TEST_CASE("export_diagnostics writes CSV and SVG") {
    Stobb s = random_run(9, 50);
    std::string csv_path = "test_diag.csv", svg_path = "test_diag.svg";
    export_diagnostics(s.diagnostics_series(), csv_path, svg_path);
    std::ifstream csv_in(csv_path);
    std::string csv((std::istreambuf_iterator<char>(csv_in)), std::istreambuf_iterator<char>());
    CHECK(csv == diagnostics_csv(s.diagnostics_series()));
    std::ifstream svg_in(svg_path);
    std::string svg((std::istreambuf_iterator<char>(svg_in)), std::istreambuf_iterator<char>());
    CHECK(svg.find("<polyline") != std::string::npos);
    std::filesystem::remove(csv_path);
    std::filesystem::remove(svg_path);
}

TEST_CASE("evolution snapshots are ordered and replayable") {
    Stobb a = random_run(21, 120), b = random_run(21, 120);
    REQUIRE_FALSE(a.evolution().empty());
    for (const auto& [I, snaps] : a.evolution()) {
        for (std::size_t i = 1; i < snaps.size(); ++i)
            CHECK(snaps[i - 1].update_ordinal <= snaps[i].update_ordinal);
    }
    // determinism: identical run yields the identical snapshot sequence
    REQUIRE(a.evolution().size() == b.evolution().size());
    auto ia = a.evolution().begin();
    auto ib = b.evolution().begin();
    for (; ia != a.evolution().end(); ++ia, ++ib) {
        CHECK(ia->first == ib->first);
        REQUIRE(ia->second.size() == ib->second.size());
        for (std::size_t i = 0; i < ia->second.size(); ++i) {
            CHECK(ia->second[i].update_ordinal == ib->second[i].update_ordinal);
            CHECK(ia->second[i].boxes == ib->second[i].boxes);
        }
    }
}
