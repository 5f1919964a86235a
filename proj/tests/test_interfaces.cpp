#include <filesystem>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "stobb/interfaces.hpp"

using namespace stobb;
using stobb::testing::FunctionAttributor;
using stobb::testing::FunctionOracle;

namespace {

FunctionAttributor unit_attributor(std::size_t d) {
    return FunctionAttributor([d](const Vector&) { return Vector(d, 1.0); });
}

// 1-D fixture: A:[0,1] and B:[4,6] after ingesting 0,1 (label 0) and 4,6 (label 1)
struct Fixture {
    Stobb engine;
    FunctionOracle oracle{1, 2, [](const Vector& x) { return x[0] >= 4 ? 1 : 0; }};
    FunctionAttributor phi = unit_attributor(1);

    Fixture() {
        for (double v : {0.0, 1.0, 4.0, 6.0}) engine.process(oracle, phi, {v});
    }
};

}  // namespace

TEST_CASE("explain_local on a stored observation: its rule, no update") {
    Fixture f;
    std::size_t events = f.engine.update_log().size();
    RuleExplanation r = explain_local(f.engine, f.oracle, f.phi, {0.0});
    CHECK(f.engine.update_log().size() == events);
    REQUIRE(r.conditions.size() == 1);
    CHECK(r.conditions[0].feature == 0);
    CHECK(r.conditions[0].lo == 0.0);
    CHECK(r.conditions[0].hi == 1.0);
    CHECK(r.label == 0);
    CHECK(r.support_size == 2);
    CHECK(r.provenance == std::vector<ObsId>{0, 1});
}

TEST_CASE("explain_local on a fresh interior point: rule, no update") {
    Fixture f;
    std::size_t events = f.engine.update_log().size();
    RuleExplanation r = explain_local(f.engine, f.oracle, f.phi, {0.5});
    CHECK(f.engine.update_log().size() == events);
    CHECK(r.label == 0);
    CHECK(r.conditions[0].hi == 1.0);
}

TEST_CASE("explain_local on an unseen subspace triggers an update, singleton rule") {
    Stobb engine;
    auto oracle = FunctionOracle(2, 2, [](const Vector&) { return ClassId(0); });
    auto phi = unit_attributor(2);
    RuleExplanation r = explain_local(engine, oracle, phi, {3.0, 4.0});
    REQUIRE(engine.update_log().size() == 1);
    CHECK(engine.update_log()[0].kase == UpdateCase::new_subspace);
    CHECK(r.support_size == 1);
    CHECK(r.conditions[0].lo == 3.0);
    CHECK(r.conditions[0].hi == 3.0);
}

TEST_CASE("explain_local rejects inputs without positive attributions") {
    Stobb engine;
    auto oracle = FunctionOracle(1, 2, [](const Vector&) { return ClassId(0); });
    auto phi = FunctionAttributor([](const Vector&) { return Vector{-1.0}; });
    CHECK_THROWS_WITH(explain_local(engine, oracle, phi, {1.0}),
                      Catch::Matchers::ContainsSubstring("unexplainable"));
}

TEST_CASE("contrastive: single other-label candidate at distance 3") {
    Fixture f;
    ContrastPair pair = explain_contrastive(f.engine, f.oracle, f.phi, {0.5});
    CHECK(pair.rule.label == 0);
    REQUIRE(pair.contrast);
    CHECK(pair.contrast->label == 1);
    CHECK(pair.contrast->conditions[0].lo == 4.0);
    CHECK(pair.distance == 3.0);
}

TEST_CASE("contrastive with a single box: no contrast available") {
    Stobb engine;
    auto oracle = FunctionOracle(1, 2, [](const Vector&) { return ClassId(0); });
    auto phi = unit_attributor(1);
    engine.process(oracle, phi, {1.0});
    ContrastPair pair = explain_contrastive(engine, oracle, phi, {1.0});
    CHECK_FALSE(pair.contrast.has_value());
    CHECK(pair.distance == 0.0);
}

TEST_CASE("contrastive picks the nearest candidate; target class overrides") {
    // boxes after ingestion: [0,0]A [1,1]C [2,2]B [3.5,3.5]A [5,5]B
    // (every same-label hull would swallow a foreign singleton)
    Stobb engine;
    auto oracle = FunctionOracle(1, 3, [](const Vector& x) {
        if (x[0] == 1.0) return ClassId(2);
        if (x[0] == 2.0 || x[0] == 5.0) return ClassId(1);
        return ClassId(0);
    });
    auto phi = unit_attributor(1);
    for (double v : {0.0, 1.0, 2.0, 3.5, 5.0}) engine.process(oracle, phi, {v});
    REQUIRE(engine.boxsystems().begin()->second.boxes.size() == 5);

    ContrastPair nearest = explain_contrastive(engine, oracle, phi, {0.0});
    REQUIRE(nearest.contrast);
    CHECK(nearest.contrast->label == 2);  // C at x=1, distance 1
    CHECK(nearest.distance == 1.0);

    ContrastPair targeted = explain_contrastive(engine, oracle, phi, {0.0}, ClassId(1));
    REQUIRE(targeted.contrast);
    CHECK(targeted.contrast->label == 1);  // B at x=2, distance 2
    CHECK(targeted.distance == 2.0);

    // brute force over the boxsystem agrees with the returned argmin
    const BoxSystem& sys = engine.boxsystems().begin()->second;
    const Box* own = sys.find_containing({0.0});
    double best = 1e300;
    for (const Box& b : sys.boxes)
        if (b.label != own->label) best = std::min(best, box_distance(*own, b));
    CHECK(best == nearest.distance);
}

TEST_CASE("rule provenance re-traces into the named box") {
    Fixture f;
    for (const Observation& o : f.engine.base().records()) {
        RuleExplanation r = explain_local(f.engine, f.oracle, f.phi, o.x);
        bool found = false;
        for (ObsId id : r.provenance)
            if (id == o.id) found = true;
        CHECK(found);
        for (ObsId id : r.provenance) {
            const Observation& p = f.engine.base()[id];
            TraceResult tr = f.engine.trace(p.x, p.label, r.subspace);
            REQUIRE(tr.ok());
            CHECK(tr.box->id == r.box_id);
        }
    }
}

TEST_CASE("export_global: one point per observation, read-only") {
    Fixture f;
    std::string hash_before = f.engine.state_hash();
    GlobalView view = export_global(f.engine);
    CHECK(f.engine.state_hash() == hash_before);
    REQUIRE(view.points.size() == 4);
    std::set<ObsId> ids;
    for (const GlobalPoint& p : view.points) ids.insert(p.obs_id);
    CHECK(ids.size() == 4);
    CHECK(view.subspace_table.size() == 1);
    CHECK(view.projection_kind == "pca");
    CHECK_FALSE(view.projection_params.empty());
}

TEST_CASE("export_global preconditions") {
    Stobb empty;
    CHECK_THROWS(export_global(empty));
    Fixture f;
    CHECK_THROWS_WITH(export_global(f.engine, "umap"),
                      Catch::Matchers::ContainsSubstring("unknown projection"));
}

TEST_CASE("collinear base: degenerate second axis emits zero") {
    Stobb engine;
    auto oracle = FunctionOracle(2, 2, [](const Vector&) { return ClassId(0); });
    auto phi = unit_attributor(2);
    // x[1] is an affine image of x[0]: rank-1 covariance
    for (double v : {0.0, 1.0, 2.0}) engine.process(oracle, phi, {v, 2 * v + 1});
    GlobalView view = export_global(engine);
    for (const GlobalPoint& p : view.points) CHECK(p.v == 0.0);
    // the informative axis still separates the points
    CHECK(view.points[0].u != view.points[2].u);
}

TEST_CASE("global CSV round trip") {
    Fixture f;
    GlobalView view = export_global(f.engine);
    std::string csv = global_view_csv(view);
    CHECK(parse_global_csv(csv) == view.points);
}

TEST_CASE("render_scatter writes SVG markers and a sidecar CSV") {
    Fixture f;
    GlobalView view = export_global(f.engine);
    std::string svg_path = "test_scatter.svg", csv_path = "test_scatter.csv";
    render_scatter(view, svg_path, csv_path);
    std::ifstream svg_in(svg_path);
    std::string svg((std::istreambuf_iterator<char>(svg_in)), std::istreambuf_iterator<char>());
    std::size_t markers = 0, pos = 0;
    while ((pos = svg.find("class=\"marker\"", pos)) != std::string::npos) {
        ++markers;
        pos += 1;
    }
    CHECK(markers == view.points.size());
    std::ifstream csv_in(csv_path);
    std::string csv((std::istreambuf_iterator<char>(csv_in)), std::istreambuf_iterator<char>());
    CHECK(parse_global_csv(csv) == view.points);
    std::filesystem::remove(svg_path);
    std::filesystem::remove(csv_path);
}

TEST_CASE("mutating query changes the state hash and logs the event") {
    Fixture f;
    std::string before = f.engine.state_hash();
    std::size_t events = f.engine.update_log().size();
    explain_local(f.engine, f.oracle, f.phi, {9.0});  // outside both boxes
    CHECK(f.engine.state_hash() != before);
    REQUIRE(f.engine.update_log().size() == events + 1);
    CHECK(f.engine.update_log().back().triggered_update());
    CHECK(f.engine.check_adequacy().ok());
}
