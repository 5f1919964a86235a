#include <random>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "stobb/engine.hpp"

using namespace stobb;
using stobb::testing::FunctionAttributor;
using stobb::testing::FunctionOracle;

namespace {

// exercises rejection, no_op, expand, dissolve, and one k escalation
Stobb busy_state() {
    auto oracle = FunctionOracle(3, 2, [](const Vector& x) { return x[2] > 1.5 ? 1 : 0; });
    auto phi = FunctionAttributor([](const Vector& x) {
        if (x[0] < 0) return Vector{-1.0, -1.0, -1.0};  // rejected probe
        return Vector{1.0, 0.9, 0.1 * x[2]};
    });
    Stobb s(2);
    s.process(oracle, phi, {1, 1, 1});
    s.process(oracle, phi, {-1, 0, 0});  // rejected
    s.process(oracle, phi, {1, 1, 2});   // escalates k to 3
    s.process(oracle, phi, {2, 2, 1});
    s.process(oracle, phi, {3, 3, 1});
    return s;
}

}  // namespace

TEST_CASE("state round trip is byte-identical") {
    Stobb s = busy_state();
    std::string text = s.serialize();
    Stobb back = Stobb::deserialize(text);
    CHECK(back.serialize() == text);
    CHECK(back.state_hash() == s.state_hash());
}

TEST_CASE("round trip restores every component") {
    Stobb s = busy_state();
    Stobb back = Stobb::deserialize(s.serialize());
    CHECK(back.k() == s.k());
    CHECK(back.base().size() == s.base().size());
    CHECK(back.base().rejected_count() == 1);
    CHECK(back.boxsystems().size() == s.boxsystems().size());
    CHECK(back.k_history().size() == 1);
    CHECK(back.snapshots().size() == s.snapshots().size());
    CHECK(back.update_log().size() == s.update_log().size());
    CHECK(back.diagnostics_series().size() == s.diagnostics_series().size());
    CHECK(back.evolution().size() == s.evolution().size());
    for (std::size_t i = 0; i < s.base().size(); ++i) {
        CHECK(back.base()[i].x == s.base()[i].x);
        CHECK(back.base()[i].attribution == s.base()[i].attribution);
        CHECK(back.base()[i].subspace == s.base()[i].subspace);
        CHECK(back.base()[i].label == s.base()[i].label);
    }
    CHECK(back.check_adequacy().ok());
}

TEST_CASE("deserialized engine continues identically") {
    Stobb a = busy_state();
    Stobb b = Stobb::deserialize(a.serialize());
    auto oracle = FunctionOracle(3, 2, [](const Vector& x) { return x[2] > 1.5 ? 1 : 0; });
    auto phi = FunctionAttributor([](const Vector& x) { return Vector{1.0, 0.9, 0.1 * x[2]}; });
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> coord(0, 4);
    for (int i = 0; i < 50; ++i) {
        Vector x = {double(coord(rng)), double(coord(rng)), double(coord(rng))};
        a.process(oracle, phi, x);
        b.process(oracle, phi, x);
    }
    CHECK(a.serialize() == b.serialize());
}

TEST_CASE("embedded escalation snapshot is itself a valid state") {
    Stobb s = busy_state();
    REQUIRE(s.k_history().size() == 1);
    const std::string& hash = s.k_history()[0].snapshot_hash;
    REQUIRE(s.snapshots().count(hash) == 1);
    const std::string& snap_text = s.snapshots().at(hash);
    CHECK(hash_hex(fnv1a(snap_text)) == hash);  // content-addressed
    Stobb snap = Stobb::deserialize(snap_text);
    CHECK(snap.k() == 2);
    // the snapshot captures the moment of conflict: the triggering observation
    // is already recorded but not yet placed, so it is the only inadequacy
    AdequacyReport rep = snap.check_adequacy();
    CHECK_FALSE(rep.ok());
    const std::string conflict = "observation " + std::to_string(s.k_history()[0].conflict_new);
    for (const std::string& f : rep.failures)
        CHECK(f.find(conflict) != std::string::npos);
}

TEST_CASE("format guard and malformed input") {
    Stobb s = busy_state();
    std::string text = s.serialize();
    auto pos = text.find("stobb-state/1");
    REQUIRE(pos != std::string::npos);
    std::string wrong = text;
    wrong.replace(pos, 13, "stobb-state/9");
    CHECK_THROWS_AS(Stobb::deserialize(wrong), IoError);
    CHECK_THROWS(Stobb::deserialize("not json at all"));
    CHECK_THROWS(Stobb::deserialize("{}"));
}

TEST_CASE("observation record line round trip") {
    Observation o;
    o.id = 7;
    o.x = {1.5, -2.25, 0.1};
    o.label = 2;
    o.attribution = {0.125, 0.5, -0.75};
    o.subspace = binarize_topk(o.attribution, 3);
    std::string line = format_record_line(o);
    Observation back = StateCodec::record_from_line(line);
    CHECK(back.id == o.id);
    CHECK(back.x == o.x);
    CHECK(back.label == o.label);
    CHECK(back.attribution == o.attribution);
    CHECK(back.subspace == o.subspace);
    CHECK_THROWS_AS(StateCodec::record_from_line("1;2;3"), IoError);
}

TEST_CASE("empty engine round trip") {
    Stobb s;
    Stobb back = Stobb::deserialize(s.serialize());
    CHECK(back.serialize() == s.serialize());
    CHECK(back.base().size() == 0);
    CHECK(back.check_adequacy().ok());
}
