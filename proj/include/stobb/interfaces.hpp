#pragma once

#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stobb/engine.hpp"
#include "stobb/projection.hpp"
#include "stobb/svg.hpp"

namespace stobb {

// A rule extracted from one box; conditions mirror the source box exactly so
// every answer stays traceable to its supporting observations.
struct RuleExplanation {
    FeatureSet subspace;
    struct Condition {
        std::size_t feature;
        double lo, hi;
    };
    std::vector<Condition> conditions;
    ClassId label = 0;
    std::size_t support_size = 0;
    std::uint64_t box_id = 0;
    std::vector<ObsId> provenance;
};

struct ContrastPair {
    RuleExplanation rule;
    std::optional<RuleExplanation> contrast;  // nullopt: no other-label box exists
    double distance = 0;
};

struct GlobalPoint {
    ObsId obs_id = 0;
    double u = 0, v = 0;
    std::size_t subspace_id = 0;
    ClassId label = 0;

    bool operator==(const GlobalPoint&) const = default;
};

struct GlobalView {
    std::vector<GlobalPoint> points;
    std::vector<FeatureSet> subspace_table;  // subspace_id -> feature set
    std::string projection_kind;
    std::string projection_params;  // serialized, for third-party replay
};

inline RuleExplanation rule_from_box(const Box& b) {
    RuleExplanation r;
    r.subspace = b.subspace;
    for (std::size_t i = 0; i < b.subspace.size(); ++i)
        r.conditions.push_back({b.subspace[i], b.lo[i], b.hi[i]});
    r.label = b.label;
    r.support_size = b.support.size();
    r.box_id = b.id;
    r.provenance = b.support;
    return r;
}

namespace detail {

// Resolve the applicable box for x, updating the surrogate if tracing fails.
// One retry suffices: ingest restores adequacy for x, so a second failure is
// an engine bug and surfaces as an internal error.
inline const Box* applicable_box(Stobb& engine, const BlackBoxModel& model, Attributor& phi,
                                 const Vector& x) {
    ClassId c = model.predict(x);
    Vector a = phi.attribute(model, x, c);
    FeatureSet I = binarize_topk(a, engine.k());
    if (I.empty())
        throw std::runtime_error("unexplainable: no positive attributions for this input");
    TraceResult tr = engine.trace(x, c, I);
    if (!tr.ok()) {
        engine.ingest(x, c, a);
        I = binarize_topk(a, engine.k());  // k may have grown during the update
        tr = engine.trace(x, c, I);
        if (!tr.ok())
            throw std::logic_error("internal error: trace still fails after update");
    }
    return tr.box;
}

}  // namespace detail

inline RuleExplanation explain_local(Stobb& engine, const BlackBoxModel& model, Attributor& phi,
                                     const Vector& x) {
    return rule_from_box(*detail::applicable_box(engine, model, phi, x));
}

// Contrast = other-label box in the same boxsystem minimizing box_distance,
// ties broken by lowest box id. target_class restricts the search ("why c and
// not c'").
inline ContrastPair explain_contrastive(Stobb& engine, const BlackBoxModel& model,
                                        Attributor& phi, const Vector& x,
                                        std::optional<ClassId> target_class = std::nullopt) {
    const Box* own = detail::applicable_box(engine, model, phi, x);
    ContrastPair out;
    out.rule = rule_from_box(*own);

    const BoxSystem& sys = engine.boxsystems().at(own->subspace);
    const Box* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Box& cand : sys.boxes) {
        if (cand.label == own->label) continue;
        if (target_class && cand.label != *target_class) continue;
        double d = box_distance(*own, cand);
        if (d < best_d || (d == best_d && best && cand.id < best->id)) {
            best = &cand;
            best_d = d;
        }
    }
    if (best) {
        out.contrast = rule_from_box(*best);
        out.distance = best_d;
    }
    return out;
}

// Read-only global projection of the whole base. Never mutates the engine.
inline GlobalView export_global(const Stobb& engine, const std::string& projection_kind = "pca") {
    if (engine.base().size() < 2)
        throw std::runtime_error("global view needs at least 2 stored observations");
    if (projection_kind != "pca")
        throw std::runtime_error("unknown projection kind: " + projection_kind);

    std::vector<Vector> rows;
    rows.reserve(engine.base().size());
    for (const Observation& o : engine.base().records()) rows.push_back(o.x);

    const ExplainerConfig& cfg = engine.explainer_config();
    Vector means = cfg.feature_means, stds = cfg.feature_stds;
    if (means.size() != rows[0].size())
        ExplainerConfig::standardization_from(rows, means, stds);
    PcaProjection pca(rows, means, stds);

    GlobalView view;
    view.projection_kind = projection_kind;
    std::map<FeatureSet, std::size_t> subspace_ids;
    for (const Observation& o : engine.base().records()) {
        auto [it, inserted] = subspace_ids.emplace(o.subspace, view.subspace_table.size());
        if (inserted) view.subspace_table.push_back(o.subspace);
        auto [u, v] = pca.project(o.x);
        view.points.push_back({o.id, u, v, it->second, o.label});
    }

    nlohmann::json params;
    params["axis_u"] = pca.axis_u();
    params["axis_v"] = pca.axis_v();
    params["feature_means"] = means;
    params["feature_stds"] = stds;
    view.projection_params = params.dump();
    return view;
}

inline std::string global_view_csv(const GlobalView& view) {
    std::string out = "obs_id,u,v,subspace_id,class\n";
    for (const GlobalPoint& p : view.points) {
        out += std::to_string(p.obs_id) + "," + format_double(p.u) + "," + format_double(p.v) +
               "," + std::to_string(p.subspace_id) + "," + std::to_string(p.label) + "\n";
    }
    return out;
}

inline std::vector<GlobalPoint> parse_global_csv(const std::string& csv) {
    std::vector<GlobalPoint> pts;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw IoError("malformed global view CSV row");
        GlobalPoint p;
        p.obs_id = std::stoull(cells[0]);
        p.u = parse_double(cells[1]);
        p.v = parse_double(cells[2]);
        p.subspace_id = std::stoull(cells[3]);
        p.label = static_cast<ClassId>(std::stol(cells[4]));
        pts.push_back(p);
    }
    return pts;
}

// SVG scatter (color per subspace, marker shape per class) plus a sidecar CSV
// of the raw points.
inline void render_scatter(const GlobalView& view, const std::string& svg_path,
                           const std::string& csv_path) {
    std::vector<double> us, vs;
    for (const GlobalPoint& p : view.points) {
        us.push_back(p.u);
        vs.push_back(p.v);
    }
    svg::Range ru = svg::Range::of(us), rv = svg::Range::of(vs);

    svg::Document doc(640, 480);
    for (const GlobalPoint& p : view.points) {
        double x = ru.scale(p.u, 40, 620);
        double y = rv.scale(p.v, 460, 20);  // flipped: SVG y grows downward
        const auto& pal = svg::palette();
        doc.marker(x, y, p.label, pal[p.subspace_id % pal.size()]);
    }
    doc.text(10, 15, "global view (" + view.projection_kind + "): color=subspace, marker=class");

    std::ofstream svg_out(svg_path);
    if (!svg_out) throw IoError("cannot write " + svg_path);
    svg_out << doc.str();
    std::ofstream csv_out(csv_path);
    if (!csv_out) throw IoError("cannot write " + csv_path);
    csv_out << global_view_csv(view);
}

}  // namespace stobb
