#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stobb/engine.hpp"

namespace stobb {

// Versioned state document. nlohmann objects keep keys sorted and emit
// shortest round-trip decimals, so identical states serialize to identical
// bytes.
struct StateCodec {
    static constexpr const char* kFormat = "stobb-state/1";

    static nlohmann::json box_to_json(const Box& b) {
        nlohmann::json j;
        j["id"] = b.id;
        j["label"] = b.label;
        j["lo"] = b.lo;
        j["hi"] = b.hi;
        j["support"] = b.support;
        return j;
    }

    static Box box_from_json(const nlohmann::json& j, const FeatureSet& subspace) {
        Box b;
        b.id = j.at("id").get<std::uint64_t>();
        b.label = j.at("label").get<ClassId>();
        b.lo = j.at("lo").get<std::vector<double>>();
        b.hi = j.at("hi").get<std::vector<double>>();
        b.support = j.at("support").get<std::vector<ObsId>>();
        b.subspace = subspace;
        return b;
    }

    static std::string encode(const Stobb& s) {
        nlohmann::json j;
        j["format"] = kFormat;
        j["k"] = s.k_;
        j["initial_k"] = s.initial_k_;
        j["dedup"] = s.dedup_;
        j["full_snapshots"] = s.full_snapshots_;
        j["next_box_id"] = s.next_box_id_;

        nlohmann::json cfg;
        cfg["n_perturbations"] = s.cfg_.n_perturbations;
        cfg["kernel_bandwidth"] = s.cfg_.kernel_bandwidth;
        cfg["ridge_strength"] = s.cfg_.ridge_strength;
        cfg["seed"] = s.cfg_.seed;
        cfg["feature_means"] = s.cfg_.feature_means;
        cfg["feature_stds"] = s.cfg_.feature_stds;
        j["explainer"] = cfg;

        nlohmann::json base;
        base["rejected"] = s.base_.rejected_count();
        std::vector<std::string> lines;
        lines.reserve(s.base_.size());
        for (const Observation& o : s.base_.records()) lines.push_back(format_record_line(o));
        base["records"] = lines;
        j["base"] = base;

        nlohmann::json systems = nlohmann::json::array();
        for (const auto& [I, sys] : s.systems_) {
            nlohmann::json js;
            js["subspace"] = I.indices();
            nlohmann::json boxes = nlohmann::json::array();
            for (const Box& b : sys.boxes) boxes.push_back(box_to_json(b));
            js["boxes"] = boxes;
            systems.push_back(js);
        }
        j["boxsystems"] = systems;

        nlohmann::json hist = nlohmann::json::array();
        for (const KHistoryEntry& e : s.k_history_) {
            nlohmann::json je;
            je["old_k"] = e.old_k;
            je["conflict_new"] = e.conflict_new;
            je["conflict_old"] = e.conflict_old;
            je["snapshot_hash"] = e.snapshot_hash;
            hist.push_back(je);
        }
        j["k_history"] = hist;
        j["snapshots"] = s.snapshots_;

        nlohmann::json log = nlohmann::json::array();
        for (const UpdateEvent& e : s.update_log_) {
            nlohmann::json je;
            je["ordinal"] = e.ordinal;
            je["case"] = to_string(e.kase);
            je["rejected"] = e.rejected;
            je["boxes_before"] = e.boxes_before;
            je["boxes_after"] = e.boxes_after;
            if (e.obs) je["obs"] = *e.obs;
            log.push_back(je);
        }
        j["update_log"] = log;

        nlohmann::json diag = nlohmann::json::array();
        for (const DiagnosticsPoint& p : s.series_) {
            diag.push_back({p.samples, p.feature_sets, p.boxes, p.singletons, p.updates, p.k,
                            p.compression, p.success_rate});
        }
        j["diagnostics"] = diag;

        nlohmann::json evo = nlohmann::json::array();
        for (const auto& [I, snaps] : s.evolution_) {
            nlohmann::json je;
            je["subspace"] = I.indices();
            nlohmann::json list = nlohmann::json::array();
            for (const EvolutionSnapshot& snap : snaps) {
                nlohmann::json jsnap;
                jsnap["ordinal"] = snap.update_ordinal;
                nlohmann::json boxes = nlohmann::json::array();
                for (const Box& b : snap.boxes) boxes.push_back(box_to_json(b));
                jsnap["boxes"] = boxes;
                list.push_back(jsnap);
            }
            je["snapshots"] = list;
            evo.push_back(je);
        }
        j["evolution"] = evo;

        return j.dump(2) + "\n";
    }

    static Observation record_from_line(const std::string& line) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ';') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        if (fields.size() != 5) throw IoError("malformed observation record line");
        auto split_doubles = [](const std::string& s) {
            Vector out;
            std::size_t p = 0;
            for (std::size_t i = 0; i <= s.size(); ++i)
                if (i == s.size() || s[i] == ',') {
                    if (i > p) out.push_back(parse_double(s.substr(p, i - p)));
                    p = i + 1;
                }
            return out;
        };
        Observation o;
        o.id = std::stoull(fields[0]);
        o.x = split_doubles(fields[1]);
        o.label = static_cast<ClassId>(std::stol(fields[2]));
        o.attribution = split_doubles(fields[3]);
        std::vector<std::size_t> idx;
        std::size_t p = 0;
        const std::string& f = fields[4];
        for (std::size_t i = 0; i <= f.size(); ++i)
            if (i == f.size() || f[i] == ',') {
                if (i > p) idx.push_back(std::stoull(f.substr(p, i - p)));
                p = i + 1;
            }
        o.subspace = FeatureSet(std::move(idx));
        return o;
    }

    static Stobb decode(const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != kFormat)
            throw IoError("unsupported state format: " + j.at("format").get<std::string>());

        ExplainerConfig cfg;
        const nlohmann::json& jc = j.at("explainer");
        cfg.n_perturbations = jc.at("n_perturbations").get<std::size_t>();
        cfg.kernel_bandwidth = jc.at("kernel_bandwidth").get<double>();
        cfg.ridge_strength = jc.at("ridge_strength").get<double>();
        cfg.seed = jc.at("seed").get<std::uint64_t>();
        cfg.feature_means = jc.at("feature_means").get<Vector>();
        cfg.feature_stds = jc.at("feature_stds").get<Vector>();

        Stobb s(j.at("initial_k").get<std::size_t>(), cfg, j.at("dedup").get<bool>(),
                j.at("full_snapshots").get<bool>());
        s.k_ = j.at("k").get<std::size_t>();
        s.next_box_id_ = j.at("next_box_id").get<std::uint64_t>();

        std::vector<Observation> records;
        for (const auto& line : j.at("base").at("records"))
            records.push_back(record_from_line(line.get<std::string>()));
        s.base_.restore(std::move(records), j.at("base").at("rejected").get<std::uint64_t>());

        for (const auto& js : j.at("boxsystems")) {
            BoxSystem sys;
            sys.subspace = FeatureSet(js.at("subspace").get<std::vector<std::size_t>>());
            for (const auto& jb : js.at("boxes"))
                sys.boxes.push_back(box_from_json(jb, sys.subspace));
            s.systems_.emplace(sys.subspace, std::move(sys));
        }

        for (const auto& je : j.at("k_history")) {
            KHistoryEntry e;
            e.old_k = je.at("old_k").get<std::uint64_t>();
            e.conflict_new = je.at("conflict_new").get<ObsId>();
            e.conflict_old = je.at("conflict_old").get<ObsId>();
            e.snapshot_hash = je.at("snapshot_hash").get<std::string>();
            s.k_history_.push_back(e);
        }
        s.snapshots_ = j.at("snapshots").get<std::map<std::string, std::string>>();

        for (const auto& je : j.at("update_log")) {
            UpdateEvent e;
            e.ordinal = je.at("ordinal").get<std::uint64_t>();
            e.kase = update_case_from(je.at("case").get<std::string>());
            e.rejected = je.at("rejected").get<bool>();
            e.boxes_before = je.at("boxes_before").get<std::uint64_t>();
            e.boxes_after = je.at("boxes_after").get<std::uint64_t>();
            if (je.contains("obs")) e.obs = je.at("obs").get<ObsId>();
            s.update_log_.push_back(e);
        }

        for (const auto& jp : j.at("diagnostics")) {
            DiagnosticsPoint p;
            p.samples = jp.at(0).get<std::uint64_t>();
            p.feature_sets = jp.at(1).get<std::uint64_t>();
            p.boxes = jp.at(2).get<std::uint64_t>();
            p.singletons = jp.at(3).get<std::uint64_t>();
            p.updates = jp.at(4).get<std::uint64_t>();
            p.k = jp.at(5).get<std::uint64_t>();
            p.compression = jp.at(6).get<double>();
            p.success_rate = jp.at(7).get<double>();
            s.series_.push_back(p);
        }

        for (const auto& je : j.at("evolution")) {
            FeatureSet I(je.at("subspace").get<std::vector<std::size_t>>());
            for (const auto& jsnap : je.at("snapshots")) {
                EvolutionSnapshot snap;
                snap.subspace = I;
                snap.update_ordinal = jsnap.at("ordinal").get<std::uint64_t>();
                for (const auto& jb : jsnap.at("boxes"))
                    snap.boxes.push_back(box_from_json(jb, I));
                s.evolution_[I].push_back(std::move(snap));
            }
        }
        return s;
    }
};

inline std::string Stobb::serialize() const { return StateCodec::encode(*this); }
inline Stobb Stobb::deserialize(const std::string& text) { return StateCodec::decode(text); }

}  // namespace stobb
