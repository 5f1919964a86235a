#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stobb/attribution.hpp"
#include "stobb/common.hpp"
#include "stobb/geometry.hpp"
#include "stobb/merge.hpp"
#include "stobb/observation.hpp"
#include "stobb/oracle.hpp"

namespace stobb {

enum class UpdateCase {
    no_op,
    new_subspace,
    expand_or_singleton,
    dissolve_misclassified,
    k_escalation,
};

inline const char* to_string(UpdateCase c) {
    switch (c) {
        case UpdateCase::no_op: return "no_op";
        case UpdateCase::new_subspace: return "new_subspace";
        case UpdateCase::expand_or_singleton: return "expand_or_singleton";
        case UpdateCase::dissolve_misclassified: return "dissolve_misclassified";
        case UpdateCase::k_escalation: return "k_escalation";
    }
    return "?";
}

inline UpdateCase update_case_from(const std::string& s) {
    for (UpdateCase c : {UpdateCase::no_op, UpdateCase::new_subspace,
                         UpdateCase::expand_or_singleton, UpdateCase::dissolve_misclassified,
                         UpdateCase::k_escalation})
        if (s == to_string(c)) return c;
    throw IoError("unknown update case: " + s);
}

struct UpdateEvent {
    std::uint64_t ordinal = 0;  // logical timestamp; wall clock would break replay
    std::optional<ObsId> obs;
    UpdateCase kase = UpdateCase::no_op;
    bool rejected = false;
    std::uint64_t boxes_before = 0;
    std::uint64_t boxes_after = 0;

    bool triggered_update() const { return !rejected && kase != UpdateCase::no_op; }
};

struct TraceResult {
    enum class Reason { ok, unknown_subspace, not_covered, wrong_label };
    Reason reason = Reason::unknown_subspace;
    const Box* box = nullptr;  // set iff reason == ok or wrong_label

    bool ok() const { return reason == Reason::ok; }
};

struct DiagnosticsPoint {
    std::uint64_t samples = 0;  // processed (non-rejected) observations
    std::uint64_t feature_sets = 0;
    std::uint64_t boxes = 0;
    std::uint64_t singletons = 0;
    std::uint64_t updates = 0;
    std::uint64_t k = 0;
    double compression = 0;
    double success_rate = 0;
};

struct KHistoryEntry {
    std::uint64_t old_k = 0;
    ObsId conflict_new = 0;
    ObsId conflict_old = 0;
    std::string snapshot_hash;
};

struct EvolutionSnapshot {
    FeatureSet subspace;
    std::uint64_t update_ordinal = 0;
    std::vector<Box> boxes;
};

struct AdequacyReport {
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// The whole artefact: observation base, boxsystems, k with its history,
// update log, diagnostics. Single writer; all mutation goes through
// process()/ingest(). Read-only queries are const.
class Stobb {
  public:
    explicit Stobb(std::size_t initial_k = 3, ExplainerConfig cfg = {}, bool dedup = false,
                   bool full_snapshots = false)
        : k_(initial_k), initial_k_(initial_k), cfg_(std::move(cfg)), dedup_(dedup),
          full_snapshots_(full_snapshots) {
        if (initial_k < 1) throw ContractViolation("initial k must be >= 1");
    }

    std::size_t k() const { return k_; }
    const ObservationBase& base() const { return base_; }
    const std::map<FeatureSet, BoxSystem>& boxsystems() const { return systems_; }
    const std::vector<KHistoryEntry>& k_history() const { return k_history_; }
    const std::vector<UpdateEvent>& update_log() const { return update_log_; }
    const std::vector<DiagnosticsPoint>& diagnostics_series() const { return series_; }
    const std::map<FeatureSet, std::vector<EvolutionSnapshot>>& evolution() const {
        return evolution_;
    }
    const std::map<std::string, std::string>& snapshots() const { return snapshots_; }
    const ExplainerConfig& explainer_config() const { return cfg_; }
    void set_explainer_config(ExplainerConfig cfg) { cfg_ = std::move(cfg); }

    std::uint64_t total_boxes() const {
        std::uint64_t n = 0;
        for (const auto& [_, sys] : systems_) n += sys.boxes.size();
        return n;
    }

    // Tracing logic: success iff the boxsystem for I exists and holds a box
    // that contains x with the right label.
    TraceResult trace(const Vector& x, ClassId c, const FeatureSet& I) const {
        if (I.empty()) throw ContractViolation("trace: empty subspace");
        auto it = systems_.find(I);
        if (it == systems_.end()) return {TraceResult::Reason::unknown_subspace, nullptr};
        const Box* b = it->second.find_containing(x);
        if (!b) return {TraceResult::Reason::not_covered, nullptr};
        if (b->label != c) return {TraceResult::Reason::wrong_label, b};
        return {TraceResult::Reason::ok, b};
    }

    // One full pass: predict, attribute, record, restore adequacy.
    UpdateEvent process(const BlackBoxModel& model, Attributor& phi, const Vector& x) {
        ClassId c = model.predict(x);
        Vector a = phi.attribute(model, x, c);
        return ingest(x, c, a);
    }

    // Core update with a precomputed prediction and attribution.
    UpdateEvent ingest(const Vector& x, ClassId c, const Vector& a) {
        UpdateEvent ev;
        ev.ordinal = update_log_.size();
        ev.boxes_before = total_boxes();

        FeatureSet I = binarize_topk(a, k_);
        if (I.empty()) {
            base_.record(x, c, a, k_);  // counts the rejection, stores nothing
            ev.rejected = true;
            ev.boxes_after = ev.boxes_before;
            update_log_.push_back(ev);
            return ev;
        }
        if (dedup_ && is_duplicate(x, c, a)) {
            ev.boxes_after = ev.boxes_before;
            update_log_.push_back(ev);
            return ev;
        }

        ObsId id = *base_.record(x, c, a, k_);
        ev.obs = id;

        if (auto conflict = detect_conflict(base_[id])) {
            escalate_k(id, *conflict);
            ev.kase = UpdateCase::k_escalation;
        } else {
            ev.kase = apply(base_[id]);
        }
        ev.boxes_after = total_boxes();
        update_log_.push_back(ev);
        record_diagnostics();
        record_evolution(ev, base_[id].subspace);
        return ev;
    }

    // Some stored observation with the same subspace, identical projection
    // onto it, and a different label. Only earlier ids are considered so a
    // rebuild replay behaves like the original online run.
    std::optional<ObsId> detect_conflict(const Observation& o) const {
        for (const Observation& p : base_.records()) {
            if (p.id >= o.id) break;
            if (p.label == o.label || !(p.subspace == o.subspace)) continue;
            if (p.project() == o.project()) return p.id;
        }
        return std::nullopt;
    }

    // Re-traces every stored observation and brute-forces the structural
    // invariants. Empty report == empirically adequate, consistent state.
    AdequacyReport check_adequacy() const {
        AdequacyReport rep;
        for (const Observation& o : base_.records()) {
            TraceResult tr = trace(o.x, o.label, o.subspace);
            if (!tr.ok())
                rep.failures.push_back("observation " + std::to_string(o.id) +
                                       ": trace failed (" + reason_name(tr.reason) + ")");
        }
        std::map<ObsId, int> assigned;
        for (const auto& [I, sys] : systems_) {
            if (!sys.pairwise_disjoint())
                rep.failures.push_back("boxsystem " + I.to_string() + ": overlapping boxes");
            for (const Box& b : sys.boxes) {
                for (ObsId oid : b.support) {
                    ++assigned[oid];
                    const Observation& o = base_[oid];
                    if (!contains(b, o.x))
                        rep.failures.push_back("box " + std::to_string(b.id) +
                                               ": support observation " + std::to_string(oid) +
                                               " outside box");
                    if (o.label != b.label)
                        rep.failures.push_back("box " + std::to_string(b.id) +
                                               ": support observation " + std::to_string(oid) +
                                               " has different label");
                }
                for (std::size_t i = 0; i < b.subspace.size(); ++i) {
                    if (!endpoint_supported(b, i, b.lo[i]) || !endpoint_supported(b, i, b.hi[i]))
                        rep.failures.push_back("box " + std::to_string(b.id) +
                                               ": interval endpoint not backed by an observation");
                }
            }
        }
        for (const Observation& o : base_.records())
            if (assigned[o.id] != 1)
                rep.failures.push_back("observation " + std::to_string(o.id) + " supported by " +
                                       std::to_string(assigned[o.id]) + " boxes");
        return rep;
    }

    DiagnosticsPoint sample_diagnostics() const {
        DiagnosticsPoint p;
        p.samples = base_.size();
        p.feature_sets = systems_.size();
        p.boxes = total_boxes();
        for (const auto& [_, sys] : systems_)
            for (const Box& b : sys.boxes)
                if (b.support.size() == 1) ++p.singletons;
        for (const UpdateEvent& e : update_log_)
            if (e.triggered_update()) ++p.updates;
        p.k = k_;
        if (p.samples > 0) {
            p.compression = 1.0 - double(p.boxes) / double(p.samples);
            p.success_rate = double(p.samples - p.updates) / double(p.samples);
        }
        return p;
    }

    EvolutionSnapshot snapshot_evolution(const FeatureSet& I) {
        auto it = systems_.find(I);
        if (it == systems_.end())
            throw std::runtime_error("no boxsystem for subspace " + I.to_string());
        EvolutionSnapshot snap;
        snap.subspace = I;
        snap.update_ordinal = update_log_.size();
        snap.boxes = it->second.boxes;
        evolution_[I].push_back(snap);
        return snap;
    }

    std::string serialize() const;
    static Stobb deserialize(const std::string& text);

    std::string state_hash() const { return hash_hex(fnv1a(serialize())); }

  private:
    friend struct StateCodec;

    static const char* reason_name(TraceResult::Reason r) {
        switch (r) {
            case TraceResult::Reason::ok: return "ok";
            case TraceResult::Reason::unknown_subspace: return "unknown_subspace";
            case TraceResult::Reason::not_covered: return "not_covered";
            case TraceResult::Reason::wrong_label: return "wrong_label";
        }
        return "?";
    }

    bool endpoint_supported(const Box& b, std::size_t dim, double v) const {
        std::size_t feature = b.subspace[dim];
        for (ObsId oid : b.support)
            if (base_[oid].x[feature] == v) return true;
        return false;
    }

    bool is_duplicate(const Vector& x, ClassId c, const Vector& a) const {
        for (const Observation& o : base_.records())
            if (o.label == c && o.x == x && o.attribution == a) return true;
        return false;
    }

    // The three update cases of the construction procedure. Adequacy holds on
    // return; conflicts were ruled out by the caller.
    UpdateCase apply(const Observation& o) {
        auto it = systems_.find(o.subspace);
        if (it == systems_.end()) {
            BoxSystem sys;
            sys.subspace = o.subspace;
            sys.boxes.push_back(make_singleton(next_box_id_++, o.subspace, o.x, o.label, o.id));
            systems_.emplace(o.subspace, std::move(sys));
            return UpdateCase::new_subspace;
        }
        BoxSystem& sys = it->second;
        Box* b = nullptr;
        for (Box& cand : sys.boxes)
            if (contains(cand, o.x)) {
                b = &cand;
                break;
            }
        if (b) {
            if (b->label == o.label) {
                b->support.insert(
                    std::lower_bound(b->support.begin(), b->support.end(), o.id), o.id);
                return UpdateCase::no_op;
            }
            // Dissolve: explode the offending box into singletons of its
            // supporting observations plus the new one, then re-merge.
            // Observations sharing a projection fold into one singleton, or
            // the merge input would contain coincident (overlapping) boxes.
            std::vector<Box> pool;
            for (const Box& keep : sys.boxes)
                if (keep.id != b->id) pool.push_back(keep);
            std::map<Vector, std::vector<ObsId>> groups;
            for (ObsId oid : b->support) groups[base_[oid].project()].push_back(oid);
            for (auto& [proj, ids] : groups) {
                const Observation& s = base_[ids.front()];
                Box single = make_singleton(next_box_id_++, o.subspace, s.x, s.label, s.id);
                single.support = ids;
                pool.push_back(std::move(single));
            }
            pool.push_back(make_singleton(next_box_id_++, o.subspace, o.x, o.label, o.id));
            sys.boxes = merge(std::move(pool));
            return UpdateCase::dissolve_misclassified;
        }
        // Not covered: singleton for x, then merge. Boundary expansion and
        // new-box creation are the same code path; "no possible expansion"
        // is the singleton surviving the merge.
        std::vector<Box> pool = sys.boxes;
        pool.push_back(make_singleton(next_box_id_++, o.subspace, o.x, o.label, o.id));
        sys.boxes = merge(std::move(pool));
        return UpdateCase::expand_or_singleton;
    }

    // Snapshot, k+1, re-binarize, replay the whole base in original order
    // with stored attributions. Loops if the replay surfaces another
    // conflict at the larger k.
    void escalate_k(ObsId conflict_new, ObsId conflict_old) {
        for (;;) {
            check_escalation_possible(conflict_new, conflict_old);

            std::string snap = serialize();
            std::string hash = hash_hex(fnv1a(snap));
            snapshots_.emplace(hash, std::move(snap));
            k_history_.push_back({k_, conflict_new, conflict_old, hash});

            ++k_;
            base_.rebinarize_all(k_);
            systems_.clear();
            next_box_id_ = 0;

            std::optional<std::pair<ObsId, ObsId>> recurrence;
            for (const Observation& o : base_.records()) {
                if (auto c = detect_conflict(o)) {
                    recurrence = {o.id, *c};
                    break;
                }
                apply(o);
            }
            if (!recurrence) return;
            conflict_new = recurrence->first;
            conflict_old = recurrence->second;
        }
    }

    // No k can separate two observations that agree on every strictly
    // positive attribution dimension of either one.
    void check_escalation_possible(ObsId a, ObsId b) const {
        const Observation& oa = base_[a];
        const Observation& ob = base_[b];
        std::size_t d = oa.x.size();
        bool separable = false;
        for (std::size_t j = 0; j < d && !separable; ++j) {
            bool pa = oa.attribution[j] > 0, pb = ob.attribution[j] > 0;
            if (pa != pb) separable = true;
            else if (pa && oa.x[j] != ob.x[j]) separable = true;
        }
        if (!separable || k_ >= d) throw AmbiguousObservationSpace(a, b);
    }

    void record_diagnostics() { series_.push_back(sample_diagnostics()); }

    void record_evolution(const UpdateEvent& ev, const FeatureSet& I) {
        if (!ev.triggered_update()) return;
        if (full_snapshots_) {
            for (const auto& [sub, _] : systems_) snapshot_evolution(sub);
        } else if (systems_.count(I)) {
            snapshot_evolution(I);
        }
    }

    std::size_t k_;
    std::size_t initial_k_;
    ExplainerConfig cfg_;
    bool dedup_;
    bool full_snapshots_;
    ObservationBase base_;
    std::map<FeatureSet, BoxSystem> systems_;
    std::uint64_t next_box_id_ = 0;
    std::vector<KHistoryEntry> k_history_;
    std::map<std::string, std::string> snapshots_;  // content hash -> serialized state
    std::vector<UpdateEvent> update_log_;
    std::vector<DiagnosticsPoint> series_;
    std::map<FeatureSet, std::vector<EvolutionSnapshot>> evolution_;
};

}  // namespace stobb

#include "stobb/serialize.hpp"
