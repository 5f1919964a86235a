#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "stobb/common.hpp"
#include "stobb/geometry.hpp"

namespace stobb {

// One recorded probe of the black box. The full attribution vector is kept so
// a k-escalation can re-binarize without re-querying the explainer.
struct Observation {
    ObsId id = 0;
    Vector x;
    ClassId label = 0;
    Vector attribution;
    FeatureSet subspace;  // derived at the k in force when recorded

    Vector project() const {
        Vector p;
        p.reserve(subspace.size());
        for (std::size_t j : subspace.indices()) p.push_back(x[j]);
        return p;
    }
};

// Indices of the up-to-k largest strictly positive entries, ties broken by
// lower index. Empty result signals rejection.
inline FeatureSet binarize_topk(const Vector& a, std::size_t k) {
    if (k < 1) throw ContractViolation("binarize_topk: k must be >= 1");
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0.0) pos.push_back(i);
    std::stable_sort(pos.begin(), pos.end(),
                     [&](std::size_t i, std::size_t j) { return a[i] > a[j]; });
    if (pos.size() > k) pos.resize(k);
    std::sort(pos.begin(), pos.end());
    return FeatureSet(std::move(pos));
}

// Append-only record of observations. Entries are never mutated or deleted;
// ids are gapless and increasing.
class ObservationBase {
  public:
    // Returns nullopt when the observation is rejected (no strictly positive
    // attribution score); rejected probes are counted but not stored.
    std::optional<ObsId> record(const Vector& x, ClassId label, const Vector& a,
                                std::size_t k) {
        if (x.size() != a.size())
            throw ContractViolation("record: attribution dimension != input dimension");
        FeatureSet subspace = binarize_topk(a, k);
        if (subspace.empty()) {
            ++rejected_count_;
            return std::nullopt;
        }
        Observation o;
        o.id = records_.size();
        o.x = x;
        o.label = label;
        o.attribution = a;
        o.subspace = std::move(subspace);
        records_.push_back(std::move(o));
        return records_.back().id;
    }

    // Recomputes every stored subspace at a larger k, insertion order kept.
    void rebinarize_all(std::size_t k) {
        for (Observation& o : records_) o.subspace = binarize_topk(o.attribution, k);
    }

    const Observation& operator[](ObsId id) const { return records_.at(id); }
    const std::vector<Observation>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    std::uint64_t rejected_count() const { return rejected_count_; }
    void set_rejected_count(std::uint64_t n) { rejected_count_ = n; }

    // Used only by state deserialization.
    void restore(std::vector<Observation> records, std::uint64_t rejected) {
        records_ = std::move(records);
        rejected_count_ = rejected;
        for (std::size_t i = 0; i < records_.size(); ++i)
            if (records_[i].id != i) throw IoError("observation ids not gapless");
    }

  private:
    std::vector<Observation> records_;
    std::uint64_t rejected_count_ = 0;
};

// One record per line: id;x;label;attribution;subspace with comma-separated
// full-precision decimals. The documented external form of the base.
inline std::string format_record_line(const Observation& o) {
    std::string line = std::to_string(o.id) + ";";
    for (std::size_t i = 0; i < o.x.size(); ++i) {
        if (i) line += ",";
        line += format_double(o.x[i]);
    }
    line += ";" + std::to_string(o.label) + ";";
    for (std::size_t i = 0; i < o.attribution.size(); ++i) {
        if (i) line += ",";
        line += format_double(o.attribution[i]);
    }
    line += ";";
    for (std::size_t i = 0; i < o.subspace.size(); ++i) {
        if (i) line += ",";
        line += std::to_string(o.subspace[i]);
    }
    return line;
}

}  // namespace stobb
