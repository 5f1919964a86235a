#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "stobb/common.hpp"

namespace stobb {

// Ordered set of feature dimension indices. Strictly increasing, non-empty
// for any observation that survived the rejection rule.
class FeatureSet {
  public:
    FeatureSet() = default;
    explicit FeatureSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        for (std::size_t i = 1; i < indices_.size(); ++i)
            if (indices_[i] <= indices_[i - 1])
                throw ContractViolation("FeatureSet indices must be strictly increasing");
    }

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }

    bool operator==(const FeatureSet& o) const = default;
    bool operator<(const FeatureSet& o) const { return indices_ < o.indices_; }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(indices_[i]);
        }
        return s + "}";
    }

  private:
    std::vector<std::size_t> indices_;
};

// Axis-aligned, fully bounded, labeled hyperrectangle over a subspace.
// Closed intervals on every dimension; lo == hi everywhere for a singleton.
// Every endpoint equals a coordinate of some supporting observation.
struct Box {
    std::uint64_t id = 0;  // creation order, used for deterministic tie-breaks
    FeatureSet subspace;
    std::vector<double> lo;
    std::vector<double> hi;
    ClassId label = 0;
    std::vector<ObsId> support;

    bool operator==(const Box& o) const = default;
};

inline Box make_singleton(std::uint64_t id, const FeatureSet& subspace, const Vector& x,
                          ClassId label, ObsId obs) {
    Box b;
    b.id = id;
    b.subspace = subspace;
    b.label = label;
    b.support = {obs};
    b.lo.reserve(subspace.size());
    for (std::size_t j : subspace.indices()) {
        if (j >= x.size()) throw ContractViolation("singleton: point dimension too small");
        b.lo.push_back(x[j]);
    }
    b.hi = b.lo;
    return b;
}

// Closed containment of a full-dimensional point, tested on the subspace only.
inline bool contains(const Box& b, const Vector& point) {
    if (!b.subspace.empty() && point.size() <= b.subspace.indices().back())
        throw ContractViolation("contains: point dimension too small for box subspace");
    for (std::size_t i = 0; i < b.subspace.size(); ++i) {
        double v = point[b.subspace[i]];
        if (v < b.lo[i] || v > b.hi[i]) return false;
    }
    return true;
}

// Closed intervals intersect in every dimension. Touching boundaries count:
// a shared boundary point would satisfy contains() for both boxes.
inline bool overlaps(const Box& a, const Box& b) {
    if (!(a.subspace == b.subspace))
        throw ContractViolation("overlaps: boxes live on different subspaces");
    for (std::size_t i = 0; i < a.lo.size(); ++i)
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
    return true;
}

// Per-dimension [min(lo), max(hi)]; support is the union of supports.
inline Box hull(const Box& a, const Box& b) {
    if (!(a.subspace == b.subspace))
        throw ContractViolation("hull: boxes live on different subspaces");
    if (a.label != b.label) throw ContractViolation("hull: label mismatch");
    Box h;
    h.id = std::min(a.id, b.id);
    h.subspace = a.subspace;
    h.label = a.label;
    h.lo.resize(a.lo.size());
    h.hi.resize(a.hi.size());
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        h.lo[i] = std::min(a.lo[i], b.lo[i]);
        h.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    std::set<ObsId> ids(a.support.begin(), a.support.end());
    ids.insert(b.support.begin(), b.support.end());
    h.support.assign(ids.begin(), ids.end());
    return h;
}

// Euclidean norm of the per-dimension interval gaps. Zero exactly when the
// closed projections intersect in every dimension, i.e. when the boxes overlap.
inline double box_distance(const Box& a, const Box& b) {
    if (!(a.subspace == b.subspace))
        throw ContractViolation("box_distance: boxes live on different subspaces");
    double sq = 0;
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        double gap = std::max(a.lo[i] - b.hi[i], b.lo[i] - a.hi[i]);
        if (gap > 0) sq += gap * gap;
    }
    return std::sqrt(sq);
}

// One subspace plus its non-overlapping labeled boxes. Any point lies in at
// most one box.
struct BoxSystem {
    FeatureSet subspace;
    std::vector<Box> boxes;

    const Box* find_containing(const Vector& x) const {
        for (const Box& b : boxes)
            if (contains(b, x)) return &b;
        return nullptr;
    }

    // O(m^2) brute force; the check used after every mutation in tests.
    bool pairwise_disjoint() const {
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j)
                if (overlaps(boxes[i], boxes[j])) return false;
        return true;
    }
};

}  // namespace stobb
