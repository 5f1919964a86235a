#pragma once

#include <set>
#include <utility>
#include <vector>

#include "stobb/geometry.hpp"

namespace stobb {

// Greedy merge over one subspace: repeatedly pick the same-label pair with
// minimal box_distance (ties: lower creation-order id pair), replace the pair
// by its hull unless the hull overlaps any other box. A reverted pair is
// marked unmergeable until either of its boxes changes, which bounds the
// procedure at O(m^2) attempts. The hull keeps the smaller of the two ids.
//
// Preserves: pairwise non-overlap, union of supports, containment of every
// supporting observation (hull is monotone).
inline std::vector<Box> merge(std::vector<Box> boxes) {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (overlaps(boxes[i], boxes[j]))
                throw ContractViolation("merge: input boxes overlap");

    std::set<std::pair<std::uint64_t, std::uint64_t>> blocked;
    auto id_pair = [](const Box& a, const Box& b) {
        return std::make_pair(std::min(a.id, b.id), std::max(a.id, b.id));
    };

    for (;;) {
        std::size_t best_i = 0, best_j = 0;
        bool found = false;
        double best_d = 0;
        std::pair<std::uint64_t, std::uint64_t> best_ids;
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                if (boxes[i].label != boxes[j].label) continue;
                auto ids = id_pair(boxes[i], boxes[j]);
                if (blocked.count(ids)) continue;
                double d = box_distance(boxes[i], boxes[j]);
                if (!found || d < best_d || (d == best_d && ids < best_ids)) {
                    found = true;
                    best_d = d;
                    best_i = i;
                    best_j = j;
                    best_ids = ids;
                }
            }
        if (!found) break;

        Box h = hull(boxes[best_i], boxes[best_j]);
        bool obstructed = false;
        for (std::size_t m = 0; m < boxes.size(); ++m) {
            if (m == best_i || m == best_j) continue;
            if (overlaps(h, boxes[m])) {
                obstructed = true;
                break;
            }
        }
        if (obstructed) {
            blocked.insert(best_ids);
            continue;
        }
        std::uint64_t a = boxes[best_i].id, b = boxes[best_j].id;
        for (auto it = blocked.begin(); it != blocked.end();)
            if (it->first == a || it->second == a || it->first == b || it->second == b)
                it = blocked.erase(it);
            else
                ++it;
        boxes.erase(boxes.begin() + best_j);
        boxes.erase(boxes.begin() + best_i);
        boxes.push_back(std::move(h));
    }
    return boxes;
}

}  // namespace stobb
