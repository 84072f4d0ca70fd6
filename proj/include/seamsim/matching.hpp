#pragma once

#include <cstdint>
#include <vector>

namespace seamsim {

struct MatchEdge {
    int u = 0;
    int v = 0;
    int64_t weight = 0;
};

// Exact maximum-weight matching (Galil's blossom algorithm, O(V^3)).
// Returns mate[v] = matched partner or -1. With max_cardinality, the
// matching has maximum size and, among those, maximum weight. Integer
// weights keep all dual arithmetic exact.
std::vector<int> max_weight_matching(int num_nodes, const std::vector<MatchEdge>& edges,
                                     bool max_cardinality);

// Minimum-weight perfect matching via the weight flip w -> max_w + 1 - w.
// The graph must admit a perfect matching (callers pad with zero-weight
// virtual edges); throws std::runtime_error otherwise.
std::vector<int> min_weight_perfect_matching(int num_nodes, const std::vector<MatchEdge>& edges);

} // namespace seamsim
