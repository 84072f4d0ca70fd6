#pragma once

#include "seamsim/dem.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

namespace seamsim {

struct DecodeResult {
    bool predicted_flip = false;
    double weight = 0.0; // total correction weight, diagnostic
    bool best_effort = false;

    bool operator==(const DecodeResult&) const = default;
};

// Color-code restriction decoder. Z-sector detectors are projected onto
// the three color-restricted subgraphs (red-green, red-blue,
// green-blue) and defects are paired by exact minimum-weight perfect
// matching with per-defect virtual boundary partners. All three
// restrictions are needed for clustering: a boundary-edge fault touches
// two faces of the same color pair, and only the restriction carrying
// both colors can join them. The matchings cluster defects;
// the predicted observable flip is computed per cluster by a bounded
// exact maximum-likelihood search over z-signature fault classes (most
// probable fault set whose combined z-signature reproduces the cluster).
// Clusters too large for the search fall back to static per-edge
// observable parities along the matched paths.
//
// The static parities come from a global GF(2) solve of the
// per-mechanism edge constraints, most probable mechanisms first.
// Boundary chains make that system inherently inconsistent (an odd
// cycle of edge mechanisms along a boundary forms a logical with
// trivial syndrome), which is why the cluster search, not the edge
// parities, is the primary observable predictor.
//
// Hyperedge decomposition convention, applied per subgraph to each
// mechanism's projected defect list: first pair same-face detectors by
// consecutive rounds, then pair the remainder in ascending detector-id
// order, and send an odd leftover to the boundary of the color the
// defect's face does not touch.
class RestrictionDecoder {
  public:
    // Requires tagged detector metadata in the DEM; throws
    // std::invalid_argument("invalid-dem: ...") otherwise.
    explicit RestrictionDecoder(const DetectorErrorModel& dem);

    DecodeResult decode(const std::vector<uint8_t>& events) const;
    // events as fired detector ids (sorted or not).
    DecodeResult decode_sparse(const std::vector<uint32_t>& fired) const;

    uint32_t detector_count() const { return detector_count_; }
    // Mechanisms whose observable constraint was inconsistent with the
    // GF(2) edge solution (dropped from the static fallback parities).
    uint64_t observable_conflicts() const { return conflicts_; }

  private:
    struct Graph {
        uint32_t n = 0;
        std::vector<uint32_t> det_of_node;
        std::vector<int32_t> node_of_det; // detector -> node or -1
        std::vector<double> dist;         // n*n pairwise path weights
        std::vector<uint8_t> parity;      // n*n path observable parities
        std::vector<double> bdist;        // node -> boundary weight
        std::vector<uint8_t> bparity;     // node -> boundary parity
    };

    // Mechanisms grouped by z-sector signature: the hypothesis space of
    // the per-cluster maximum-likelihood search.
    struct ZClass {
        std::vector<uint32_t> dets; // sorted z-sector detector ids
        double logit = 0.0;         // log(p / (1-p)), p odds-combined
        uint8_t obs = 0;            // majority-probability observable bit
    };

    bool cluster_ml(const std::vector<uint32_t>& target, uint8_t& obs_out) const;

    Graph graphs_[3];
    std::vector<ZClass> zclasses_;
    std::vector<std::vector<uint32_t>> det_classes_; // z-detector -> class ids, best first
    uint32_t detector_count_ = 0;
    uint64_t conflicts_ = 0;
    mutable std::mutex ml_mu_;
    mutable std::map<std::vector<uint32_t>, uint8_t> ml_cache_; // 0/1 obs, 2 = no explanation
};

// One-shot convenience wrapper over RestrictionDecoder.
DecodeResult decode_restriction_mwpm(const DetectorErrorModel& dem,
                                     const std::vector<uint8_t>& events);

// Exhaustive maximum-likelihood reference over fault sets of size
// <= w_max whose combined signature reproduces `events` exactly. Sets
// best_effort when nothing within the budget matches. Subject to the
// same 10^7 subset budget as the marginals oracle.
DecodeResult decode_bounded_ml(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                               int w_max);

} // namespace seamsim
