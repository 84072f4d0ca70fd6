#pragma once

#include "seamsim/circuit.hpp"
#include "seamsim/dem.hpp"

#include <cstdint>
#include <vector>

namespace seamsim {

// Sampled detector events. Bits are packed 64 shots per word in both
// directions: detector_bits is row-major per shot (words_per_shot words
// each), observable_flips holds one bit per shot.
struct DetectorSamples {
    uint64_t shots = 0;
    uint32_t num_detectors = 0;
    uint32_t words_per_shot = 0;
    std::vector<uint64_t> detector_bits;
    std::vector<uint64_t> observable_flips;
    uint64_t seed = 0;

    bool det(uint64_t shot, uint32_t d) const {
        return (detector_bits[shot * words_per_shot + d / 64] >> (d % 64)) & 1;
    }
    bool obs(uint64_t shot) const { return (observable_flips[shot / 64] >> (shot % 64)) & 1; }
};

// Pauli-frame sampler over batches of 64 shots. Noise positions are
// drawn by geometric gap-skipping from per-(instruction, batch) Philox
// substreams, so results are bit-exact for a given (circuit, seed)
// regardless of how batches are distributed over callers or threads.
class FrameSampler {
  public:
    // Requires check_deterministic(circuit); throws
    // std::invalid_argument("contract-violation: ...") otherwise.
    explicit FrameSampler(const CircuitIR& circuit);

    uint32_t num_detectors() const { return num_detectors_; }
    uint32_t num_measurements() const { return num_measurements_; }

    // Samples batch `batch_index` (shots 64*b .. 64*b+63). det_words must
    // hold num_detectors() words; bit s of det_words[d] is detector d of
    // shot 64*b+s. *obs_word gets the observable flips the same way.
    void sample_batch(uint64_t seed, uint32_t batch_index, uint64_t* det_words,
                      uint64_t* obs_word);

  private:
    struct Op {
        Gate gate;
        NoiseKind noise;
        double p_total = 0.0;
        double inv_log1m = 0.0; // 1 / log1p(-p_total)
        double px = 0, py = 0, pz = 0;
        uint32_t first_meas = 0;
        uint32_t targets_idx = 0;
        uint32_t units = 0; // noise domain: targets (pairs for DEP2)
        uint32_t stream_id = 0;
    };

    std::vector<Op> ops_;
    uint32_t num_qubits_ = 0;
    uint32_t num_detectors_ = 0;
    uint32_t num_measurements_ = 0;
    std::vector<std::vector<uint32_t>> detectors_;
    std::vector<uint32_t> observable_;
    std::vector<std::vector<uint32_t>> targets_store_;
    // scratch (one batch)
    std::vector<uint64_t> frame_x_, frame_z_, meas_;
};

DetectorSamples sample_shots(const CircuitIR& circuit, uint64_t shots, uint64_t seed);

struct OracleMarginals {
    std::vector<double> detector_prob;
    // P(more than w_max mechanisms fire), bounding the truncation error.
    double truncation_bound = 0.0;
};

// Exact truncated inclusion-exclusion over all fault sets of size
// <= w_max. Throws std::invalid_argument("oracle-too-large: ...") when
// sum_k C(M, k) exceeds 10^7.
OracleMarginals oracle_detector_marginals(const DetectorErrorModel& dem, int w_max);

} // namespace seamsim
