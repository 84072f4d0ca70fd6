#include "seamsim/framesim.hpp"

#include "seamsim/rng.hpp"
#include "seamsim/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>

namespace seamsim {

FrameSampler::FrameSampler(const CircuitIR& circuit) {
    std::string why;
    if (!check_deterministic(circuit, &why))
        throw std::invalid_argument("contract-violation: " + why);
    num_qubits_ = circuit.num_qubits;
    num_detectors_ = static_cast<uint32_t>(circuit.detectors.size());
    num_measurements_ = circuit.num_measurements();
    detectors_ = circuit.detectors;
    observable_ = circuit.observable;

    uint32_t meas = 0;
    uint32_t stream = 0;
    ops_.reserve(circuit.instructions.size());
    targets_store_.reserve(circuit.instructions.size());
    for (const auto& ins : circuit.instructions) {
        Op op;
        op.gate = ins.gate;
        op.targets_idx = static_cast<uint32_t>(targets_store_.size());
        targets_store_.push_back(ins.targets);
        op.first_meas = meas;
        if (ins.gate == Gate::MZ) meas += static_cast<uint32_t>(ins.targets.size());
        op.noise = ins.noise.kind;
        switch (ins.noise.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Dep1:
        case NoiseKind::Flip:
            op.p_total = ins.noise.p;
            op.units = static_cast<uint32_t>(ins.targets.size());
            break;
        case NoiseKind::Dep2:
            op.p_total = ins.noise.p;
            op.units = static_cast<uint32_t>(ins.targets.size() / 2);
            break;
        case NoiseKind::Pauli1:
            op.px = ins.noise.px;
            op.py = ins.noise.py;
            op.pz = ins.noise.pz;
            op.p_total = op.px + op.py + op.pz;
            op.units = static_cast<uint32_t>(ins.targets.size());
            break;
        }
        if (op.noise != NoiseKind::None && op.p_total > 0.0) {
            op.inv_log1m = op.p_total >= 1.0 ? 0.0 : 1.0 / std::log1p(-op.p_total);
            op.stream_id = stream++;
        } else {
            op.noise = NoiseKind::None;
        }
        ops_.push_back(op);
    }
    frame_x_.assign(num_qubits_, 0);
    frame_z_.assign(num_qubits_, 0);
    meas_.assign(num_measurements_, 0);
}

void FrameSampler::sample_batch(uint64_t seed, uint32_t batch_index, uint64_t* det_words,
                                uint64_t* obs_word) {
    std::memset(frame_x_.data(), 0, frame_x_.size() * 8);
    std::memset(frame_z_.data(), 0, frame_z_.size() * 8);
    std::memset(meas_.data(), 0, meas_.size() * 8);

    for (const Op& op : ops_) {
        const std::vector<uint32_t>& tg = targets_store_[op.targets_idx];
        switch (op.gate) {
        case Gate::R:
        case Gate::RX:
            for (uint32_t q : tg) {
                frame_x_[q] = 0;
                frame_z_[q] = 0;
            }
            break;
        case Gate::H:
            for (uint32_t q : tg) std::swap(frame_x_[q], frame_z_[q]);
            break;
        case Gate::CX:
            for (size_t k = 0; k + 1 < tg.size(); k += 2) {
                frame_x_[tg[k + 1]] ^= frame_x_[tg[k]];
                frame_z_[tg[k]] ^= frame_z_[tg[k + 1]];
            }
            break;
        case Gate::MZ:
            for (size_t k = 0; k < tg.size(); ++k) {
                meas_[op.first_meas + k] = frame_x_[tg[k]];
                frame_z_[tg[k]] = 0;
            }
            break;
        case Gate::IDLE:
            break;
        }
        if (op.noise == NoiseKind::None) continue;

        CounterStream rng(seed, op.stream_id, batch_index);
        const uint64_t domain = static_cast<uint64_t>(op.units) * 64;
        uint64_t pos = 0;
        while (true) {
            const double u = rng.next_double();
            uint64_t gap;
            if (op.p_total >= 1.0) {
                gap = 0;
            } else {
                const double g = std::floor(std::log1p(-u) * op.inv_log1m);
                if (g >= static_cast<double>(domain)) break;
                gap = static_cast<uint64_t>(g);
            }
            pos += gap;
            if (pos >= domain) break;
            const uint32_t unit = static_cast<uint32_t>(pos >> 6);
            const uint64_t bit = 1ull << (pos & 63);
            const double r = rng.next_double();
            switch (op.noise) {
            case NoiseKind::Dep1: {
                const int code = 1 + std::min(2, static_cast<int>(r * 3.0));
                const uint32_t q = tg[unit];
                if (code & 1) frame_x_[q] ^= bit;
                if (code & 2) frame_z_[q] ^= bit;
                break;
            }
            case NoiseKind::Dep2: {
                const int code = 1 + std::min(14, static_cast<int>(r * 15.0));
                const int ca = code & 3, cb = code >> 2;
                const uint32_t qa = tg[2 * unit], qb = tg[2 * unit + 1];
                if (ca & 1) frame_x_[qa] ^= bit;
                if (ca & 2) frame_z_[qa] ^= bit;
                if (cb & 1) frame_x_[qb] ^= bit;
                if (cb & 2) frame_z_[qb] ^= bit;
                break;
            }
            case NoiseKind::Flip:
                meas_[op.first_meas + unit] ^= bit;
                break;
            case NoiseKind::Pauli1: {
                const double scaled = r * op.p_total;
                const uint32_t q = tg[unit];
                if (scaled < op.px) {
                    frame_x_[q] ^= bit;
                } else if (scaled < op.px + op.py) {
                    frame_x_[q] ^= bit;
                    frame_z_[q] ^= bit;
                } else {
                    frame_z_[q] ^= bit;
                }
                break;
            }
            default:
                break;
            }
            ++pos;
        }
    }

    for (uint32_t d = 0; d < num_detectors_; ++d) {
        uint64_t w = 0;
        for (uint32_t m : detectors_[d]) w ^= meas_[m];
        det_words[d] = w;
    }
    uint64_t w = 0;
    for (uint32_t m : observable_) w ^= meas_[m];
    *obs_word = w;
}

DetectorSamples sample_shots(const CircuitIR& circuit, uint64_t shots, uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("invalid-shots: need at least 1 shot");
    FrameSampler sampler(circuit);
    const uint32_t D = sampler.num_detectors();
    DetectorSamples out;
    out.shots = shots;
    out.num_detectors = D;
    out.words_per_shot = (D + 63) / 64;
    out.detector_bits.assign(shots * out.words_per_shot, 0);
    out.observable_flips.assign((shots + 63) / 64, 0);
    out.seed = seed;

    std::vector<uint64_t> det_words(D);
    const uint64_t batches = (shots + 63) / 64;
    for (uint64_t b = 0; b < batches; ++b) {
        uint64_t obs_word = 0;
        sampler.sample_batch(seed, static_cast<uint32_t>(b), det_words.data(), &obs_word);
        const uint64_t base_shot = b * 64;
        const uint32_t in_batch = static_cast<uint32_t>(std::min<uint64_t>(64, shots - base_shot));
        const uint64_t keep = in_batch == 64 ? ~0ull : ((1ull << in_batch) - 1);
        out.observable_flips[b] = obs_word & keep;
        for (uint32_t d = 0; d < D; ++d) {
            uint64_t w = det_words[d] & keep;
            while (w) {
                const uint32_t s = static_cast<uint32_t>(__builtin_ctzll(w));
                w &= w - 1;
                out.detector_bits[(base_shot + s) * out.words_per_shot + d / 64] |=
                    1ull << (d % 64);
            }
        }
    }
    return out;
}

OracleMarginals oracle_detector_marginals(const DetectorErrorModel& dem, int w_max) {
    if (w_max < 0) throw std::invalid_argument("invalid-weight: w_max must be >= 0");
    const size_t M = dem.mechanisms.size();
    const int depth_cap = std::min<int>(w_max, static_cast<int>(M));
    double budget = 0.0, c = 1.0;
    for (int k = 1; k <= depth_cap; ++k) {
        c = c * static_cast<double>(M - static_cast<size_t>(k) + 1) / k;
        budget += c;
        if (budget > 1e7)
            throw std::invalid_argument("oracle-too-large: subset budget exceeds 10^7");
    }

    const uint32_t D = dem.detector_count;
    const size_t words = (D + 63) / 64;
    std::vector<std::vector<uint64_t>> sigs(M, std::vector<uint64_t>(words, 0));
    for (size_t i = 0; i < M; ++i)
        for (uint32_t d : dem.mechanisms[i].detectors) sigs[i][d / 64] |= 1ull << (d % 64);

    double base = 1.0;
    for (const auto& m : dem.mechanisms) base *= 1.0 - m.p;

    OracleMarginals out;
    out.detector_prob.assign(D, 0.0);

    // DFS over fault sets of size <= w_max; `prob` is the exact
    // probability that exactly this subset fires and all others stay
    // silent. `cur` carries the XOR of the subset's signatures.
    std::vector<uint64_t> cur(words, 0);
    std::function<void(size_t, int, double)> dfs = [&](size_t start, int depth, double prob) {
        if (depth == depth_cap) return;
        for (size_t i = start; i < M; ++i) {
            const double pi = dem.mechanisms[i].p;
            const double p_new = prob * pi / (1.0 - pi);
            for (size_t w = 0; w < words; ++w) cur[w] ^= sigs[i][w];
            for (uint32_t d = 0; d < D; ++d)
                if ((cur[d / 64] >> (d % 64)) & 1) out.detector_prob[d] += p_new;
            dfs(i + 1, depth + 1, p_new);
            for (size_t w = 0; w < words; ++w) cur[w] ^= sigs[i][w];
        }
    };
    dfs(0, 0, base);

    // Truncation error: P(#fired > w_max), Poisson-binomial count DP
    // with an overflow bucket in the last slot.
    std::vector<double> dp(static_cast<size_t>(w_max) + 2, 0.0);
    dp[0] = 1.0;
    for (const auto& m : dem.mechanisms) {
        for (size_t k = dp.size(); k-- > 0;) {
            const double move = dp[k] * m.p;
            dp[k] -= move;
            dp[std::min(k + 1, dp.size() - 1)] += move;
        }
    }
    out.truncation_bound = dp.back();
    return out;
}

} // namespace seamsim
