#include "seamsim/dem.hpp"

#include "seamsim/tableau.hpp"

#include <charconv>
#include <map>
#include <stdexcept>

namespace seamsim {

namespace {

// Detector/observable sensitivity sets as packed bits; bit D (one past
// the detectors) is the observable.
class SigSet {
  public:
    SigSet(size_t width_bits) : words_((width_bits + 64) / 64 + 1) {}

    std::vector<uint64_t> make() const { return std::vector<uint64_t>(words_, 0); }
    size_t words() const { return words_; }

  private:
    size_t words_;
};

void xor_into(std::vector<uint64_t>& dst, const std::vector<uint64_t>& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

bool is_zero(const std::vector<uint64_t>& v) {
    for (uint64_t w : v)
        if (w) return false;
    return true;
}

} // namespace

DetectorErrorModel extract_dem(const CircuitIR& circuit) {
    validate_circuit(circuit);
    if (!check_deterministic(circuit))
        throw std::invalid_argument("contract-violation: circuit detectors are not deterministic");

    const uint32_t D = static_cast<uint32_t>(circuit.detectors.size());
    const uint32_t M = circuit.num_measurements();
    const size_t obs_bit = D;
    SigSet layout(D);

    // detset[m] = detectors (and observable) sensitive to measurement m.
    std::vector<std::vector<uint64_t>> detset(M, layout.make());
    for (uint32_t d = 0; d < D; ++d)
        for (uint32_t m : circuit.detectors[d]) detset[m][d / 64] ^= 1ull << (d % 64);
    for (uint32_t m : circuit.observable) detset[m][obs_bit / 64] ^= 1ull << (obs_bit % 64);

    // Measurement index of the first target of each MZ instruction.
    std::vector<uint32_t> meas_base(circuit.instructions.size(), 0);
    {
        uint32_t m = 0;
        for (size_t i = 0; i < circuit.instructions.size(); ++i) {
            meas_base[i] = m;
            if (circuit.instructions[i].gate == Gate::MZ)
                m += static_cast<uint32_t>(circuit.instructions[i].targets.size());
        }
    }

    std::vector<std::vector<uint64_t>> sens_x(circuit.num_qubits, layout.make());
    std::vector<std::vector<uint64_t>> sens_z(circuit.num_qubits, layout.make());

    // key: (signature bits) -> combined probability
    std::map<std::vector<uint64_t>, double> merged;
    uint64_t inert = 0;
    std::vector<uint64_t> sig = layout.make();

    auto record = [&](double p, const std::vector<uint64_t>& signature) {
        if (!(p > 0.0)) return;
        if (is_zero(signature)) {
            ++inert;
            return;
        }
        auto [it, fresh] = merged.emplace(signature, p);
        if (!fresh) it->second = it->second * (1.0 - p) + p * (1.0 - it->second);
    };

    auto pauli_sig = [&](int code, uint32_t q) -> const std::vector<uint64_t>* {
        // code: 1 = X, 2 = Z, 3 = Y
        static thread_local std::vector<uint64_t> tmp;
        switch (code) {
        case 1: return &sens_x[q];
        case 2: return &sens_z[q];
        default:
            tmp = sens_x[q];
            xor_into(tmp, sens_z[q]);
            return &tmp;
        }
    };

    for (size_t ii = circuit.instructions.size(); ii-- > 0;) {
        const Instruction& ins = circuit.instructions[ii];
        // Noise acts after its gate, i.e. exactly at the current
        // backward position: record mechanisms before undoing the gate.
        switch (ins.noise.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Dep1:
            for (uint32_t q : ins.targets)
                for (int code = 1; code <= 3; ++code)
                    record(ins.noise.p / 3.0, *pauli_sig(code, q));
            break;
        case NoiseKind::Dep2:
            for (size_t k = 0; k + 1 < ins.targets.size(); k += 2) {
                const uint32_t a = ins.targets[k], b = ins.targets[k + 1];
                for (int ca = 0; ca <= 3; ++ca)
                    for (int cb = 0; cb <= 3; ++cb) {
                        if (ca == 0 && cb == 0) continue;
                        sig.assign(sig.size(), 0);
                        if (ca) xor_into(sig, *pauli_sig(ca, a));
                        if (cb) xor_into(sig, *pauli_sig(cb, b));
                        record(ins.noise.p / 15.0, sig);
                    }
            }
            break;
        case NoiseKind::Flip:
            for (size_t k = 0; k < ins.targets.size(); ++k)
                record(ins.noise.p, detset[meas_base[ii] + k]);
            break;
        case NoiseKind::Pauli1:
            for (uint32_t q : ins.targets) {
                record(ins.noise.px, *pauli_sig(1, q));
                record(ins.noise.py, *pauli_sig(3, q));
                record(ins.noise.pz, *pauli_sig(2, q));
            }
            break;
        }
        // Undo the gate: transform sensitivities to the pre-gate frame.
        switch (ins.gate) {
        case Gate::MZ:
            for (size_t k = 0; k < ins.targets.size(); ++k) {
                const uint32_t q = ins.targets[k];
                xor_into(sens_x[q], detset[meas_base[ii] + k]);
                sens_z[q].assign(sens_z[q].size(), 0);
            }
            break;
        case Gate::R:
            for (uint32_t q : ins.targets) {
                sens_x[q].assign(sens_x[q].size(), 0);
                sens_z[q].assign(sens_z[q].size(), 0);
            }
            break;
        case Gate::RX:
            for (uint32_t q : ins.targets) {
                sens_x[q].assign(sens_x[q].size(), 0);
                sens_z[q].assign(sens_z[q].size(), 0);
            }
            break;
        case Gate::H:
            for (uint32_t q : ins.targets) std::swap(sens_x[q], sens_z[q]);
            break;
        case Gate::CX:
            for (size_t k = ins.targets.size(); k >= 2; k -= 2) {
                const uint32_t c = ins.targets[k - 2], t = ins.targets[k - 1];
                xor_into(sens_x[c], sens_x[t]);
                xor_into(sens_z[t], sens_z[c]);
            }
            break;
        case Gate::IDLE:
            break;
        }
    }

    DetectorErrorModel dem;
    dem.detector_count = D;
    dem.merged = true;
    dem.detector_meta = circuit.detector_meta;
    dem.inert_outcomes = inert;
    for (const auto& [signature, p] : merged) {
        Mechanism mech;
        mech.p = p;
        for (uint32_t d = 0; d < D; ++d)
            if ((signature[d / 64] >> (d % 64)) & 1) mech.detectors.push_back(d);
        mech.flips_observable = (signature[obs_bit / 64] >> (obs_bit % 64)) & 1;
        dem.mechanisms.push_back(std::move(mech));
    }
    return dem;
}

std::string dump_dem(const DetectorErrorModel& dem) {
    std::string out;
    char buf[64];
    for (const auto& m : dem.mechanisms) {
        out += "E ";
        auto res = std::to_chars(buf, buf + sizeof(buf), m.p);
        out.append(buf, res.ptr);
        for (uint32_t d : m.detectors) {
            out += " D";
            out += std::to_string(d);
        }
        if (m.flips_observable) out += " L0";
        out += '\n';
    }
    return out;
}

} // namespace seamsim
