#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seamsim {

// Gate set of the compiled memory circuit. R/RX are resets into |0> and
// |+>, IDLE is a no-op carrier for per-round idle noise.
enum class Gate : uint8_t { R, RX, H, CX, MZ, IDLE };

enum class NoiseKind : uint8_t { None, Dep1, Dep2, Flip, Pauli1 };

// Noise attached to an instruction, acting after the gate it annotates.
// Dep1/Dep2 are uniform 1- and 2-qubit depolarization with total
// probability p, Flip flips the recorded measurement outcome with
// probability p, Pauli1 applies X/Y/Z with probabilities px/py/pz.
struct NoiseAnnotation {
    NoiseKind kind = NoiseKind::None;
    double p = 0.0;
    double px = 0.0, py = 0.0, pz = 0.0;

    bool operator==(const NoiseAnnotation&) const = default;
};

struct Instruction {
    Gate gate = Gate::R;
    // CX takes (control, target) pairs; every other gate applies to each
    // target independently. MZ appends one measurement per target, in
    // target order.
    std::vector<uint32_t> targets;
    NoiseAnnotation noise;

    bool operator==(const Instruction&) const = default;
};

// Optional provenance of a detector: which face and check type produced
// it and in which round. -1 fields mean "not tagged".
struct DetectorMeta {
    int32_t face = -1;
    int32_t color = -1;
    int32_t x_type = -1;
    int32_t round = -1;

    bool tagged() const { return face >= 0; }
    bool operator==(const DetectorMeta&) const = default;
};

struct CircuitIR {
    uint32_t num_qubits = 0;
    std::vector<Instruction> instructions;
    // Each detector is the XOR of the listed measurement indices and must
    // be deterministically 0 in the noiseless circuit.
    std::vector<std::vector<uint32_t>> detectors;
    // Always sized to detectors; entries may be untagged.
    std::vector<DetectorMeta> detector_meta;
    std::vector<uint32_t> observable;

    uint32_t num_measurements() const;
    bool operator==(const CircuitIR&) const = default;
};

const char* gate_name(Gate g);

// Throws std::invalid_argument("invalid-circuit: ...") when targets are
// out of range, CX has an odd target count, a noise annotation does not
// fit its gate, or a detector/observable references a measurement index
// that does not exist.
void validate_circuit(const CircuitIR& c);

// Line-oriented text form, one instruction per line, noise as a `!KIND
// p...` suffix, `DETECTOR[(face,color,x,round)] m1 m2 ...`,
// `OBSERVABLE m1 ...`. parse(serialize(c)) == c exactly.
std::string serialize(const CircuitIR& c);

// Throws std::runtime_error("parse-error: line N: ...") on malformed
// input.
CircuitIR parse(const std::string& text);

} // namespace seamsim
