#pragma once

#include "seamsim/circuit.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seamsim {

// One independent fault mechanism: with probability p it flips the
// listed detectors (sorted) and, when flips_observable, the logical
// observable.
struct Mechanism {
    double p = 0.0;
    std::vector<uint32_t> detectors;
    bool flips_observable = false;

    bool operator==(const Mechanism&) const = default;
};

struct DetectorErrorModel {
    uint32_t detector_count = 0;
    bool merged = true;
    std::vector<Mechanism> mechanisms;
    // Copied from the circuit so decoders can reconstruct face/color/
    // round structure without the circuit.
    std::vector<DetectorMeta> detector_meta;
    // Noise outcomes that touch neither a detector nor the observable.
    uint64_t inert_outcomes = 0;
};

// Backward fault-propagation pass over the circuit. Every noise
// annotation contributes one mechanism per Pauli outcome; identical
// signatures are merged with p <- p1(1-p2) + p2(1-p1). Deterministic
// mechanism order (sorted by signature).
DetectorErrorModel extract_dem(const CircuitIR& circuit);

// One mechanism per line: `E <p> D<i> D<j> ... L0` (L0 marks an
// observable flip).
std::string dump_dem(const DetectorErrorModel& dem);

} // namespace seamsim
