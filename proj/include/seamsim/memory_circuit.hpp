#pragma once

#include "seamsim/circuit.hpp"
#include "seamsim/lattice.hpp"
#include "seamsim/noise.hpp"
#include "seamsim/partition.hpp"
#include "seamsim/schedule.hpp"

#include <vector>

namespace seamsim {

// Per-round compilation record: which checks were measured, how many
// Bell pairs the round consumed, and the idle interval charged to the
// data qubits.
struct RoundLayout {
    struct Round {
        std::vector<CheckRef> scheduled;
        int n_remote = 0;
        double dt_idle_s = 0.0;
    };
    std::vector<Round> rounds; // t = 0..T
};

// Ancilla qubit ids sit above the data block and do not depend on the
// partition.
inline uint32_t ancilla_id(const ColorCodeLattice& lat, int face, CheckType type) {
    return static_cast<uint32_t>(lat.num_qubits() + 2 * face + (type == CheckType::X ? 1 : 0));
}

// Compile a Z-basis memory experiment: reset all data, T+1 extraction
// rounds (round 0 measures everything, later rounds follow the plan for
// seam checks), transversal data measurement, detectors, and the logical
// observable. Also fills *layout when given. noise.p == 0 compiles the
// noiseless reference circuit (no gate noise and no idle twirl).
CircuitIR build_memory_circuit(const ColorCodeLattice& lat, const Partition& part,
                               const RoundPlan& plan, const NoiseParams& noise, int T,
                               RoundLayout* layout = nullptr);

} // namespace seamsim
