#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "seamsim/lattice.hpp"

namespace seamsim {

enum class CheckType : uint8_t { Z = 0, X = 1 };

struct CheckRef {
    int face = -1;
    CheckType type = CheckType::Z;
    bool operator==(const CheckRef&) const = default;
};

struct Partition {
    int num_qpus = 4;
    int inner_distance = 0;
    std::vector<int> qpu_of_data;                     // data qubit -> QPU
    std::vector<std::array<int, 2>> qpu_of_ancilla;   // [face][(int)type]
    std::vector<std::array<int, 2>> remote_pairs;     // CXs crossing QPUs per check
    std::vector<std::array<bool, 2>> seam;            // bulk iff !seam

    bool is_seam(int face, CheckType t) const { return seam[face][(int)t]; }
    int remote_pairs_of(int face, CheckType t) const { return remote_pairs[face][(int)t]; }
    std::vector<int> qpu_loads() const;
};

// argmin over odd k in [3, d-2] of |n(k) - n(d)/4|, ties to the smaller k.
int choose_inner_distance(int d);

// Four-way split: a centered distance-d' subpatch goes to QPU 0, the rest is
// carved into three wedges by weight-balanced Voronoi growth from the outer
// corners. Ancillas follow the data-qubit majority of their face; exact ties
// are broken uniformly with `seed`. Deterministic given (lattice, seed).
Partition partition_lattice(const ColorCodeLattice& lat, uint64_t seed);

// Everything on QPU 0; no seam checks.
Partition monolithic_partition(const ColorCodeLattice& lat);

// Recompute ancilla QPUs / remote pair counts for an existing data split.
void place_ancillas(const ColorCodeLattice& lat, Partition& part, uint64_t seed);

// (bulk checks, seam checks) in (face, Z-before-X) order.
std::pair<std::vector<CheckRef>, std::vector<CheckRef>> classify_checks(const Partition& part);

// dump_lattice plus:
//   P <qubit> <qpu>
//   A <face> <Z|X> <qpu> <remote_pairs>
std::string dump_partition(const ColorCodeLattice& lat, const Partition& part);

}  // namespace seamsim
