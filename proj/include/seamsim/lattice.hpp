#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace seamsim {

// Face colors of the 6.6.6 tiling. Red faces sit in rows y % 3 == 0, which
// includes every face adjacent to the bottom boundary (the one carrying the
// logical strings).
enum class FaceColor : uint8_t { red = 0, green = 1, blue = 2 };

const char* color_name(FaceColor c);

// Integer grid coordinate. Sites live on rows y = 0..3(d-1)/2 with
// x = y, y+2, ..., 2L-y, so x == y (mod 2) always holds. The Euclidean
// embedding (x/2, y*sqrt(3)/2) makes the patch an equilateral triangle.
struct GridCoord {
    int x = 0;
    int y = 0;
    bool operator==(const GridCoord&) const = default;
};

struct Face {
    int id = -1;
    FaceColor color = FaceColor::red;
    GridCoord center;
    // Data qubit ids in CNOT time-slot order: clockwise around the center
    // starting from the member with the lowest (y, x) coordinate. Weight-4
    // faces simply use the first four slots.
    std::vector<int> qubits;
    int weight() const { return (int)qubits.size(); }
};

struct ColorCodeLattice {
    int distance = 0;
    std::vector<GridCoord> data_coords;   // index == data qubit id
    std::vector<Face> faces;
    // boundary_qubits[c] = data qubits on the boundary whose adjacent faces
    // never have color c (corners appear in two lists).
    std::array<std::vector<int>, 3> boundary_qubits;
    std::vector<int> logical_z_support;   // bottom row, weight == distance
    std::vector<int> logical_x_support;
    std::vector<std::vector<int>> faces_of_qubit;

    int num_qubits() const { return (int)data_coords.size(); }
    int num_faces() const { return (int)faces.size(); }
};

// (3d^2+1)/4 for odd d >= 3; throws std::invalid_argument otherwise.
int data_qubit_count(int distance);

// Deterministic triangular 6.6.6 patch of the given odd distance.
ColorCodeLattice build_lattice(int distance);

// Line-oriented text dump:
//   Q <id> <x> <y>
//   F <id> <color> <q0> <q1> ...
//   LZ <q0> <q1> ...
//   LX <q0> <q1> ...
std::string dump_lattice(const ColorCodeLattice& lat);

}  // namespace seamsim
