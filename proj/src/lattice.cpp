#include "seamsim/lattice.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace seamsim {

const char* color_name(FaceColor c) {
    switch (c) {
        case FaceColor::red: return "red";
        case FaceColor::green: return "green";
        case FaceColor::blue: return "blue";
    }
    return "?";
}

int data_qubit_count(int distance) {
    if (distance < 3 || distance % 2 == 0) {
        throw std::invalid_argument("invalid-distance: distance must be odd and >= 3, got " +
                                    std::to_string(distance));
    }
    return (3 * distance * distance + 1) / 4;
}

namespace {

// A site (x, y) is a face center iff ((x - 3y)/2) mod 3 == 1; the other two
// thirds of the triangular grid are data qubits. Row y holds sites
// x = y, y+2, ..., 2L-y.
bool is_center(int x, int y) {
    int v = (x - 3 * y) / 2;
    return ((v % 3) + 3) % 3 == 1;
}

bool in_patch(int x, int y, int L) {
    return y >= 0 && y <= L && x >= y && x <= 2 * L - y && ((x - y) % 2 == 0);
}

// Neighbor offsets in clockwise order (screen orientation, y up), starting
// from the bottom-left site. Faces enumerate their qubits through this list.
constexpr int kRing[6][2] = {{-1, -1}, {-2, 0}, {-1, 1}, {1, 1}, {2, 0}, {1, -1}};

}  // namespace

ColorCodeLattice build_lattice(int distance) {
    const int n_expected = data_qubit_count(distance);
    const int L = 3 * (distance - 1) / 2;

    ColorCodeLattice lat;
    lat.distance = distance;

    std::map<std::pair<int, int>, int> qubit_at;  // (y, x) -> id
    std::vector<GridCoord> centers;
    for (int y = 0; y <= L; ++y) {
        for (int x = y; x <= 2 * L - y; x += 2) {
            if (is_center(x, y)) {
                centers.push_back({x, y});
            } else {
                qubit_at[{y, x}] = (int)lat.data_coords.size();
                lat.data_coords.push_back({x, y});
            }
        }
    }
    if ((int)lat.data_coords.size() != n_expected) {
        throw std::logic_error("lattice construction produced wrong qubit count");
    }

    for (const GridCoord& c : centers) {
        Face f;
        f.id = (int)lat.faces.size();
        f.color = (FaceColor)(c.y % 3);
        f.center = c;
        // Collect members, then rotate the ring so the lowest-(y,x) member
        // comes first and keep clockwise order.
        std::array<int, 6> member{-1, -1, -1, -1, -1, -1};
        int start = -1;
        std::pair<int, int> best{INT32_MAX, INT32_MAX};
        for (int k = 0; k < 6; ++k) {
            int x = c.x + kRing[k][0];
            int y = c.y + kRing[k][1];
            if (!in_patch(x, y, L)) continue;
            auto it = qubit_at.find({y, x});
            if (it == qubit_at.end()) {
                throw std::logic_error("face neighbor is a center site");
            }
            member[k] = it->second;
            std::pair<int, int> key{y, x};
            if (key < best) {
                best = key;
                start = k;
            }
        }
        for (int k = 0; k < 6; ++k) {
            int id = member[(start + k) % 6];
            if (id >= 0) f.qubits.push_back(id);
        }
        if (f.weight() != 4 && f.weight() != 6) {
            throw std::logic_error("face weight not in {4,6}");
        }
        lat.faces.push_back(std::move(f));
    }

    lat.faces_of_qubit.assign(lat.data_coords.size(), {});
    for (const Face& f : lat.faces) {
        for (int q : f.qubits) lat.faces_of_qubit[q].push_back(f.id);
    }

    // Boundaries: bottom row y == 0 touches red+green faces only (missing
    // blue), the left side x == y misses green, the right side x == 2L-y
    // misses red.
    for (int q = 0; q < (int)lat.data_coords.size(); ++q) {
        const GridCoord& g = lat.data_coords[q];
        if (g.x == 2 * L - g.y) lat.boundary_qubits[0].push_back(q);
        if (g.x == g.y) lat.boundary_qubits[1].push_back(q);
        if (g.y == 0) lat.boundary_qubits[2].push_back(q);
    }

    lat.logical_z_support = lat.boundary_qubits[2];
    lat.logical_x_support = lat.boundary_qubits[2];
    return lat;
}

std::string dump_lattice(const ColorCodeLattice& lat) {
    std::ostringstream os;
    for (int q = 0; q < (int)lat.data_coords.size(); ++q) {
        os << "Q " << q << ' ' << lat.data_coords[q].x << ' ' << lat.data_coords[q].y << '\n';
    }
    for (const Face& f : lat.faces) {
        os << "F " << f.id << ' ' << color_name(f.color);
        for (int q : f.qubits) os << ' ' << q;
        os << '\n';
    }
    os << "LZ";
    for (int q : lat.logical_z_support) os << ' ' << q;
    os << "\nLX";
    for (int q : lat.logical_x_support) os << ' ' << q;
    os << '\n';
    return os.str();
}

}  // namespace seamsim
