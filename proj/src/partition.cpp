#include "seamsim/partition.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace seamsim {

namespace {

struct XY {
    double x, y;
};

XY embed(GridCoord g) {
    return {0.5 * g.x, 0.8660254037844386 * g.y};
}

double dist(XY a, XY b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

std::vector<int> Partition::qpu_loads() const {
    std::vector<int> loads(num_qpus, 0);
    for (int q : qpu_of_data) loads[q]++;
    return loads;
}

int choose_inner_distance(int d) {
    if (d < 5 || d % 2 == 0) {
        throw std::invalid_argument("invalid-distance: partition needs odd d >= 5, got " +
                                    std::to_string(d));
    }
    double target = data_qubit_count(d) / 4.0;
    int best_k = -1;
    double best_v = 0.0;
    for (int k = 3; k <= d - 2; k += 2) {
        double v = std::abs(data_qubit_count(k) - target);
        if (best_k < 0 || v < best_v) {
            best_k = k;
            best_v = v;
        }
    }
    return best_k;
}

void place_ancillas(const ColorCodeLattice& lat, Partition& part, uint64_t seed) {
    std::mt19937_64 rng(seed);
    part.qpu_of_ancilla.assign(lat.num_faces(), {0, 0});
    part.remote_pairs.assign(lat.num_faces(), {0, 0});
    part.seam.assign(lat.num_faces(), {false, false});
    for (const Face& f : lat.faces) {
        for (int t = 0; t < 2; ++t) {
            std::vector<int> count(part.num_qpus, 0);
            for (int q : f.qubits) count[part.qpu_of_data[q]]++;
            int best = *std::max_element(count.begin(), count.end());
            std::vector<int> tied;
            for (int u = 0; u < part.num_qpus; ++u) {
                if (count[u] == best) tied.push_back(u);
            }
            int qpu = tied.size() == 1
                          ? tied[0]
                          : tied[std::uniform_int_distribution<size_t>(0, tied.size() - 1)(rng)];
            part.qpu_of_ancilla[f.id][t] = qpu;
            int remote = (int)f.qubits.size() - count[qpu];
            part.remote_pairs[f.id][t] = remote;
            part.seam[f.id][t] = remote > 0;
        }
    }
}

std::pair<std::vector<CheckRef>, std::vector<CheckRef>> classify_checks(const Partition& part) {
    std::vector<CheckRef> bulk, seamv;
    for (int f = 0; f < (int)part.seam.size(); ++f) {
        for (int t = 0; t < 2; ++t) {
            CheckRef c{f, (CheckType)t};
            (part.seam[f][t] ? seamv : bulk).push_back(c);
        }
    }
    return {bulk, seamv};
}

Partition monolithic_partition(const ColorCodeLattice& lat) {
    Partition part;
    part.num_qpus = 1;
    part.inner_distance = lat.distance;
    part.qpu_of_data.assign(lat.num_qubits(), 0);
    place_ancillas(lat, part, 0);
    return part;
}

Partition partition_lattice(const ColorCodeLattice& lat, uint64_t seed) {
    const int d = lat.distance;
    const int L = 3 * (d - 1) / 2;
    const int dp = choose_inner_distance(d);
    const int Lp = 3 * (dp - 1) / 2;

    Partition part;
    part.num_qpus = 4;
    part.inner_distance = dp;
    part.qpu_of_data.assign(lat.num_qubits(), -1);

    // Place the inner subtriangle so its site pattern matches a standalone
    // distance-d' patch: x0 == y0 (mod 2) and (x0 - 3*y0)/2 == 0 (mod 3).
    // Among valid anchors pick the one whose centroid sits closest to the
    // patch centroid, ties to the smallest (y0, x0).
    XY big_centroid = {(embed({0, 0}).x + embed({2 * L, 0}).x + embed({L, L}).x) / 3.0,
                       (embed({0, 0}).y + embed({2 * L, 0}).y + embed({L, L}).y) / 3.0};
    int x0 = -1, y0 = -1;
    double best = 1e300;
    for (int yy = 0; yy + Lp <= L; ++yy) {
        for (int xx = yy; xx + 2 * Lp <= 2 * L - yy; ++xx) {
            if ((xx - yy) % 2 != 0) continue;
            int v = (xx - 3 * yy) / 2;
            if (((v % 3) + 3) % 3 != 0) continue;
            XY c = {(embed({xx, yy}).x + embed({xx + 2 * Lp, yy}).x + embed({xx + Lp, yy + Lp}).x) / 3.0,
                    (embed({xx, yy}).y + embed({xx + 2 * Lp, yy}).y + embed({xx + Lp, yy + Lp}).y) / 3.0};
            double v2 = dist(c, big_centroid);
            if (v2 + 1e-12 < best) {
                best = v2;
                x0 = xx;
                y0 = yy;
            }
        }
    }
    if (x0 < 0) throw std::runtime_error("partition-failure: no aligned inner patch anchor");

    int inner_count = 0;
    for (int q = 0; q < lat.num_qubits(); ++q) {
        GridCoord g = lat.data_coords[q];
        int ry = g.y - y0;
        if (ry >= 0 && ry <= Lp && g.x >= x0 + ry && g.x <= x0 + 2 * Lp - ry) {
            part.qpu_of_data[q] = 0;
            inner_count++;
        }
    }
    if (inner_count != data_qubit_count(dp)) {
        throw std::runtime_error("partition-failure: inner patch holds " +
                                 std::to_string(inner_count) + " qubits, expected " +
                                 std::to_string(data_qubit_count(dp)));
    }

    // Weighted Voronoi from the outer corners for everything else.
    const XY seeds[3] = {embed({0, 0}), embed({2 * L, 0}), embed({L, L})};
    double w[3] = {0.0, 0.0, 0.0};
    const double step = 0.05;
    const double cap = 1.5 * lat.num_qubits() / 4.0;

    std::vector<int> outer;
    for (int q = 0; q < lat.num_qubits(); ++q) {
        if (part.qpu_of_data[q] < 0) outer.push_back(q);
    }

    auto assign = [&] {
        for (int q : outer) {
            XY p = embed(lat.data_coords[q]);
            int arg = 0;
            double bestscore = 1e300;
            for (int s = 0; s < 3; ++s) {
                double score = dist(p, seeds[s]) - w[s];
                if (score < bestscore - 1e-12) {
                    bestscore = score;
                    arg = s;
                }
            }
            part.qpu_of_data[q] = 1 + arg;
        }
    };

    for (int iter = 0; iter < 1000; ++iter) {
        assign();
        std::vector<int> loads = part.qpu_loads();
        int hi = 1, lo = 1;
        for (int s = 1; s < 4; ++s) {
            if (loads[s] > loads[hi]) hi = s;
            if (loads[s] < loads[lo]) lo = s;
        }
        bool balanced = loads[hi] - loads[lo] <= 2;
        bool capped = *std::max_element(loads.begin(), loads.end()) <= cap;
        if (balanced && capped) break;
        w[lo - 1] += step;
        if (iter == 999) {
            throw std::runtime_error("partition-failure: Voronoi balancing did not converge");
        }
    }
    std::vector<int> final_loads = part.qpu_loads();
    if (*std::max_element(final_loads.begin(), final_loads.end()) > cap) {
        throw std::runtime_error("partition-failure: load cap exceeded");
    }

    place_ancillas(lat, part, seed);
    return part;
}

std::string dump_partition(const ColorCodeLattice& lat, const Partition& part) {
    std::ostringstream os;
    os << dump_lattice(lat);
    for (int q = 0; q < lat.num_qubits(); ++q) {
        os << "P " << q << ' ' << part.qpu_of_data[q] << '\n';
    }
    for (const Face& f : lat.faces) {
        for (int t = 0; t < 2; ++t) {
            os << "A " << f.id << ' ' << (t == 0 ? 'Z' : 'X') << ' '
               << part.qpu_of_ancilla[f.id][t] << ' ' << part.remote_pairs[f.id][t] << '\n';
        }
    }
    return os.str();
}

}  // namespace seamsim
