#include "seamsim/memory_circuit.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace seamsim {

namespace {

struct MeasRec {
    int round;
    uint32_t idx;
};

} // namespace

CircuitIR build_memory_circuit(const ColorCodeLattice& lat, const Partition& part,
                               const RoundPlan& plan, const NoiseParams& noise, int T,
                               RoundLayout* layout) {
    noise.validate();
    if (T < 1) throw std::invalid_argument("compile-error: T must be >= 1");
    if (static_cast<int>(plan.measure_seam.size()) != T + 1)
        throw std::invalid_argument("compile-error: plan length must be T+1");
    if (!plan.measure_seam[0])
        throw std::invalid_argument("compile-error: round 0 must measure the seam");
    const size_t n_data = lat.num_qubits();
    const size_t n_faces = lat.num_faces();
    if (part.qpu_of_data.size() != n_data || part.qpu_of_ancilla.size() != n_faces ||
        part.remote_pairs.size() != n_faces)
        throw std::invalid_argument("compile-error: partition does not match lattice");

    CircuitIR c;
    c.num_qubits = static_cast<uint32_t>(n_data + 2 * n_faces);

    int seam_remote_total = 0;
    for (size_t f = 0; f < n_faces; ++f)
        for (int s = 0; s < 2; ++s)
            if (part.seam[f][s]) seam_remote_total += part.remote_pairs[f][s];

    const double p = noise.p;
    auto dep1 = [&](Instruction& ins) {
        if (p > 0.0) ins.noise = {NoiseKind::Dep1, noise.p_1q(), 0, 0, 0};
    };
    auto dep2 = [&](Instruction& ins, bool spanning) {
        if (p > 0.0)
            ins.noise = {NoiseKind::Dep2, spanning ? noise.p_2q_seam() : noise.p_2q_bulk(), 0, 0, 0};
    };
    auto flip = [&](Instruction& ins) {
        if (p > 0.0) ins.noise = {NoiseKind::Flip, noise.p_m(), 0, 0, 0};
    };

    std::vector<uint32_t> all_data(n_data);
    for (size_t q = 0; q < n_data; ++q) all_data[q] = static_cast<uint32_t>(q);

    // rec[face][type]: (round, measurement index) of each measured round.
    std::vector<std::array<std::vector<MeasRec>, 2>> rec(n_faces);
    uint32_t m_count = 0;
    if (layout) layout->rounds.assign(static_cast<size_t>(T) + 1, {});

    c.instructions.push_back({Gate::R, all_data, {}});

    for (int t = 0; t <= T; ++t) {
        const bool seam_round = plan.measure_seam[static_cast<size_t>(t)];
        const int n_remote = seam_round ? seam_remote_total : 0;
        const double dt = round_idle_time_s(n_remote, noise);
        if (layout) {
            layout->rounds[static_cast<size_t>(t)].n_remote = n_remote;
            layout->rounds[static_cast<size_t>(t)].dt_idle_s = dt;
        }
        if (t >= 1) {
            // p == 0 selects the noiseless reference circuit: no idle
            // twirl either, even though T1/T2 dephasing is p-independent.
            Instruction idle{Gate::IDLE, all_data, {}};
            const PauliChannel1 probs = idle_pauli_probs(dt, noise.t1_s, noise.t2_s);
            if (p > 0.0 && (probs.px > 0.0 || probs.py > 0.0 || probs.pz > 0.0))
                idle.noise = {NoiseKind::Pauli1, 0, probs.px, probs.py, probs.pz};
            c.instructions.push_back(std::move(idle));
        }
        for (int s = 0; s < 2; ++s) {
            const CheckType type = s == 0 ? CheckType::Z : CheckType::X;
            for (size_t f = 0; f < n_faces; ++f) {
                if (part.seam[f][s] && !seam_round) continue;
                const uint32_t anc = ancilla_id(lat, static_cast<int>(f), type);
                const int anc_qpu = part.qpu_of_ancilla[f][s];
                c.instructions.push_back({Gate::R, {anc}, {}});
                if (type == CheckType::X) {
                    Instruction h{Gate::H, {anc}, {}};
                    dep1(h);
                    c.instructions.push_back(std::move(h));
                }
                for (int q : lat.faces[f].qubits) {
                    const bool spanning = part.qpu_of_data[static_cast<size_t>(q)] != anc_qpu;
                    Instruction cx{Gate::CX, {}, {}};
                    if (type == CheckType::Z)
                        cx.targets = {static_cast<uint32_t>(q), anc};
                    else
                        cx.targets = {anc, static_cast<uint32_t>(q)};
                    dep2(cx, spanning);
                    c.instructions.push_back(std::move(cx));
                }
                if (type == CheckType::X) {
                    Instruction h{Gate::H, {anc}, {}};
                    dep1(h);
                    c.instructions.push_back(std::move(h));
                }
                Instruction mz{Gate::MZ, {anc}, {}};
                flip(mz);
                c.instructions.push_back(std::move(mz));
                rec[f][s].push_back({t, m_count++});
                if (layout)
                    layout->rounds[static_cast<size_t>(t)].scheduled.push_back(
                        {static_cast<int>(f), type});
            }
        }
    }

    c.instructions.push_back({Gate::MZ, all_data, {}});
    const uint32_t final_base = m_count;

    for (size_t f = 0; f < n_faces; ++f) {
        c.detectors.push_back({rec[f][0][0].idx});
        c.detector_meta.push_back({static_cast<int32_t>(f),
                                   static_cast<int32_t>(lat.faces[f].color), 0, 0});
    }
    std::array<std::vector<size_t>, 2> cursor;
    cursor[0].assign(n_faces, 1);
    cursor[1].assign(n_faces, 1);
    for (int t = 1; t <= T; ++t) {
        for (int s = 0; s < 2; ++s) {
            for (size_t f = 0; f < n_faces; ++f) {
                size_t& k = cursor[static_cast<size_t>(s)][f];
                if (k < rec[f][s].size() && rec[f][s][k].round == t) {
                    c.detectors.push_back({rec[f][s][k - 1].idx, rec[f][s][k].idx});
                    c.detector_meta.push_back({static_cast<int32_t>(f),
                                               static_cast<int32_t>(lat.faces[f].color), s,
                                               t});
                    ++k;
                }
            }
        }
    }
    for (size_t f = 0; f < n_faces; ++f) {
        std::vector<uint32_t> det{rec[f][0].back().idx};
        std::vector<int> qs = lat.faces[f].qubits;
        std::sort(qs.begin(), qs.end());
        for (int q : qs) det.push_back(final_base + static_cast<uint32_t>(q));
        c.detectors.push_back(std::move(det));
        c.detector_meta.push_back({static_cast<int32_t>(f),
                                   static_cast<int32_t>(lat.faces[f].color), 0, T + 1});
    }

    for (int q : lat.logical_z_support)
        c.observable.push_back(final_base + static_cast<uint32_t>(q));

    validate_circuit(c);
    return c;
}

} // namespace seamsim
