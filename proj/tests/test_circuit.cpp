#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "seamsim/circuit.hpp"
#include "seamsim/lattice.hpp"
#include "seamsim/memory_circuit.hpp"
#include "seamsim/noise.hpp"
#include "seamsim/partition.hpp"
#include "seamsim/schedule.hpp"
#include "seamsim/tableau.hpp"

#include <map>
#include <set>
#include <string>

using namespace seamsim;

namespace {

CircuitIR compile(int d, int T, const std::string& policy, const NoiseParams& np,
                  bool partitioned, RoundLayout* layout = nullptr) {
    auto lat = build_lattice(d);
    auto part = partitioned ? partition_lattice(lat, 1) : monolithic_partition(lat);
    auto plan = plan_rounds(parse_policy(policy), d, T, np.egr_hz);
    return build_memory_circuit(lat, part, plan, np, T, layout);
}

}  // namespace

TEST_CASE("validate rejects malformed circuits") {
    CircuitIR c;
    c.num_qubits = 2;
    c.instructions.push_back({Gate::R, {0, 1}, {}});
    c.instructions.push_back({Gate::MZ, {0}, {}});
    c.detectors.push_back({0});
    c.detector_meta.push_back({});
    CHECK_NOTHROW(validate_circuit(c));

    auto bad = c;
    bad.instructions[0].targets = {0, 2};  // qubit out of range
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.instructions.insert(bad.instructions.begin(), {Gate::CX, {0, 1, 0}, {}});
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.instructions[0].noise = {NoiseKind::Dep2, 0.01, 0, 0, 0};  // 2q noise on R
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.instructions[0].noise = {NoiseKind::Flip, 0.01, 0, 0, 0};  // flip on a non-measurement
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.detectors.push_back({5});  // measurement index out of range
    bad.detector_meta.push_back({});
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.observable = {1};
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.detector_meta.clear();  // meta must stay sized to detectors
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);

    bad = c;
    bad.instructions[0].noise = {NoiseKind::Dep1, 1.5, 0, 0, 0};  // p out of range
    CHECK_THROWS_AS(validate_circuit(bad), std::invalid_argument);
}

TEST_CASE("serialize/parse round-trips exactly") {
    CircuitIR c;
    c.num_qubits = 3;
    c.instructions.push_back({Gate::R, {0, 1, 2}, {}});
    c.instructions.push_back({Gate::H, {0}, {NoiseKind::Dep1, 0.001, 0, 0, 0}});
    c.instructions.push_back({Gate::CX, {0, 1}, {NoiseKind::Dep2, 0.01, 0, 0, 0}});
    c.instructions.push_back(
        {Gate::IDLE, {0, 1, 2}, {NoiseKind::Pauli1, 0.0, 0.0024875415627079866, 0.25, 1e-300}});
    c.instructions.push_back({Gate::MZ, {1, 2}, {NoiseKind::Flip, 0.001, 0, 0, 0}});
    c.detectors.push_back({0});
    c.detector_meta.push_back({3, 1, 0, 2});
    c.detectors.push_back({0, 1});
    c.detector_meta.push_back({});  // untagged
    c.observable = {1};
    validate_circuit(c);

    auto text = serialize(c);
    auto back = parse(text);
    CHECK(back == c);
    CHECK(serialize(back) == text);

    // Compiled circuits round-trip too, including meta tags.
    NoiseParams np;
    np.p = 1e-3;
    np.egr_hz = 2e6;
    for (bool partitioned : {false, true}) {
        auto full = compile(5, 5, "ss:2", np, partitioned);
        auto again = parse(serialize(full));
        CHECK(again == full);
    }
}

TEST_CASE("parse reports the failing line") {
    const std::string head = "SEAMSIM 1\nQUBITS 2\n";
    CHECK_THROWS_AS(parse(head + "R 0\nBOGUS 1\n"), std::runtime_error);
    try {
        parse(head + "R 0\nBOGUS 1\n");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).rfind("parse-error: line 4:", 0) == 0);
    }
    // Missing header fails on line 1.
    try {
        parse("R 0\n");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).rfind("parse-error: line 1:", 0) == 0);
    }
    // Grammatically fine but semantically broken input is caught by the
    // validation pass that parse() runs at the end.
    CHECK_THROWS_AS(parse(head + "CX 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse(head + "MZ 0 !DEP9 0.1\n"), std::runtime_error);
}

TEST_CASE("compiled memory circuits are deterministic detectors-wise") {
    NoiseParams np;
    np.p = 1e-3;
    for (int d : {3, 5}) {
        for (double egr : {2e6, 5e7}) {
            np.egr_hz = egr;
            for (const char* pol : {"ma", "ss:2", "ast:5e7"}) {
                CAPTURE(d);
                CAPTURE(egr);
                CAPTURE(pol);
                auto c = compile(d, d, pol, np, d >= 5);
                std::string why;
                CHECK_MESSAGE(check_deterministic(c, &why), why);
            }
        }
    }
}

TEST_CASE("a corrupted detector is caught") {
    NoiseParams np;
    np.p = 1e-3;
    np.egr_hz = 2e6;
    auto c = compile(3, 3, "ma", np, false);
    REQUIRE(!c.detectors.empty());
    std::string why;
    CHECK(check_deterministic(c, &why));
    // Truncate an X-check comparison detector to a single measurement. A
    // lone X-ancilla readout is a coin flip in the noiseless circuit, so
    // the check must flag it.
    size_t victim = c.detectors.size();
    for (size_t i = 0; i < c.detectors.size(); ++i) {
        if (c.detector_meta[i].x_type == 1 && c.detectors[i].size() >= 2) {
            victim = i;
            break;
        }
    }
    REQUIRE(victim < c.detectors.size());
    auto bad = c;
    bad.detectors[victim].resize(1);
    CHECK_FALSE(check_deterministic(bad, &why));
    CHECK(!why.empty());
}

TEST_CASE("ss:1 compiles byte-identically to ma") {
    NoiseParams np;
    np.p = 1e-3;
    for (double egr : {2e6, 2e8}) {
        np.egr_hz = egr;
        auto a = compile(5, 5, "ma", np, true);
        auto b = compile(5, 5, "ss:1", np, true);
        CHECK(serialize(a) == serialize(b));
    }
}

TEST_CASE("p=0 compiles the noiseless reference circuit") {
    NoiseParams np;
    np.p = 0.0;
    np.egr_hz = 2e6;
    auto c = compile(5, 5, "ma", np, true);
    for (const auto& ins : c.instructions) CHECK(ins.noise.kind == NoiseKind::None);
    std::string why;
    CHECK(check_deterministic(c, &why));
}

TEST_CASE("seam CX noise is the boosted two-qubit channel") {
    NoiseParams np;
    np.p = 1e-3;
    np.egr_hz = 2e6;

    auto lat = build_lattice(5);
    auto part = partition_lattice(lat, 1);
    auto plan = plan_rounds(parse_policy("ma"), 5, 5, np.egr_hz);
    RoundLayout layout;
    auto c = build_memory_circuit(lat, part, plan, np, 5, &layout);

    // Count CX pairs carrying the seam rate; each spanning pair of every
    // scheduled seam check contributes exactly one.
    int seam_pairs = 0, bulk_pairs = 0;
    for (const auto& ins : c.instructions) {
        if (ins.gate != Gate::CX) continue;
        REQUIRE(ins.noise.kind == NoiseKind::Dep2);
        if (ins.noise.p == np.p_2q_seam())
            seam_pairs += (int)ins.targets.size() / 2;
        else if (ins.noise.p == np.p_2q_bulk())
            bulk_pairs += (int)ins.targets.size() / 2;
        else
            FAIL("unexpected CX noise rate");
    }
    int expect_seam = 0, expect_bulk = 0;
    for (const auto& r : layout.rounds)
        for (const auto& chk : r.scheduled) {
            int rp = part.remote_pairs_of(chk.face, chk.type);
            expect_seam += rp;
            expect_bulk += lat.faces[chk.face].weight() - rp;
        }
    CHECK(seam_pairs == expect_seam);
    CHECK(bulk_pairs == expect_bulk);
    CHECK(seam_pairs > 0);

    // Monolithic compilation of the same experiment has no boosted pairs
    // and every round idles for exactly the readout time.
    RoundLayout mono_layout;
    auto mono = build_memory_circuit(lat, monolithic_partition(lat), plan, np, 5, &mono_layout);
    for (const auto& ins : mono.instructions)
        if (ins.gate == Gate::CX) CHECK(ins.noise.p == np.p_2q_bulk());
    for (const auto& r : mono_layout.rounds) {
        CHECK(r.n_remote == 0);
        CHECK(r.dt_idle_s == doctest::Approx(np.t_ro_s).epsilon(1e-12));
    }
}

TEST_CASE("skip rounds consume no Bell pairs") {
    NoiseParams np;
    np.p = 1e-3;
    np.egr_hz = 2e6;
    auto lat = build_lattice(5);
    auto part = partition_lattice(lat, 1);
    auto plan = plan_rounds(parse_policy("ss:2"), 5, 5, np.egr_hz);
    RoundLayout layout;
    build_memory_circuit(lat, part, plan, np, 5, &layout);
    REQUIRE(layout.rounds.size() == 6);
    for (int t = 0; t <= 5; ++t) {
        CAPTURE(t);
        if (t % 2 == 0) {
            CHECK(layout.rounds[t].n_remote > 0);
            CHECK(layout.rounds[t].dt_idle_s > np.t_ro_s);
        } else {
            CHECK(layout.rounds[t].n_remote == 0);
            CHECK(layout.rounds[t].dt_idle_s == doctest::Approx(np.t_ro_s).epsilon(1e-12));
            // Seam ancillas are not touched in skipped rounds.
            for (const auto& chk : layout.rounds[t].scheduled)
                CHECK_FALSE(part.is_seam(chk.face, chk.type));
        }
    }
    // The idle interval matches the wait model recomputed from the layout.
    for (const auto& r : layout.rounds)
        CHECK(r.dt_idle_s == doctest::Approx(round_idle_time_s(r.n_remote, np)).epsilon(1e-12));
}

TEST_CASE("detector layer census under ss:2") {
    NoiseParams np;
    np.p = 1e-3;
    np.egr_hz = 2e6;

    // d=5 with this partition: every check is a seam check, so each face
    // has the thinned Z column (init + two pairs + final = 4) and two
    // X pairs. Golden counts pinned from the first compilation.
    {
        auto c = compile(5, 5, "ss:2", np, true);
        std::map<std::pair<int, int>, int> layers;
        for (const auto& m : c.detector_meta) {
            REQUIRE(m.tagged());
            ++layers[{m.face, m.x_type}];
        }
        for (int f = 0; f < 9; ++f) {
            CAPTURE(f);
            CHECK(layers[{f, 0}] == 4);
            CHECK(layers[{f, 1}] == 2);
        }
        CHECK(c.detectors.size() == 54);
    }

    // d=9 mixes bulk and seam: bulk Z columns keep all T+2 layers, seam
    // Z columns thin to 4, X likewise 5 vs 2.
    {
        auto lat = build_lattice(9);
        auto part = partition_lattice(lat, 1);
        auto plan = plan_rounds(parse_policy("ss:2"), 9, 5, np.egr_hz);
        auto c = build_memory_circuit(lat, part, plan, np, 5);
        std::map<std::pair<int, int>, int> layers;
        for (const auto& m : c.detector_meta) ++layers[{m.face, m.x_type}];
        for (const auto& f : lat.faces) {
            CAPTURE(f.id);
            CHECK(layers[{f.id, 0}] == (part.is_seam(f.id, CheckType::Z) ? 4 : 7));
            CHECK(layers[{f.id, 1}] == (part.is_seam(f.id, CheckType::X) ? 2 : 5));
        }
        CHECK(c.detectors.size() == 258);
    }
}

TEST_CASE("ancilla numbering") {
    auto lat = build_lattice(3);
    CHECK(ancilla_id(lat, 0, CheckType::Z) == 7);
    CHECK(ancilla_id(lat, 0, CheckType::X) == 8);
    CHECK(ancilla_id(lat, 2, CheckType::Z) == 11);
    NoiseParams np;
    np.p = 1e-3;
    auto c = compile(3, 3, "ma", np, false);
    CHECK(c.num_qubits == 7 + 2 * 3);
}
