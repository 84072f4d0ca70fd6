#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "seamsim/decoder.hpp"
#include "seamsim/dem.hpp"
#include "seamsim/experiment.hpp"
#include "seamsim/matching.hpp"
#include "seamsim/memory_circuit.hpp"
#include "seamsim/partition.hpp"
#include "seamsim/schedule.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace seamsim;

namespace {

std::vector<uint8_t> events_of(const DetectorErrorModel& dem,
                               const std::vector<const Mechanism*>& faults) {
    std::vector<uint8_t> ev(dem.detector_count, 0);
    for (const auto* m : faults)
        for (uint32_t d : m->detectors) ev[d] ^= 1;
    return ev;
}

DetectorErrorModel full_circuit_dem(int d) {
    ExperimentConfig cfg;
    PointSpec pt{d, d >= 5 ? "ma" : "mono", 1e-3, 2e6};
    auto c = build_point_circuit(cfg, pt);
    return extract_dem(c);
}

// Brute-force maximum-weight matching by recursion over the lowest
// unmatched vertex, used as the reference for the blossom code.
struct BruteResult {
    int cardinality = -1;
    int64_t weight = 0;
};

void brute(int n, const std::vector<std::vector<int64_t>>& w, std::vector<int>& mate, int from,
           BruteResult& best, bool max_cardinality, int card, int64_t sum) {
    int u = from;
    while (u < n && mate[u] >= 0) ++u;
    if (u >= n) {
        bool better;
        if (max_cardinality)
            better = card > best.cardinality ||
                     (card == best.cardinality && sum > best.weight);
        else
            better = best.cardinality < 0 || sum > best.weight;
        if (better) best = {card, sum};
        return;
    }
    mate[u] = u;  // leave u unmatched
    brute(n, w, mate, u + 1, best, max_cardinality, card, sum);
    mate[u] = -1;
    for (int v = u + 1; v < n; ++v) {
        if (mate[v] >= 0 || w[u][v] == INT64_MIN) continue;
        mate[u] = v;
        mate[v] = u;
        brute(n, w, mate, u + 1, best, max_cardinality, card + 1, sum + w[u][v]);
        mate[u] = mate[v] = -1;
    }
}

}  // namespace

TEST_CASE("blossom matching agrees with brute force") {
    std::mt19937 rng(20260814);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 2 + (int)(rng() % 7);  // 2..8 nodes
        std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, INT64_MIN));
        std::vector<MatchEdge> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                if (rng() % 3 == 0) continue;  // sparse
                int64_t weight = (int64_t)(rng() % 41) - 10;
                w[u][v] = w[v][u] = weight;
                edges.push_back({u, v, weight});
            }
        bool max_card = trial % 2 == 0;
        auto mate = max_weight_matching(n, edges, max_card);
        REQUIRE((int)mate.size() == n);
        int64_t got_w = 0;
        int got_card = 0;
        for (int u = 0; u < n; ++u) {
            if (mate[u] < 0) continue;
            CHECK(mate[mate[u]] == u);
            if (mate[u] > u) {
                REQUIRE(w[u][mate[u]] != INT64_MIN);
                got_w += w[u][mate[u]];
                ++got_card;
            }
        }
        std::vector<int> scratch(n, -1);
        BruteResult best;
        brute(n, w, scratch, 0, best, max_card, 0, 0);
        CAPTURE(trial);
        CAPTURE(n);
        if (max_card) {
            CHECK(got_card == best.cardinality);
            CHECK(got_w == best.weight);
        } else {
            CHECK(got_w == best.weight);
        }
    }
}

TEST_CASE("perfect matching on padded graphs") {
    // Complete K4 with known optimum 1+2=3 via (0-1)+(2-3).
    std::vector<MatchEdge> edges = {{0, 1, 1}, {0, 2, 5}, {0, 3, 5},
                                    {1, 2, 9}, {1, 3, 5}, {2, 3, 2}};
    auto mate = min_weight_perfect_matching(4, edges);
    CHECK(mate[0] == 1);
    CHECK(mate[2] == 3);
    // No perfect matching on an odd component.
    CHECK_THROWS_AS(min_weight_perfect_matching(2, {}), std::runtime_error);
}

TEST_CASE("mechanism extraction basics") {
    // A noiseless circuit yields no mechanisms.
    NoiseParams np;
    np.p = 0.0;
    auto lat = build_lattice(3);
    auto plan = plan_rounds(parse_policy("ma"), 3, 3, np.egr_hz);
    auto c = build_memory_circuit(lat, monolithic_partition(lat), plan, np, 3);
    auto dem = extract_dem(c);
    CHECK(dem.mechanisms.empty());
    CHECK(dem.detector_count == c.detectors.size());

    // A measurement flip fires exactly the two adjacent time-like
    // detectors of its column.
    CircuitIR probe;
    probe.num_qubits = 1;
    probe.instructions.push_back({Gate::R, {0}, {}});
    probe.instructions.push_back({Gate::MZ, {0}, {NoiseKind::Flip, 0.01, 0, 0, 0}});
    probe.instructions.push_back({Gate::R, {0}, {}});
    probe.instructions.push_back({Gate::MZ, {0}, {}});
    probe.detectors.push_back({0});
    probe.detector_meta.push_back({});
    probe.detectors.push_back({0, 1});
    probe.detector_meta.push_back({});
    validate_circuit(probe);
    auto pd = extract_dem(probe);
    REQUIRE(pd.mechanisms.size() == 1);
    CHECK(pd.mechanisms[0].p == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(pd.mechanisms[0].detectors == std::vector<uint32_t>{0, 1});
    CHECK_FALSE(pd.mechanisms[0].flips_observable);
}

TEST_CASE("full-circuit DEM census") {
    auto dem = full_circuit_dem(3);
    CHECK(dem.detector_count == 24);
    CHECK(dem.mechanisms.size() == 397);  // golden, pinned
    CHECK(dem.merged);
    std::set<std::pair<std::vector<uint32_t>, bool>> sigs;
    for (const auto& m : dem.mechanisms) {
        CHECK(m.p > 0.0);
        CHECK(m.p < 1.0);
        CHECK((!m.detectors.empty() || m.flips_observable));
        CHECK(std::is_sorted(m.detectors.begin(), m.detectors.end()));
        CHECK(m.detectors.size() <= 6);
        CHECK(sigs.insert({m.detectors, m.flips_observable}).second);
    }
    for (const auto& meta : dem.detector_meta) CHECK(meta.tagged());
}

TEST_CASE("decoder trivia") {
    auto dem = full_circuit_dem(3);
    RestrictionDecoder dec(dem);
    CHECK(dec.detector_count() == dem.detector_count);

    std::vector<uint8_t> zero(dem.detector_count, 0);
    auto r = dec.decode(zero);
    CHECK_FALSE(r.predicted_flip);
    CHECK(r.weight == 0.0);

    // decode and decode_sparse agree, and decoding is a pure function.
    std::mt19937 rng(5);
    for (int t = 0; t < 50; ++t) {
        std::vector<const Mechanism*> faults;
        for (int k = 0; k < 3; ++k) faults.push_back(&dem.mechanisms[rng() % dem.mechanisms.size()]);
        auto ev = events_of(dem, faults);
        std::vector<uint32_t> fired;
        for (uint32_t d = 0; d < dem.detector_count; ++d)
            if (ev[d]) fired.push_back(d);
        auto a = dec.decode(ev);
        auto b = dec.decode_sparse(fired);
        auto c = dec.decode(ev);
        CHECK(a == b);
        CHECK(a == c);
    }

    CHECK_THROWS_AS(dec.decode(std::vector<uint8_t>(3, 0)), std::invalid_argument);

    // Untagged metadata is rejected.
    auto bare = dem;
    bare.detector_meta.assign(bare.detector_count, DetectorMeta{});
    CHECK_THROWS_AS(RestrictionDecoder{bare}, std::invalid_argument);
}

TEST_CASE("single-mechanism soundness at d=5") {
    // Split measure-all circuit at the default 50 MHz entanglement rate.
    // (Far below that rate the per-round idle channel saturates and the
    // likeliest cause of a rare mechanism's syndrome is legitimately a
    // different fault set, so self-explanation is the wrong yardstick.)
    ExperimentConfig cfg;
    auto c = build_point_circuit(cfg, {5, "ma", 1e-3, 5e7});
    auto dem = extract_dem(c);
    RestrictionDecoder dec(dem);
    int misses = 0;
    for (const auto& m : dem.mechanisms) {
        auto ev = events_of(dem, {&m});
        auto r = dec.decode(ev);
        if (r.predicted_flip != m.flips_observable) ++misses;
    }
    CHECK(misses == 0);

    // The monolithic build is clean as well.
    auto mono = extract_dem(build_point_circuit(cfg, {5, "mono", 1e-3, 2e6}));
    RestrictionDecoder mdec(mono);
    misses = 0;
    for (const auto& m : mono.mechanisms) {
        auto ev = events_of(mono, {&m});
        if (mdec.decode(ev).predicted_flip != m.flips_observable) ++misses;
    }
    CHECK(misses == 0);
}

TEST_CASE("d=3 residual misses are exactly the contested degeneracies") {
    // At d=3 with bare ancillas, several single faults with opposite
    // observable action share a z-signature; any decoder must pick the
    // likelier side and miss the minority. Verify the decoder misses
    // nothing else.
    auto dem = full_circuit_dem(3);
    RestrictionDecoder dec(dem);

    std::map<std::vector<uint32_t>, std::array<double, 2>> mass;
    for (const auto& m : dem.mechanisms) {
        std::vector<uint32_t> z;
        for (uint32_t d : m.detectors)
            if (dem.detector_meta[d].x_type == 0) z.push_back(d);
        auto& pr = mass[z];
        double& slot = pr[m.flips_observable ? 1 : 0];
        slot = slot * (1.0 - m.p) + m.p * (1.0 - slot);
    }

    int misses = 0, minority_misses = 0;
    for (const auto& m : dem.mechanisms) {
        auto ev = events_of(dem, {&m});
        auto r = dec.decode(ev);
        if (r.predicted_flip == m.flips_observable) continue;
        ++misses;
        std::vector<uint32_t> z;
        for (uint32_t d : m.detectors)
            if (dem.detector_meta[d].x_type == 0) z.push_back(d);
        const auto& pr = mass.at(z);
        bool contested = pr[0] > 0.0 && pr[1] > 0.0;
        bool minority = pr[m.flips_observable ? 1 : 0] < pr[m.flips_observable ? 0 : 1];
        if (contested && minority) ++minority_misses;
    }
    CHECK(misses == minority_misses);
    CHECK(misses == 46);  // golden, pinned
}

TEST_CASE("bounded ML reference") {
    auto dem = full_circuit_dem(3);

    std::vector<uint8_t> zero(dem.detector_count, 0);
    auto r0 = decode_bounded_ml(dem, zero, 2);
    CHECK_FALSE(r0.predicted_flip);
    CHECK_FALSE(r0.best_effort);
    CHECK(r0.weight == 0.0);

    // Every single mechanism is its own maximum-likelihood explanation
    // up to z-signature degeneracy: the prediction must match the
    // majority side of its signature class.
    std::mt19937 rng(11);
    int checked = 0, agree = 0;
    for (int t = 0; t < 60; ++t) {
        const auto& m = dem.mechanisms[rng() % dem.mechanisms.size()];
        auto ev = events_of(dem, {&m});
        auto ml = decode_bounded_ml(dem, ev, 1);
        CHECK_FALSE(ml.best_effort);
        auto rd = decode_restriction_mwpm(dem, ev);
        ++checked;
        if (ml.predicted_flip == rd.predicted_flip) ++agree;
    }
    // The bounded-ML reference sees the x sector, the restriction decoder
    // deliberately marginalizes it; the d=3 hook degeneracies cap the
    // agreement below 100%. Measured 50/60 with this seed.
    CHECK(agree * 100 >= checked * 80);

    // Weight-2 injections against the w_max=2 reference.
    checked = agree = 0;
    for (int t = 0; t < 40; ++t) {
        std::vector<const Mechanism*> faults = {
            &dem.mechanisms[rng() % dem.mechanisms.size()],
            &dem.mechanisms[rng() % dem.mechanisms.size()]};
        auto ev = events_of(dem, faults);
        auto ml = decode_bounded_ml(dem, ev, 2);
        if (ml.best_effort) continue;
        auto rd = decode_restriction_mwpm(dem, ev);
        ++checked;
        if (ml.predicted_flip == rd.predicted_flip) ++agree;
    }
    REQUIRE(checked >= 30);
    // Measured 30/40 with this seed; see the weight-1 note above.
    CHECK(agree * 100 >= checked * 70);

    // An event pattern no <=1 fault set explains is flagged best-effort.
    std::set<std::vector<uint32_t>> singles;
    for (const auto& m : dem.mechanisms) singles.insert(m.detectors);
    bool tested = false;
    for (size_t i = 0; i < dem.mechanisms.size() && !tested; ++i)
        for (size_t j = i + 1; j < dem.mechanisms.size() && !tested; ++j) {
            auto ev = events_of(dem, {&dem.mechanisms[i], &dem.mechanisms[j]});
            std::vector<uint32_t> fired;
            for (uint32_t d = 0; d < dem.detector_count; ++d)
                if (ev[d]) fired.push_back(d);
            if (fired.empty() || singles.count(fired)) continue;
            auto be = decode_bounded_ml(dem, ev, 1);
            CHECK(be.best_effort);
            tested = true;
        }
    CHECK(tested);
}

TEST_CASE("code-capacity correction at d=3") {
    // One noiseless extraction block plus independent single-qubit data
    // depolarization: every weight-1 error must be corrected.
    auto lat = build_lattice(3);
    NoiseParams np;
    np.p = 0.0;
    auto plan = plan_rounds(parse_policy("ma"), 3, 1, np.egr_hz);
    auto c = build_memory_circuit(lat, monolithic_partition(lat), plan, np, 1);
    std::vector<uint32_t> all_data(lat.num_qubits());
    std::iota(all_data.begin(), all_data.end(), 0);
    Instruction dep{Gate::IDLE, all_data, {NoiseKind::Pauli1, 0, 1e-3 / 3, 1e-3 / 3, 1e-3 / 3}};
    c.instructions.insert(c.instructions.begin() + 1, dep);
    validate_circuit(c);

    auto dem = extract_dem(c);
    RestrictionDecoder dec(dem);
    int misses = 0;
    for (const auto& m : dem.mechanisms) {
        auto ev = events_of(dem, {&m});
        if (dec.decode(ev).predicted_flip != m.flips_observable) ++misses;
    }
    CHECK(misses == 0);
}

TEST_CASE("cluster search handles adjacent fault pairs") {
    auto dem = full_circuit_dem(5);
    RestrictionDecoder dec(dem);

    // Pairs of mechanisms sharing a detector force merged clusters.
    int checked = 0, wrong = 0;
    for (size_t i = 0; i < dem.mechanisms.size() && checked < 400; i += 17) {
        const auto& a = dem.mechanisms[i];
        if (a.detectors.empty()) continue;
        for (size_t j = i + 1; j < dem.mechanisms.size() && checked < 400; j += 29) {
            const auto& b = dem.mechanisms[j];
            bool share = false;
            for (uint32_t d : b.detectors)
                share |= std::binary_search(a.detectors.begin(), a.detectors.end(), d);
            if (!share) continue;
            auto ev = events_of(dem, {&a, &b});
            auto r = dec.decode(ev);
            ++checked;
            if (r.predicted_flip != (a.flips_observable ^ b.flips_observable)) ++wrong;
        }
    }
    REQUIRE(checked >= 100);
    // Not a soundness bound: adjacent weight-2 circuit faults concentrate
    // the hard cases (an exact full-signature reference still misses 11 of
    // these 400). Measured 72/400; the pin guards the cluster merge logic.
    CHECK(wrong * 100 <= checked * 25);
}
