#include "seamsim/decoder.hpp"

#include "seamsim/matching.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace seamsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightScale = 65536.0;

// Per-cluster maximum-likelihood search limits. Clusters beyond the
// detector cap (heavy-noise regimes) use the static fallback instead.
constexpr size_t kMLMaxDets = 12;
constexpr int kMLMaxDepth = 8;
constexpr int64_t kMLNodeBudget = 200000;
constexpr size_t kMLCacheCap = size_t{1} << 20;

int64_t scale_weight(double w) {
    int64_t s = std::llround(w * kWeightScale);
    return s < 1 ? 1 : s;
}

// Symmetric difference of two sorted var lists.
void xor_vars(std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    a = std::move(out);
}

struct EdgeRef {
    uint32_t u, v; // node ids within one graph
    uint8_t obs;
    double weight;
};

} // namespace

RestrictionDecoder::RestrictionDecoder(const DetectorErrorModel& dem) {
    detector_count_ = dem.detector_count;
    if (dem.detector_meta.size() != dem.detector_count)
        throw std::invalid_argument("invalid-dem: detector metadata size mismatch");
    for (const auto& m : dem.detector_meta)
        if (!m.tagged())
            throw std::invalid_argument("invalid-dem: decoder requires tagged detector metadata");

    for (int g = 0; g < 3; ++g) {
        auto& G = graphs_[g];
        const int drop_color = 2 - g; // {red,green}, {red,blue}, {green,blue}
        G.node_of_det.assign(detector_count_, -1);
        for (uint32_t d = 0; d < detector_count_; ++d) {
            const auto& m = dem.detector_meta[d];
            if (m.x_type != 0 || m.color == drop_color) continue;
            G.node_of_det[d] = static_cast<int32_t>(G.det_of_node.size());
            G.det_of_node.push_back(d);
        }
        G.n = static_cast<uint32_t>(G.det_of_node.size());
    }

    // Group mechanisms by z-sector signature. Opposite-observable
    // collisions within a class are true degeneracies; the class keeps
    // the majority-probability bit.
    std::map<std::vector<uint32_t>, std::array<double, 2>> zacc;
    std::vector<uint32_t> zdets;
    for (const auto& mech : dem.mechanisms) {
        zdets.clear();
        for (uint32_t d : mech.detectors)
            if (dem.detector_meta[d].x_type == 0) zdets.push_back(d);
        if (zdets.empty()) continue;
        std::sort(zdets.begin(), zdets.end());
        auto& pr = zacc[zdets];
        double& slot = pr[mech.flips_observable ? 1 : 0];
        slot = slot * (1.0 - mech.p) + mech.p * (1.0 - slot);
    }
    det_classes_.assign(detector_count_, {});
    zclasses_.reserve(zacc.size());
    for (auto& [dets, pr] : zacc) {
        double p = pr[0] * (1.0 - pr[1]) + pr[1] * (1.0 - pr[0]);
        p = std::clamp(p, 1e-300, 0.5 - 1e-12);
        ZClass c;
        c.dets = dets;
        c.obs = pr[1] > pr[0] ? uint8_t{1} : uint8_t{0};
        c.logit = std::log(p / (1.0 - p));
        zclasses_.push_back(std::move(c));
    }
    for (uint32_t ci = 0; ci < zclasses_.size(); ++ci)
        for (uint32_t d : zclasses_[ci].dets) det_classes_[d].push_back(ci);
    for (auto& lst : det_classes_)
        std::sort(lst.begin(), lst.end(), [&](uint32_t a, uint32_t b) {
            if (zclasses_[a].logit != zclasses_[b].logit)
                return zclasses_[a].logit > zclasses_[b].logit;
            return a < b;
        });

    // Edge variables are shared across both graphs so the observable
    // assignment is solved once, globally. Each subgraph has two virtual
    // boundary vertices, one per color it carries (v = -1 for the red
    // one, v = -2 for the other); an unpaired defect attaches to the
    // boundary of the graph's OTHER color, mirroring the restricted
    // lattice where a qubit missing a face of color c has that neighbor
    // replaced by the c boundary. Folding the boundaries into one vertex
    // would alias paths of different logical parity.
    std::map<std::tuple<int, int32_t, int32_t>, uint32_t> var_of_edge;
    std::vector<double> edge_p;
    struct Eq {
        double p;
        uint32_t idx;
        std::vector<uint32_t> vars;
        uint8_t rhs;
    };
    std::vector<Eq> eqs;
    eqs.reserve(dem.mechanisms.size());

    auto edge_var = [&](int g, int32_t u, int32_t v) {
        if (v >= 0 && u > v) std::swap(u, v);
        auto key = std::make_tuple(g, u, v);
        auto it = var_of_edge.find(key);
        if (it != var_of_edge.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(edge_p.size());
        var_of_edge.emplace(key, id);
        edge_p.push_back(0.0);
        return id;
    };

    auto find_edge_var = [&](int g, int32_t u, int32_t v) -> int64_t {
        if (v >= 0 && u > v) std::swap(u, v);
        auto it = var_of_edge.find(std::make_tuple(g, u, v));
        return it == var_of_edge.end() ? -1 : static_cast<int64_t>(it->second);
    };

    struct ProjNode {
        int32_t face;
        int32_t round;
        int32_t node;
    };
    std::vector<ProjNode> proj;
    std::vector<int32_t> rem;

    // Decompose one mechanism's z-sector projections into edge endpoint
    // pairs (second endpoint -1 for boundary).
    auto decompose = [&](const Mechanism& mech,
                         std::vector<std::tuple<int, int32_t, int32_t>>& pairs, bool& simple) {
        pairs.clear();
        simple = true;
        for (int g = 0; g < 3; ++g) {
            const auto& G = graphs_[g];
            proj.clear();
            for (uint32_t d : mech.detectors) {
                int32_t node = G.node_of_det[d];
                if (node < 0) continue;
                const auto& m = dem.detector_meta[d];
                proj.push_back({m.face, m.round, node});
            }
            if (proj.empty()) continue;
            if (proj.size() > 2) simple = false;
            std::sort(proj.begin(), proj.end(), [](const ProjNode& a, const ProjNode& b) {
                return std::tie(a.face, a.round, a.node) < std::tie(b.face, b.round, b.node);
            });
            rem.clear();
            size_t i = 0;
            while (i < proj.size()) {
                size_t j = i;
                while (j < proj.size() && proj[j].face == proj[i].face) ++j;
                for (size_t k = i; k + 1 < j; k += 2)
                    pairs.emplace_back(g, proj[k].node, proj[k + 1].node);
                if ((j - i) & 1) rem.push_back(proj[j - 1].node);
                i = j;
            }
            std::sort(rem.begin(), rem.end());
            for (size_t k = 0; k + 1 < rem.size(); k += 2)
                pairs.emplace_back(g, rem[k], rem[k + 1]);
            if (rem.size() & 1) {
                const int color = dem.detector_meta[G.det_of_node[rem.back()]].color;
                pairs.emplace_back(g, rem.back(), color == 0 ? int32_t{-2} : int32_t{-1});
            }
        }
    };

    // Only graphlike mechanisms (at most one edge per subgraph) define
    // edge variables and constrain the observable solve; hyperedges are
    // folded into the weights afterwards, and only where they agree with
    // the solved assignment. Treating hyperedge pairings as constraints
    // over-couples the system and makes it inconsistent.
    std::vector<std::tuple<int, int32_t, int32_t>> pairs;
    std::vector<uint32_t> hyper;
    for (uint32_t mi = 0; mi < dem.mechanisms.size(); ++mi) {
        const auto& mech = dem.mechanisms[mi];
        bool simple = true;
        decompose(mech, pairs, simple);
        if (!simple) {
            hyper.push_back(mi);
            continue;
        }
        std::vector<uint32_t> vars;
        vars.reserve(pairs.size());
        for (const auto& [g, u, v] : pairs) vars.push_back(edge_var(g, u, v));
        for (uint32_t v : vars)
            edge_p[v] = edge_p[v] * (1.0 - mech.p) + mech.p * (1.0 - edge_p[v]);
        std::sort(vars.begin(), vars.end());
        eqs.push_back({mech.p, mi, std::move(vars), mech.flips_observable ? uint8_t{1} : uint8_t{0}});
    }

    // GF(2) solve for per-edge observable bits, most probable
    // mechanisms first so their constraints win any inconsistency.
    std::vector<uint32_t> order(eqs.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return eqs[a].p > eqs[b].p; });
    struct Row {
        std::vector<uint32_t> vars;
        uint8_t rhs;
    };
    std::vector<Row> basis;
    std::unordered_map<uint32_t, uint32_t> pivot_row;
    for (uint32_t oi : order) {
        std::vector<uint32_t> vars = eqs[oi].vars;
        uint8_t rhs = eqs[oi].rhs;
        while (!vars.empty()) {
            auto it = pivot_row.find(vars.front());
            if (it == pivot_row.end()) break;
            xor_vars(vars, basis[it->second].vars);
            rhs ^= basis[it->second].rhs;
        }
        if (vars.empty()) {
            if (rhs) ++conflicts_;
            continue;
        }
        pivot_row.emplace(vars.front(), static_cast<uint32_t>(basis.size()));
        basis.push_back({std::move(vars), rhs});
    }
    std::vector<uint8_t> value(edge_p.size(), 0);
    std::vector<uint32_t> pivots;
    pivots.reserve(basis.size());
    for (const auto& [piv, row] : pivot_row) pivots.push_back(piv);
    std::sort(pivots.begin(), pivots.end(), std::greater<>());
    for (uint32_t piv : pivots) {
        const Row& row = basis[pivot_row[piv]];
        uint8_t v = row.rhs;
        for (size_t k = 1; k < row.vars.size(); ++k) v ^= value[row.vars[k]];
        value[piv] = v;
    }

    for (uint32_t mi : hyper) {
        const auto& mech = dem.mechanisms[mi];
        bool simple = true;
        decompose(mech, pairs, simple);
        uint8_t sum = 0;
        bool known = true;
        std::vector<uint32_t> vars;
        for (const auto& [g, u, v] : pairs) {
            int64_t var = find_edge_var(g, u, v);
            if (var < 0) {
                known = false;
                break;
            }
            vars.push_back(static_cast<uint32_t>(var));
            sum ^= value[var];
        }
        if (!known || sum != (mech.flips_observable ? 1 : 0)) continue;
        for (uint32_t v : vars)
            edge_p[v] = edge_p[v] * (1.0 - mech.p) + mech.p * (1.0 - edge_p[v]);
    }

    // Materialize weighted adjacency and run all-pairs Dijkstra with
    // path parity tracking, then fold in the best boundary exit.
    for (int g = 0; g < 3; ++g) {
        auto& G = graphs_[g];
        std::vector<std::vector<EdgeRef>> adj(G.n);
        std::vector<double> direct_bw[2] = {std::vector<double>(G.n, kInf),
                                            std::vector<double>(G.n, kInf)};
        std::vector<uint8_t> direct_bp[2] = {std::vector<uint8_t>(G.n, 0),
                                             std::vector<uint8_t>(G.n, 0)};
        for (const auto& [key, var] : var_of_edge) {
            if (std::get<0>(key) != g) continue;
            double p = std::min(edge_p[var], 0.5 - 1e-12);
            double w = std::log((1.0 - p) / p);
            int32_t u = std::get<1>(key), v = std::get<2>(key);
            if (v < 0) {
                const int cls = (v == -1) ? 0 : 1;
                direct_bw[cls][u] = w;
                direct_bp[cls][u] = value[var];
            } else {
                adj[u].push_back({static_cast<uint32_t>(u), static_cast<uint32_t>(v), value[var], w});
                adj[v].push_back({static_cast<uint32_t>(v), static_cast<uint32_t>(u), value[var], w});
            }
        }
        const uint32_t n = G.n;
        G.dist.assign(static_cast<size_t>(n) * n, kInf);
        G.parity.assign(static_cast<size_t>(n) * n, 0);
        G.bdist.assign(n, kInf);
        G.bparity.assign(n, 0);
        std::vector<double> dist(n);
        std::vector<uint8_t> par(n);
        using QItem = std::pair<double, uint32_t>;
        for (uint32_t s = 0; s < n; ++s) {
            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(par.begin(), par.end(), 0);
            dist[s] = 0.0;
            std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
            pq.push({0.0, s});
            while (!pq.empty()) {
                auto [du, u] = pq.top();
                pq.pop();
                if (du > dist[u]) continue;
                for (const auto& e : adj[u]) {
                    double nd = du + e.weight;
                    if (nd < dist[e.v]) {
                        dist[e.v] = nd;
                        par[e.v] = static_cast<uint8_t>(par[u] ^ e.obs);
                        pq.push({nd, e.v});
                    }
                }
            }
            for (uint32_t t = 0; t < n; ++t) {
                G.dist[static_cast<size_t>(s) * n + t] = dist[t];
                G.parity[static_cast<size_t>(s) * n + t] = par[t];
                for (int cls = 0; cls < 2; ++cls) {
                    if (dist[t] + direct_bw[cls][t] < G.bdist[s]) {
                        G.bdist[s] = dist[t] + direct_bw[cls][t];
                        G.bparity[s] = static_cast<uint8_t>(par[t] ^ direct_bp[cls][t]);
                    }
                }
            }
        }
    }
}

DecodeResult RestrictionDecoder::decode(const std::vector<uint8_t>& events) const {
    if (events.size() != detector_count_)
        throw std::invalid_argument("invalid-events: expected one entry per detector");
    std::vector<uint32_t> fired;
    for (uint32_t d = 0; d < detector_count_; ++d)
        if (events[d]) fired.push_back(d);
    return decode_sparse(fired);
}

DecodeResult RestrictionDecoder::decode_sparse(const std::vector<uint32_t>& fired) const {
    DecodeResult r;
    // Fired z-sector detectors, sorted and deduplicated. The x sector is
    // inert for a Z-basis memory observable.
    std::vector<uint32_t> zfired;
    zfired.reserve(fired.size());
    for (uint32_t d : fired) {
        if (d >= detector_count_)
            throw std::invalid_argument("invalid-events: detector id out of range");
        if (graphs_[0].node_of_det[d] >= 0 || graphs_[1].node_of_det[d] >= 0) zfired.push_back(d);
    }
    std::sort(zfired.begin(), zfired.end());
    zfired.erase(std::unique(zfired.begin(), zfired.end()), zfired.end());
    if (zfired.empty()) return r;

    const uint32_t nz = static_cast<uint32_t>(zfired.size());
    auto idx_of = [&](uint32_t det) {
        return static_cast<uint32_t>(std::lower_bound(zfired.begin(), zfired.end(), det) -
                                     zfired.begin());
    };
    std::vector<uint32_t> uf(nz);
    std::iota(uf.begin(), uf.end(), 0u);
    auto find_root = [&](uint32_t x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };

    struct ParityRec {
        uint32_t idx;
        uint8_t par;
    };
    std::vector<ParityRec> recs;

    std::vector<uint32_t> defects;
    std::vector<MatchEdge> edges;
    for (int g = 0; g < 3; ++g) {
        const auto& G = graphs_[g];
        defects.clear();
        for (uint32_t d : zfired) {
            int32_t node = G.node_of_det[d];
            if (node >= 0) defects.push_back(static_cast<uint32_t>(node));
        }
        const uint32_t k = static_cast<uint32_t>(defects.size());
        if (k == 0) continue;
        // Nodes 0..k-1 are defects, k..2k-1 their virtual boundary
        // partners; virtual-virtual edges are free so unused exits
        // pair off at no cost.
        edges.clear();
        for (int32_t i = 0; i < static_cast<int32_t>(k); ++i) {
            for (int32_t j = i + 1; j < static_cast<int32_t>(k); ++j) {
                double w = G.dist[static_cast<size_t>(defects[i]) * G.n + defects[j]];
                if (w < kInf) edges.push_back({i, j, scale_weight(w)});
                edges.push_back({static_cast<int32_t>(k) + i, static_cast<int32_t>(k) + j, 0});
            }
            if (G.bdist[defects[i]] < kInf)
                edges.push_back({i, static_cast<int32_t>(k) + i, scale_weight(G.bdist[defects[i]])});
        }
        std::vector<int32_t> mate = min_weight_perfect_matching(2 * k, edges);
        for (uint32_t i = 0; i < k; ++i) {
            int32_t j = mate[i];
            assert(j >= 0);
            uint32_t ui = idx_of(G.det_of_node[defects[i]]);
            if (j < static_cast<int32_t>(k)) {
                if (static_cast<int32_t>(i) < j) {
                    size_t idx = static_cast<size_t>(defects[i]) * G.n + defects[j];
                    uint32_t uj = idx_of(G.det_of_node[defects[j]]);
                    uf[find_root(ui)] = find_root(uj);
                    recs.push_back({ui, G.parity[idx]});
                    r.weight += G.dist[idx];
                }
            } else {
                assert(j == static_cast<int32_t>(k + i));
                recs.push_back({ui, G.bparity[defects[i]]});
                r.weight += G.bdist[defects[i]];
            }
        }
    }

    // Matched pairs connect defects into clusters; each cluster is
    // explained independently, by exact search where feasible and by
    // the matched-path parities otherwise.
    std::map<uint32_t, std::vector<uint32_t>> clusters;
    for (uint32_t i = 0; i < nz; ++i) clusters[find_root(i)].push_back(zfired[i]);
    std::map<uint32_t, uint8_t> static_par;
    for (const auto& rec : recs) static_par[find_root(rec.idx)] ^= rec.par;
    for (const auto& [root, dets] : clusters) {
        uint8_t obs = 0;
        if (dets.size() <= kMLMaxDets && cluster_ml(dets, obs)) {
            r.predicted_flip ^= (obs != 0);
        } else {
            auto it = static_par.find(root);
            r.predicted_flip ^= (it != static_par.end() && it->second != 0);
        }
    }
    return r;
}

// Exact bounded search for the most probable set of z-signature classes
// whose symmetric difference equals `target`. Branches on the smallest
// unexplained detector so every class subset is visited once; classes
// per detector are sorted best-first, and log-odds are negative, so the
// running score bounds every completion.
bool RestrictionDecoder::cluster_ml(const std::vector<uint32_t>& target, uint8_t& obs_out) const {
    {
        std::lock_guard<std::mutex> lk(ml_mu_);
        auto it = ml_cache_.find(target);
        if (it != ml_cache_.end()) {
            if (it->second > 1) return false;
            obs_out = it->second;
            return true;
        }
    }
    bool found = false;
    double best = -kInf;
    uint8_t best_obs = 0;
    int64_t budget = kMLNodeBudget;
    std::function<void(const std::vector<uint32_t>&, double, uint8_t, int)> rec =
        [&](const std::vector<uint32_t>& residual, double cur, uint8_t obs, int depth) {
            if (residual.empty()) {
                if (!found || cur > best) {
                    found = true;
                    best = cur;
                    best_obs = obs;
                }
                return;
            }
            if (depth == kMLMaxDepth) return;
            for (uint32_t ci : det_classes_[residual.front()]) {
                const ZClass& c = zclasses_[ci];
                if (found && cur + c.logit <= best) break;
                if (--budget < 0) return;
                std::vector<uint32_t> next;
                next.reserve(residual.size() + c.dets.size());
                std::set_symmetric_difference(residual.begin(), residual.end(), c.dets.begin(),
                                              c.dets.end(), std::back_inserter(next));
                rec(next, cur + c.logit, obs ^ c.obs, depth + 1);
                if (budget < 0) return;
            }
        };
    rec(target, 0.0, 0, 0);
    {
        std::lock_guard<std::mutex> lk(ml_mu_);
        if (ml_cache_.size() < kMLCacheCap)
            ml_cache_.emplace(target, found ? best_obs : uint8_t{2});
    }
    if (found) obs_out = best_obs;
    return found;
}

DecodeResult decode_restriction_mwpm(const DetectorErrorModel& dem,
                                     const std::vector<uint8_t>& events) {
    return RestrictionDecoder(dem).decode(events);
}

DecodeResult decode_bounded_ml(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                               int w_max) {
    const uint32_t D = dem.detector_count;
    if (events.size() != D)
        throw std::invalid_argument("invalid-events: expected one entry per detector");
    if (w_max < 0) throw std::invalid_argument("invalid-argument: w_max must be >= 0");
    const size_t M = dem.mechanisms.size();
    const int depth_cap = std::min<int>(w_max, static_cast<int>(M));
    double budget = 1.0, term = 1.0;
    for (int k = 1; k <= depth_cap; ++k) {
        term *= static_cast<double>(M - k + 1) / k;
        budget += term;
        if (budget > 1e7)
            throw std::runtime_error("oracle-too-large: subset budget exceeds 1e7");
    }

    const size_t words = (static_cast<size_t>(D) + 1 + 63) / 64;
    std::vector<uint64_t> sigs(M * words, 0);
    std::vector<double> logit(M);
    for (size_t m = 0; m < M; ++m) {
        const auto& mech = dem.mechanisms[m];
        uint64_t* sig = &sigs[m * words];
        for (uint32_t d : mech.detectors) sig[d >> 6] ^= (uint64_t{1} << (d & 63));
        if (mech.flips_observable) sig[D >> 6] ^= (uint64_t{1} << (D & 63));
        logit[m] = std::log(mech.p / (1.0 - mech.p));
    }
    std::vector<uint64_t> target(words, 0);
    for (uint32_t d = 0; d < D; ++d)
        if (events[d]) target[d >> 6] ^= (uint64_t{1} << (d & 63));
    const uint64_t obs_mask = uint64_t{1} << (D & 63);
    const size_t obs_word = D >> 6;

    std::vector<uint64_t> acc(words, 0);
    bool found = false;
    double best_logit = -kInf, best_weight = 0.0;
    bool best_obs = false;

    auto check = [&](double cur_logit) {
        for (size_t w = 0; w < words; ++w) {
            uint64_t diff = acc[w] ^ target[w];
            if (w == obs_word) diff &= ~obs_mask;
            if (diff) return;
        }
        if (!found || cur_logit > best_logit) {
            found = true;
            best_logit = cur_logit;
            best_obs = (acc[obs_word] & obs_mask) != 0;
            best_weight = -cur_logit;
        }
    };

    std::function<void(size_t, int, double)> dfs = [&](size_t start, int depth, double cur) {
        check(cur);
        if (depth == depth_cap) return;
        for (size_t m = start; m < M; ++m) {
            const uint64_t* sig = &sigs[m * words];
            for (size_t w = 0; w < words; ++w) acc[w] ^= sig[w];
            dfs(m + 1, depth + 1, cur + logit[m]);
            for (size_t w = 0; w < words; ++w) acc[w] ^= sig[w];
        }
    };
    dfs(0, 0, 0.0);

    DecodeResult r;
    if (!found) {
        r.best_effort = true;
        return r;
    }
    r.predicted_flip = best_obs;
    r.weight = best_weight;
    return r;
}

} // namespace seamsim
