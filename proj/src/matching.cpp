#include "seamsim/matching.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace seamsim {

namespace {

// Port of the well-known O(V^3) blossom implementation by van Rantwijk.
// Vertices are 0..n-1, blossom slots n..2n-1. endpoint 2k/2k+1 are the
// two ends of edge k; mate[] stores endpoint indices until the very end.
class Matcher {
  public:
    Matcher(int n, const std::vector<MatchEdge>& edges_in, bool maxcard)
        : n_(n), maxcard_(maxcard) {
        edges_.reserve(edges_in.size());
        for (const auto& e : edges_in) {
            if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v)
                throw std::invalid_argument("invalid-edge: bad endpoints");
            // Doubling keeps every dual update and half-slack integral.
            edges_.push_back({e.u, e.v, 2 * e.weight});
        }
        const int m = static_cast<int>(edges_.size());
        maxweight_ = 0;
        for (const auto& e : edges_) maxweight_ = std::max(maxweight_, e.w);
        endpoint_.resize(2 * m);
        for (int p = 0; p < 2 * m; ++p) endpoint_[p] = p % 2 == 0 ? edges_[p / 2].i : edges_[p / 2].j;
        neighbend_.assign(n_, {});
        for (int k = 0; k < m; ++k) {
            neighbend_[edges_[k].i].push_back(2 * k + 1);
            neighbend_[edges_[k].j].push_back(2 * k);
        }
        mate_.assign(n_, -1);
        label_.assign(2 * n_, 0);
        labelend_.assign(2 * n_, -1);
        inblossom_.resize(n_);
        for (int v = 0; v < n_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n_, -1);
        blossomchilds_.assign(2 * n_, {});
        blossombase_.resize(2 * n_);
        for (int v = 0; v < n_; ++v) blossombase_[v] = v;
        for (int b = n_; b < 2 * n_; ++b) blossombase_[b] = -1;
        blossomendps_.assign(2 * n_, {});
        bestedge_.assign(2 * n_, -1);
        blossombestedges_.assign(2 * n_, {});
        has_bestedges_.assign(2 * n_, 0);
        for (int b = 2 * n_ - 1; b >= n_; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n_, 0);
        for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(m, 0);
    }

    std::vector<int> solve() {
        if (edges_.empty()) return std::vector<int>(n_, -1);
        for (int t = 0; t < n_; ++t) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = n_; b < 2 * n_; ++b) {
                blossombestedges_[b].clear();
                has_bestedges_[b] = 0;
            }
            std::fill(allowedge_.begin(), allowedge_.end(), 0);
            queue_.clear();
            for (int v = 0; v < n_; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const int v = queue_.back();
                    queue_.pop_back();
                    assert(label_[inblossom_[v]] == 1);
                    for (int p : neighbend_[v]) {
                        const int k = p / 2;
                        const int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        int64_t kslack = 0;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= 0) allowedge_[k] = 1;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                assert(label_[inblossom_[w]] == 2);
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            const int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b]))
                                bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w]))
                                bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                int deltatype = -1;
                int64_t delta = 0;
                int deltaedge = -1, deltablossom = -1;
                if (!maxcard_) {
                    deltatype = 1;
                    delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
                }
                for (int v = 0; v < n_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const int64_t d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        const int64_t kslack = slack(bestedge_[b]);
                        assert(kslack % 2 == 0);
                        const int64_t d = kslack / 2;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    assert(maxcard_);
                    deltatype = 1;
                    delta = std::max<int64_t>(
                        0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
                }
                for (int v = 0; v < n_; ++v) {
                    const int lb = label_[inblossom_[v]];
                    if (lb == 1)
                        dualvar_[v] -= delta;
                    else if (lb == 2)
                        dualvar_[v] += delta;
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1)
                            dualvar_[b] += delta;
                        else if (label_[b] == 2)
                            dualvar_[b] -= delta;
                    }
                }
                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    allowedge_[deltaedge] = 1;
                    int i = edges_[deltaedge].i;
                    if (label_[inblossom_[i]] == 0) i = edges_[deltaedge].j;
                    assert(label_[inblossom_[i]] == 1);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = 1;
                    assert(label_[inblossom_[edges_[deltaedge].i]] == 1);
                    queue_.push_back(edges_[deltaedge].i);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;
            for (int b = n_; b < 2 * n_; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
                    dualvar_[b] == 0)
                    expand_blossom(b, true);
            }
        }
        std::vector<int> mate(n_, -1);
        for (int v = 0; v < n_; ++v)
            if (mate_[v] >= 0) mate[v] = endpoint_[mate_[v]];
        for (int v = 0; v < n_; ++v) assert(mate[v] == -1 || mate[mate[v]] == v);
        return mate;
    }

  private:
    struct Edge {
        int i, j;
        int64_t w;
    };

    int64_t slack(int k) const {
        return dualvar_[edges_[k].i] + dualvar_[edges_[k].j] - 2 * edges_[k].w;
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < n_) {
            out.push_back(b);
        } else {
            for (int t : blossomchilds_[b]) blossom_leaves(t, out);
        }
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        assert(label_[w] == 0 && label_[b] == 0);
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            std::vector<int> leaves;
            blossom_leaves(b, leaves);
            for (int v : leaves) queue_.push_back(v);
        } else {
            const int base = blossombase_[b];
            assert(mate_[base] >= 0);
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            assert(label_[b] == 1);
            path.push_back(b);
            label_[b] = 5;
            assert(labelend_[b] == mate_[blossombase_[b]]);
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                assert(label_[b] == 2);
                assert(labelend_[b] >= 0);
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].i, w = edges_[k].j;
        const int bb = inblossom_[base];
        int bv = inblossom_[v], bw = inblossom_[w];
        assert(!unusedblossoms_.empty());
        const int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            assert(label_[bv] == 2 ||
                   (label_[bv] == 1 && labelend_[bv] == mate_[blossombase_[bv]]));
            assert(labelend_[bv] >= 0);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            assert(label_[bw] == 2 ||
                   (label_[bw] == 1 && labelend_[bw] == mate_[blossombase_[bw]]));
            assert(labelend_[bw] >= 0);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        assert(label_[bb] == 1);
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0;
        std::vector<int> leaves;
        blossom_leaves(b, leaves);
        for (int lv : leaves) {
            if (label_[inblossom_[lv]] == 2) queue_.push_back(lv);
            inblossom_[lv] = b;
        }
        std::vector<int> bestedgeto(2 * n_, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_bestedges_[child]) {
                std::vector<int> cl;
                blossom_leaves(child, cl);
                for (int lv : cl) {
                    std::vector<int> ks;
                    ks.reserve(neighbend_[lv].size());
                    for (int p : neighbend_[lv]) ks.push_back(p / 2);
                    nblists.push_back(std::move(ks));
                }
            } else {
                nblists.push_back(blossombestedges_[child]);
            }
            for (const auto& nblist : nblists) {
                for (int ek : nblist) {
                    int i = edges_[ek].i, j = edges_[ek].j;
                    if (inblossom_[j] == b) std::swap(i, j);
                    const int bj = inblossom_[j];
                    if (bj != b && label_[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(ek) < slack(bestedgeto[bj])))
                        bestedgeto[bj] = ek;
                }
            }
            blossombestedges_[child].clear();
            has_bestedges_[child] = 0;
            bestedge_[child] = -1;
        }
        blossombestedges_[b].clear();
        for (int ek : bestedgeto)
            if (ek != -1) blossombestedges_[b].push_back(ek);
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (int ek : blossombestedges_[b])
            if (bestedge_[b] == -1 || slack(ek) < slack(bestedge_[b])) bestedge_[b] = ek;
    }

    int child_at(int b, int j) const {
        const int len = static_cast<int>(blossomchilds_[b].size());
        return blossomchilds_[b][static_cast<size_t>(((j % len) + len) % len)];
    }

    int endp_at(int b, int j) const {
        const int len = static_cast<int>(blossomendps_[b].size());
        return blossomendps_[b][static_cast<size_t>(((j % len) + len) % len)];
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> leaves;
                blossom_leaves(s, leaves);
                for (int lv : leaves) inblossom_[lv] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            assert(labelend_[b] >= 0);
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = 0;
            for (size_t i = 0; i < blossomchilds_[b].size(); ++i)
                if (blossomchilds_[b][i] == entrychild) {
                    j = static_cast<int>(i);
                    break;
                }
            int jstep, endptrick;
            if (j & 1) {
                j -= static_cast<int>(blossomchilds_[b].size());
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endp_at(b, j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endp_at(b, j - endptrick) / 2] = 1;
                j += jstep;
                p = endp_at(b, j - endptrick) ^ endptrick;
                allowedge_[p / 2] = 1;
                j += jstep;
            }
            const int bv = child_at(b, j);
            label_[endpoint_[p ^ 1]] = 2;
            label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = p;
            labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(b, j) != entrychild) {
                const int bw = child_at(b, j);
                if (label_[bw] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> leaves;
                blossom_leaves(bw, leaves);
                int lv = -1;
                for (int cand : leaves) {
                    lv = cand;
                    if (label_[cand] != 0) break;
                }
                if (lv >= 0 && label_[lv] != 0) {
                    assert(label_[lv] == 2);
                    assert(inblossom_[lv] == bw);
                    label_[lv] = 0;
                    label_[endpoint_[mate_[blossombase_[bw]]]] = 0;
                    assign_label(lv, 2, labelend_[lv]);
                }
                j += jstep;
            }
        }
        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        int i = 0;
        for (size_t s = 0; s < blossomchilds_[b].size(); ++s)
            if (blossomchilds_[b][s] == t) {
                i = static_cast<int>(s);
                break;
            }
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= static_cast<int>(blossomchilds_[b].size());
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            int tt = child_at(b, j);
            const int p = endp_at(b, j - endptrick) ^ endptrick;
            if (tt >= n_) augment_blossom(tt, endpoint_[p]);
            j += jstep;
            tt = child_at(b, j);
            if (tt >= n_) augment_blossom(tt, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i,
                    blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i,
                    blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == blossombase_[v]);
    }

    void augment_matching(int k) {
        const int v0 = edges_[k].i, w0 = edges_[k].j;
        const std::pair<int, int> starts[2] = {{v0, 2 * k + 1}, {w0, 2 * k}};
        for (const auto& [s0, p0] : starts) {
            int s = s0, p = p0;
            while (true) {
                const int bs = inblossom_[s];
                assert(label_[bs] == 1);
                assert(labelend_[bs] == mate_[blossombase_[bs]]);
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                assert(label_[bt] == 2);
                assert(labelend_[bt] >= 0);
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                assert(blossombase_[bt] == t);
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int n_;
    bool maxcard_;
    std::vector<Edge> edges_;
    int64_t maxweight_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<uint8_t> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<int64_t> dualvar_;
    std::vector<uint8_t> allowedge_;
    std::vector<int> queue_;
};

} // namespace

std::vector<int> max_weight_matching(int num_nodes, const std::vector<MatchEdge>& edges,
                                     bool max_cardinality) {
    if (num_nodes < 0) throw std::invalid_argument("invalid-graph: negative node count");
    Matcher m(num_nodes, edges, max_cardinality);
    return m.solve();
}

std::vector<int> min_weight_perfect_matching(int num_nodes, const std::vector<MatchEdge>& edges) {
    int64_t maxw = 0;
    for (const auto& e : edges) maxw = std::max(maxw, e.weight);
    std::vector<MatchEdge> flipped = edges;
    for (auto& e : flipped) e.weight = maxw + 1 - e.weight;
    std::vector<int> mate = max_weight_matching(num_nodes, flipped, true);
    for (int v = 0; v < num_nodes; ++v)
        if (mate[v] == -1)
            throw std::runtime_error("matching-failure: graph has no perfect matching");
    return mate;
}

} // namespace seamsim
