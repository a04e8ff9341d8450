#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rsf {

using node_t = std::uint32_t;

inline constexpr node_t invalid_node = static_cast<node_t>(-1);

struct Edge {
    node_t u = 0;
    node_t v = 0;
    double w = 1.0;
};

// Weighted undirected graph in compressed sparse (CSR) form. Immutable after
// construction. Neighbor lists are sorted by node id; self-loops are dropped
// and duplicate undirected edges collapse to the first weight seen.
class Graph {
public:
    Graph() = default;

    static Graph from_edge_list(std::span<const Edge> edges, std::size_t n);
    static Graph from_edge_list(std::initializer_list<Edge> edges, std::size_t n) {
        return from_edge_list(std::span<const Edge>(edges.begin(), edges.size()), n);
    }

    std::size_t node_count() const { return deg_.size(); }
    std::size_t edge_count() const { return m_; }

    double degree(node_t i) const { return deg_[i]; }
    std::span<const double> degrees() const { return deg_; }
    std::size_t neighbor_count(node_t i) const { return offset_[i + 1] - offset_[i]; }
    std::span<const node_t> neighbors(node_t i) const {
        return {adj_.data() + offset_[i], offset_[i + 1] - offset_[i]};
    }
    std::span<const double> weights(node_t i) const {
        return {wgt_.data() + offset_[i], offset_[i + 1] - offset_[i]};
    }

    double max_degree() const { return max_deg_; }
    // (sum of weighted degrees) / n = 2 * total_weight / n
    double avg_degree() const {
        return deg_.empty() ? 0.0 : 2.0 * total_w_ / static_cast<double>(deg_.size());
    }
    double total_weight() const { return total_w_; }
    bool unit_weights() const { return unit_weights_; }

    // y_i = d_i x_i - sum_{j in N(i)} w(i,j) x_j, in O(n + m).
    void laplacian_apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> laplacian_apply(std::span<const double> x) const {
        std::vector<double> y(node_count());
        laplacian_apply(x, y);
        return y;
    }

private:
    std::vector<std::size_t> offset_;  // n + 1
    std::vector<node_t> adj_;          // 2m
    std::vector<double> wgt_;          // 2m
    std::vector<double> deg_;          // n
    std::size_t m_ = 0;
    double max_deg_ = 0.0;
    double total_w_ = 0.0;
    bool unit_weights_ = true;

    void check_invariants() const;
};

inline Graph Graph::from_edge_list(std::span<const Edge> edges, std::size_t n) {
    if (n > static_cast<std::size_t>(invalid_node))
        throw std::invalid_argument("graph too large for 32-bit node ids");

    // Collapse duplicates keeping the first weight; drop self-loops.
    struct HalfEdge {
        node_t u, v;
        double w;
        std::size_t order;
    };
    std::vector<HalfEdge> uniq;
    uniq.reserve(edges.size());
    for (std::size_t idx = 0; idx < edges.size(); ++idx) {
        const Edge& e = edges[idx];
        if (e.u >= n || e.v >= n)
            throw std::invalid_argument("edge endpoint " + std::to_string(std::max(e.u, e.v)) +
                                        " out of range [0, " + std::to_string(n) + ")");
        if (!(e.w > 0.0))
            throw std::invalid_argument("edge weight must be strictly positive");
        if (e.u == e.v) continue;
        node_t a = std::min(e.u, e.v), b = std::max(e.u, e.v);
        uniq.push_back({a, b, e.w, idx});
    }
    std::sort(uniq.begin(), uniq.end(), [](const HalfEdge& x, const HalfEdge& y) {
        if (x.u != y.u) return x.u < y.u;
        if (x.v != y.v) return x.v < y.v;
        return x.order < y.order;
    });
    uniq.erase(std::unique(uniq.begin(), uniq.end(),
                           [](const HalfEdge& x, const HalfEdge& y) {
                               return x.u == y.u && x.v == y.v;
                           }),
               uniq.end());

    Graph g;
    g.m_ = uniq.size();
    g.deg_.assign(n, 0.0);
    g.offset_.assign(n + 1, 0);

    std::vector<std::size_t> cnt(n, 0);
    for (const HalfEdge& e : uniq) {
        ++cnt[e.u];
        ++cnt[e.v];
    }
    for (std::size_t i = 0; i < n; ++i) g.offset_[i + 1] = g.offset_[i] + cnt[i];
    g.adj_.resize(2 * g.m_);
    g.wgt_.resize(2 * g.m_);

    std::vector<std::size_t> pos(g.offset_.begin(), g.offset_.end() - 1);
    for (const HalfEdge& e : uniq) {
        g.adj_[pos[e.u]] = e.v;
        g.wgt_[pos[e.u]++] = e.w;
        g.adj_[pos[e.v]] = e.u;
        g.wgt_[pos[e.v]++] = e.w;
        g.deg_[e.u] += e.w;
        g.deg_[e.v] += e.w;
        g.total_w_ += e.w;
        if (e.w != 1.0) g.unit_weights_ = false;
    }
    // uniq is sorted by (u, v), so each node's neighbor block is ascending for
    // the u side; the v side needs a per-node sort.
    for (std::size_t i = 0; i < n; ++i) {
        auto first = g.offset_[i], last = g.offset_[i + 1];
        std::vector<std::pair<node_t, double>> nb;
        nb.reserve(last - first);
        for (auto t = first; t < last; ++t) nb.emplace_back(g.adj_[t], g.wgt_[t]);
        std::sort(nb.begin(), nb.end());
        for (auto t = first; t < last; ++t) {
            g.adj_[t] = nb[t - first].first;
            g.wgt_[t] = nb[t - first].second;
        }
    }
    for (double d : g.deg_) g.max_deg_ = std::max(g.max_deg_, d);
#ifndef NDEBUG
    g.check_invariants();
#endif
    return g;
}

inline void Graph::laplacian_apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = node_count();
    if (x.size() != n || y.size() != n)
        throw std::invalid_argument("laplacian_apply: vector length != node count");
    for (std::size_t i = 0; i < n; ++i) {
        double acc = deg_[i] * x[i];
        for (std::size_t t = offset_[i]; t < offset_[i + 1]; ++t)
            acc -= wgt_[t] * x[adj_[t]];
        y[i] = acc;
    }
}

inline std::size_t connected_components_count(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<node_t> stack;
    std::size_t components = 0;
    for (node_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++components;
        seen[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            const node_t u = stack.back();
            stack.pop_back();
            for (node_t v : g.neighbors(u))
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
    }
    return components;
}

inline void Graph::check_invariants() const {
    const std::size_t n = node_count();
    double degsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        auto nbr = neighbors(static_cast<node_t>(i));
        auto ws = weights(static_cast<node_t>(i));
        for (std::size_t t = 0; t < nbr.size(); ++t) {
            assert(nbr[t] != i && "self-loop survived construction");
            assert(t == 0 || nbr[t] > nbr[t - 1]);  // sorted, no duplicates
            assert(ws[t] > 0.0);
            // symmetry: (i, w) must appear in nbr[t]'s list
            auto other = neighbors(nbr[t]);
            auto it = std::lower_bound(other.begin(), other.end(), static_cast<node_t>(i));
            assert(it != other.end() && *it == i);
            assert(weights(nbr[t])[static_cast<std::size_t>(it - other.begin())] == ws[t]);
            d += ws[t];
        }
        assert(std::abs(d - deg_[i]) <= 1e-12 * (1.0 + d));
        degsum += d;
    }
    assert(std::abs(degsum - 2.0 * total_w_) <= 1e-9 * (1.0 + degsum));
    (void)degsum;
}

} // namespace rsf
