#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsftrace/graph.hpp"

namespace rsf {

// One draw of the random forest. parent links point toward the tree roots
// (parent[r] == r for roots); tree_id indexes roots/tree_sizes in root
// discovery order. first_visit_roots holds the nodes that were absorbed at
// their first-ever occupancy of the run. steps counts every walk occupancy.
struct ForestSample {
    std::vector<node_t> parent;
    std::vector<node_t> root_of;
    std::vector<node_t> roots;
    std::vector<node_t> first_visit_roots;
    std::vector<node_t> tree_id;
    std::vector<std::uint32_t> tree_sizes;
    std::uint64_t steps = 0;

    std::size_t node_count() const { return parent.size(); }
    std::size_t root_count() const { return roots.size(); }
};

// Loop-erased random walks with absorption rate q / (q + d_u) per occupancy.
// Walks start from every node in index order and stop on hitting the forest
// grown so far; loop erasure happens implicitly through the successor array.
// Holds scratch buffers so repeated draws on one graph do not reallocate.
class ForestSampler {
public:
    explicit ForestSampler(const Graph& g)
        : g_(&g),
          next_(g.node_count(), invalid_node),
          in_forest_(g.node_count(), 0),
          first_visit_done_(g.node_count(), 0),
          in_x_(g.node_count(), 0) {}

    ForestSample sample(double q, std::mt19937_64& rng) {
        ForestSample out;
        sample_into(out, q, rng);
        return out;
    }

    void sample_into(ForestSample& out, double q, std::mt19937_64& rng) {
        run(out, q, nullptr, rng);
    }

    // Draw conditioned on the first-visit root set being exactly X: members
    // of X start out as roots, and the first occupancy of any other node is
    // forced non-absorbing (its first-visit coin is consumed as tails).
    // X must contain every isolated node, whose first visit always absorbs.
    ForestSample sample_conditional(double q, std::span<const node_t> X, std::mt19937_64& rng) {
        ForestSample out;
        sample_conditional_into(out, q, X, rng);
        return out;
    }

    void sample_conditional_into(ForestSample& out, double q, std::span<const node_t> X,
                                 std::mt19937_64& rng) {
        run(out, q, &X, rng);
    }

private:
    const Graph* g_;
    std::vector<node_t> next_;
    std::vector<std::uint8_t> in_forest_;
    std::vector<std::uint8_t> first_visit_done_;
    std::vector<std::uint8_t> in_x_;

    node_t pick_neighbor(node_t u, double s) const {
        auto nbr = g_->neighbors(u);
        if (g_->unit_weights()) {
            auto idx = static_cast<std::size_t>(s);
            if (idx >= nbr.size()) idx = nbr.size() - 1;
            return nbr[idx];
        }
        auto w = g_->weights(u);
        double acc = 0.0;
        for (std::size_t t = 0; t < nbr.size(); ++t) {
            acc += w[t];
            if (s < acc) return nbr[t];
        }
        return nbr.back();
    }

    void run(ForestSample& out, double q, const std::span<const node_t>* X,
             std::mt19937_64& rng) {
        if (!(q > 0.0)) throw std::invalid_argument("forest sampler: q must be positive");
        const std::size_t n = g_->node_count();
        if (n == 0) throw std::invalid_argument("forest sampler: empty graph");

        out.parent.assign(n, invalid_node);
        out.root_of.assign(n, invalid_node);
        out.tree_id.assign(n, 0);
        out.roots.clear();
        out.first_visit_roots.clear();
        out.tree_sizes.clear();
        out.steps = 0;
        std::fill(in_forest_.begin(), in_forest_.end(), 0);
        std::fill(first_visit_done_.begin(), first_visit_done_.end(), 0);

        const bool conditional = X != nullptr;
        if (conditional) {
            std::fill(in_x_.begin(), in_x_.end(), 0);
            for (node_t u : *X) {
                if (u >= n) throw std::invalid_argument("conditional root set: node id out of range");
                if (in_x_[u]) continue;
                in_x_[u] = 1;
                install_root(out, u, /*first_visit=*/true);
            }
            for (std::size_t u = 0; u < n; ++u)
                if (g_->degree(static_cast<node_t>(u)) == 0.0 && !in_x_[u])
                    throw std::invalid_argument(
                        "conditional root set must contain every isolated node");
        }

        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (node_t start = 0; start < n; ++start) {
            if (in_forest_[start]) continue;
            node_t u = start;
            while (!in_forest_[u]) {
                ++out.steps;
                const double du = g_->degree(u);
                const bool first = !first_visit_done_[u];
                first_visit_done_[u] = 1;
                double move_pos;  // position within [0, du) once not absorbed
                if (conditional && first) {
                    move_pos = unif(rng) * du;  // forced tails
                } else {
                    const double t = unif(rng) * (q + du);
                    if (t < q) {
                        install_root(out, u, first);
                        break;
                    }
                    move_pos = t - q;
                }
                const node_t v = pick_neighbor(u, move_pos);
                next_[u] = v;
                u = v;
            }
            // attach the retained (loop-erased) path from start
            const node_t end = [&] {
                node_t v = start;
                while (!in_forest_[v]) v = next_[v];
                return v;
            }();
            const node_t r = out.root_of[end];
            const node_t tid = out.tree_id[end];
            node_t v = start;
            while (!in_forest_[v]) {
                in_forest_[v] = 1;
                out.root_of[v] = r;
                out.tree_id[v] = tid;
                out.parent[v] = next_[v];
                ++out.tree_sizes[tid];
                v = next_[v];
            }
        }
    }

    void install_root(ForestSample& out, node_t u, bool first_visit) {
        in_forest_[u] = 1;
        first_visit_done_[u] = 1;
        out.parent[u] = u;
        out.root_of[u] = u;
        out.tree_id[u] = static_cast<node_t>(out.tree_sizes.size());
        out.roots.push_back(u);
        if (first_visit) out.first_visit_roots.push_back(u);
        out.tree_sizes.push_back(1);
    }
};

inline ForestSample sample_forest(const Graph& g, double q, std::mt19937_64& rng) {
    return ForestSampler(g).sample(q, rng);
}

inline ForestSample sample_forest_conditional(const Graph& g, double q,
                                              std::span<const node_t> X,
                                              std::mt19937_64& rng) {
    return ForestSampler(g).sample_conditional(q, X, rng);
}

} // namespace rsf
