#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsftrace/dense.hpp"
#include "rsftrace/forest.hpp"
#include "rsftrace/graph.hpp"

namespace rsf::oracle {

// One enumerated rooted forest; parent[r] == r for roots.
struct RootedForest {
    std::vector<node_t> parent;
    std::vector<node_t> root_of;
    std::vector<node_t> tree_id;
    std::vector<std::uint32_t> tree_sizes;
    std::vector<node_t> roots;
    double weight = 0.0;       // q^{#roots} * prod of edge weights
    double probability = 0.0;  // weight / Z
};

struct ForestEnumeration {
    std::vector<RootedForest> forests;
    double partition_function = 0.0;  // equals det(L + qI)

    double expected_roots() const {
        double acc = 0.0;
        for (const auto& f : forests) acc += f.probability * static_cast<double>(f.roots.size());
        return acc;
    }
};

// Canonical identity of a rooted forest: its parent array (the oriented edge
// set). Matches the sampler's ForestSample::parent.
inline std::string forest_key(std::span<const node_t> parent) {
    std::string key;
    key.reserve(parent.size() * 3);
    for (node_t p : parent) {
        key += std::to_string(p);
        key += ',';
    }
    return key;
}

namespace detail {

struct UnionFind {
    std::vector<node_t> up;
    explicit UnionFind(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
    node_t find(node_t a) {
        while (up[a] != a) a = up[a] = up[up[a]];
        return a;
    }
    bool unite(node_t a, node_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        up[a] = b;
        return true;
    }
};

} // namespace detail

// Exhaustive enumeration of every rooted spanning forest: all acyclic edge
// subsets crossed with one root choice per tree. Exponential in the edge
// count, so guarded to n <= 7.
inline ForestEnumeration enumerate_forests(const Graph& g, double q) {
    const std::size_t n = g.node_count();
    if (n > 7) throw std::invalid_argument("enumerate_forests: only graphs with n <= 7");
    if (!(q > 0.0)) throw std::invalid_argument("enumerate_forests: q must be positive");

    struct UEdge {
        node_t u, v;
        double w;
    };
    std::vector<UEdge> edges;
    for (node_t i = 0; i < n; ++i) {
        auto nbr = g.neighbors(i);
        auto w = g.weights(i);
        for (std::size_t t = 0; t < nbr.size(); ++t)
            if (nbr[t] > i) edges.push_back({i, nbr[t], w[t]});
    }
    const std::size_t m = edges.size();
    if (m > 25) throw std::invalid_argument("enumerate_forests: too many edges to enumerate");

    ForestEnumeration en;
    std::vector<std::vector<node_t>> tree_adj(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        detail::UnionFind uf(n);
        double edge_weight = 1.0;
        bool acyclic = true;
        for (std::size_t e = 0; e < m && acyclic; ++e)
            if (mask >> e & 1) {
                acyclic = uf.unite(edges[e].u, edges[e].v);
                edge_weight *= edges[e].w;
            }
        if (!acyclic) continue;

        for (auto& a : tree_adj) a.clear();
        for (std::size_t e = 0; e < m; ++e)
            if (mask >> e & 1) {
                tree_adj[edges[e].u].push_back(edges[e].v);
                tree_adj[edges[e].v].push_back(edges[e].u);
            }
        // group nodes by component
        std::vector<std::vector<node_t>> comps;
        {
            std::vector<int> comp_of(n, -1);
            for (node_t i = 0; i < n; ++i) {
                node_t r = uf.find(i);
                if (comp_of[r] < 0) {
                    comp_of[r] = static_cast<int>(comps.size());
                    comps.emplace_back();
                }
                comps[static_cast<std::size_t>(comp_of[r])].push_back(i);
            }
        }
        const double base_weight =
            std::pow(q, static_cast<double>(comps.size())) * edge_weight;

        // odometer over one root choice per component
        std::vector<std::size_t> pick(comps.size(), 0);
        for (;;) {
            RootedForest f;
            f.parent.assign(n, invalid_node);
            f.root_of.assign(n, 0);
            f.tree_id.assign(n, 0);
            f.weight = base_weight;
            for (std::size_t c = 0; c < comps.size(); ++c) {
                const node_t root = comps[c][pick[c]];
                f.roots.push_back(root);
                f.tree_sizes.push_back(static_cast<std::uint32_t>(comps[c].size()));
                // orient the tree toward its root
                f.parent[root] = root;
                std::vector<node_t> stack{root};
                while (!stack.empty()) {
                    node_t u = stack.back();
                    stack.pop_back();
                    f.root_of[u] = root;
                    f.tree_id[u] = static_cast<node_t>(c);
                    for (node_t v : tree_adj[u])
                        if (f.parent[v] == invalid_node) {
                            f.parent[v] = u;
                            stack.push_back(v);
                        }
                }
            }
            en.partition_function += f.weight;
            en.forests.push_back(std::move(f));

            std::size_t c = 0;
            while (c < comps.size() && ++pick[c] == comps[c].size()) pick[c++] = 0;
            if (c == comps.size()) break;
        }
    }
    for (auto& f : en.forests) f.probability = f.weight / en.partition_function;
    return en;
}

// Dense matrix estimators materialized from a forest's root relation and
// tree partition; used by the trace identity tests.
inline Eigen::MatrixXd dense_s_tilde(std::span<const node_t> root_of) {
    const auto n = static_cast<Eigen::Index>(root_of.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) s(i, root_of[static_cast<std::size_t>(i)]) = 1.0;
    return s;
}

inline Eigen::MatrixXd dense_s_bar(std::span<const node_t> tree_id,
                                   std::span<const std::uint32_t> tree_sizes) {
    const auto n = static_cast<Eigen::Index>(tree_id.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (tree_id[static_cast<std::size_t>(i)] == tree_id[static_cast<std::size_t>(j)])
                s(i, j) = 1.0 / tree_sizes[tree_id[static_cast<std::size_t>(j)]];
    return s;
}

// Exact estimator moments over an enumeration. Control variate values are
// obtained through the dense route c = n - tr((L + qI) S / q), independent
// of the sparse per-forest formulas they are used to check.
struct ExactStats {
    double e_roots = 0.0;
    double var_roots = 0.0;
    double e_c_tilde = 0.0;
    double e_c_bar = 0.0;
    double var_c_tilde = 0.0;
    double var_c_bar = 0.0;
    double cov_roots_c_tilde = 0.0;
    double cov_roots_c_bar = 0.0;
    double alpha_star_tilde = 0.0;  // -cov / var, exact variance minimizer
    double alpha_star_bar = 0.0;
    double var_s_tilde = 0.0;  // at the alpha passed in
    double var_s_bar = 0.0;
    double alpha = 0.0;
};

inline ExactStats exact_stats(const ForestEnumeration& en, const Graph& g, double q,
                              double alpha) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd k_inv = dense_laplacian(g);
    k_inv.diagonal().array() += q;
    k_inv /= q;

    double e_r = 0, e_r2 = 0, e_ct = 0, e_ct2 = 0, e_cb = 0, e_cb2 = 0, e_rct = 0, e_rcb = 0;
    for (const auto& f : en.forests) {
        const double p = f.probability;
        const double r = static_cast<double>(f.roots.size());
        const double ct =
            static_cast<double>(n) - (k_inv * dense_s_tilde(f.root_of)).trace();
        const double cb =
            static_cast<double>(n) - (k_inv * dense_s_bar(f.tree_id, f.tree_sizes)).trace();
        e_r += p * r;
        e_r2 += p * r * r;
        e_ct += p * ct;
        e_ct2 += p * ct * ct;
        e_cb += p * cb;
        e_cb2 += p * cb * cb;
        e_rct += p * r * ct;
        e_rcb += p * r * cb;
    }
    ExactStats s;
    s.alpha = alpha;
    s.e_roots = e_r;
    s.var_roots = e_r2 - e_r * e_r;
    s.e_c_tilde = e_ct;
    s.e_c_bar = e_cb;
    s.var_c_tilde = e_ct2 - e_ct * e_ct;
    s.var_c_bar = e_cb2 - e_cb * e_cb;
    s.cov_roots_c_tilde = e_rct - e_r * e_ct;
    s.cov_roots_c_bar = e_rcb - e_r * e_cb;
    s.alpha_star_tilde = s.var_c_tilde > 0 ? -s.cov_roots_c_tilde / s.var_c_tilde : 0.0;
    s.alpha_star_bar = s.var_c_bar > 0 ? -s.cov_roots_c_bar / s.var_c_bar : 0.0;
    s.var_s_tilde =
        s.var_roots + alpha * alpha * s.var_c_tilde + 2.0 * alpha * s.cov_roots_c_tilde;
    s.var_s_bar = s.var_roots + alpha * alpha * s.var_c_bar + 2.0 * alpha * s.cov_roots_c_bar;
    return s;
}

} // namespace rsf::oracle
