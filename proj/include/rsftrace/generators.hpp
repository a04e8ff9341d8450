#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "rsftrace/graph.hpp"
#include "rsftrace/rng.hpp"

namespace rsf {

namespace detail {
inline std::uint64_t edge_key(node_t a, node_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}
} // namespace detail

// Preferential attachment seeded with k edgeless nodes; node k connects to all
// of them and every later node attaches k distinct endpoints sampled
// proportionally to degree. Edge count is exactly (n - k) * k.
inline Graph gen_barabasi_albert(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 1 || n <= k) throw std::invalid_argument("gen_barabasi_albert: need n > k >= 1");
    std::mt19937_64 rng = make_stream(seed, 0);
    std::vector<Edge> edges;
    edges.reserve((n - k) * k);
    // endpoints of existing edges, repeated; uniform picks are degree-biased
    std::vector<node_t> endpoints;
    endpoints.reserve(2 * (n - k) * k);
    std::vector<node_t> targets;
    for (std::size_t v = k; v < n; ++v) {
        targets.clear();
        while (targets.size() < k) {
            node_t t;
            if (endpoints.empty()) {
                t = static_cast<node_t>(rng() % v);
            } else {
                t = endpoints[rng() % endpoints.size()];
            }
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        for (node_t t : targets) {
            edges.push_back({static_cast<node_t>(v), t, 1.0});
        }
        // register endpoints only after all k picks so a node cannot attach to itself
        for (node_t t : targets) {
            endpoints.push_back(static_cast<node_t>(v));
            endpoints.push_back(t);
        }
    }
    return Graph::from_edge_list(edges, n);
}

// Simple k-regular graph via the pairing model. Conflicting stub pairs are
// re-shuffled; if the leftover stubs admit no simple pairing the attempt
// restarts from scratch.
inline Graph gen_k_regular(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k >= n) throw std::invalid_argument("gen_k_regular: need k < n");
    if ((n * k) % 2 != 0) throw std::invalid_argument("gen_k_regular: n * k must be even");
    std::mt19937_64 rng = make_stream(seed, 0);

    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
        std::unordered_set<std::uint64_t> edge_set;
        edge_set.reserve(n * k / 2 * 2);
        std::vector<node_t> stubs;
        stubs.reserve(n * k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) stubs.push_back(static_cast<node_t>(i));

        bool stuck = false;
        while (!stubs.empty()) {
            std::shuffle(stubs.begin(), stubs.end(), rng);
            std::vector<node_t> leftover;
            for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
                node_t a = stubs[i], b = stubs[i + 1];
                if (a != b && edge_set.insert(detail::edge_key(a, b)).second) continue;
                leftover.push_back(a);
                leftover.push_back(b);
            }
            if (leftover.size() == stubs.size()) {
                // no progress: check whether any simple pairing is still possible
                std::unordered_set<node_t> distinct(leftover.begin(), leftover.end());
                bool suitable = false;
                for (auto a : distinct) {
                    for (auto b : distinct) {
                        if (a < b && !edge_set.count(detail::edge_key(a, b))) {
                            suitable = true;
                            break;
                        }
                    }
                    if (suitable) break;
                }
                if (!suitable) {
                    stuck = true;
                    break;
                }
            }
            stubs = std::move(leftover);
        }
        if (stuck) continue;

        std::vector<Edge> edges;
        edges.reserve(edge_set.size());
        for (std::uint64_t key : edge_set)
            edges.push_back({static_cast<node_t>(key >> 32),
                             static_cast<node_t>(key & 0xffffffffu), 1.0});
        return Graph::from_edge_list(edges, n);
    }
    throw std::runtime_error("gen_k_regular: exhausted pairing attempts");
}

// side^3 nearest-neighbor lattice; periodic wraps each axis (wrap edges that
// duplicate an existing lattice edge, as with side == 2, are collapsed).
inline Graph gen_grid3d(std::size_t side, bool periodic = true) {
    if (side < 2) throw std::invalid_argument("gen_grid3d: need side >= 2");
    const std::size_t n = side * side * side;
    auto id = [side](std::size_t x, std::size_t y, std::size_t z) {
        return static_cast<node_t>(x + side * (y + side * z));
    };
    std::vector<Edge> edges;
    edges.reserve(3 * n);
    for (std::size_t z = 0; z < side; ++z)
        for (std::size_t y = 0; y < side; ++y)
            for (std::size_t x = 0; x < side; ++x) {
                if (x + 1 < side) edges.push_back({id(x, y, z), id(x + 1, y, z), 1.0});
                else if (periodic) edges.push_back({id(x, y, z), id(0, y, z), 1.0});
                if (y + 1 < side) edges.push_back({id(x, y, z), id(x, y + 1, z), 1.0});
                else if (periodic) edges.push_back({id(x, y, z), id(x, 0, z), 1.0});
                if (z + 1 < side) edges.push_back({id(x, y, z), id(x, y, z + 1), 1.0});
                else if (periodic) edges.push_back({id(x, y, z), id(x, y, 0), 1.0});
            }
    return Graph::from_edge_list(edges, n);
}

inline Graph gen_grid2d(std::size_t rows, std::size_t cols, bool periodic = false) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("gen_grid2d: empty grid");
    const std::size_t n = rows * cols;
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<node_t>(r * cols + c); };
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
            else if (periodic && cols > 1) edges.push_back({id(r, c), id(r, 0), 1.0});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
            else if (periodic && rows > 1) edges.push_back({id(r, c), id(0, c), 1.0});
        }
    return Graph::from_edge_list(edges, n);
}

// node 0 is the hub
inline Graph gen_star(std::size_t leaves) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= leaves; ++i)
        edges.push_back({0, static_cast<node_t>(i), 1.0});
    return Graph::from_edge_list(edges, leaves + 1);
}

inline Graph gen_path(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gen_path: need n >= 1");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i)
        edges.push_back({static_cast<node_t>(i), static_cast<node_t>(i + 1), 1.0});
    return Graph::from_edge_list(edges, n);
}

} // namespace rsf
