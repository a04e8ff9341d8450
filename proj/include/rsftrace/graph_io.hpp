#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsftrace/graph.hpp"

namespace rsf {

// SNAP-style plain-text edge list: lines starting with '#' are comments, data
// lines hold two whitespace-separated integer ids and an optional weight.
// Arbitrary ids are remapped to dense [0, n) in order of first appearance;
// `original_ids`, when given, receives the dense -> original mapping.
inline Graph load_snap(const std::string& path, std::vector<long long>* original_ids = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_snap: cannot open " + path);

    std::unordered_map<long long, node_t> remap;
    std::vector<long long> ids;
    std::vector<Edge> edges;
    auto dense = [&](long long raw) {
        auto [it, inserted] = remap.try_emplace(raw, static_cast<node_t>(ids.size()));
        if (inserted) ids.push_back(raw);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        long long a, b;
        if (!(ss >> a >> b))
            throw std::runtime_error("load_snap: unparseable line " + std::to_string(lineno) +
                                     " in " + path);
        double w = 1.0;
        if (ss >> w) {
            if (!(w > 0.0))
                throw std::runtime_error("load_snap: non-positive weight on line " +
                                         std::to_string(lineno));
        }
        std::string trailing;
        if (ss >> trailing)
            throw std::runtime_error("load_snap: trailing tokens on line " + std::to_string(lineno));
        edges.push_back({dense(a), dense(b), w});
    }
    if (edges.empty()) throw std::runtime_error("load_snap: no edges in " + path);
    if (original_ids) *original_ids = ids;
    return Graph::from_edge_list(edges, ids.size());
}

// Cache dump: "rsftrace-graph 1" header, an "n m" line, then one
// "u v w" line per undirected edge with u < v in ascending order.
inline void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_graph: cannot open " + path);
    out << "rsftrace-graph 1\n" << g.node_count() << ' ' << g.edge_count() << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        auto nbr = g.neighbors(static_cast<node_t>(i));
        auto w = g.weights(static_cast<node_t>(i));
        for (std::size_t t = 0; t < nbr.size(); ++t)
            if (nbr[t] > i) out << i << ' ' << nbr[t] << ' ' << w[t] << '\n';
    }
    if (!out) throw std::runtime_error("save_graph: write failed for " + path);
}

inline Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_graph: cannot open " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "rsftrace-graph" || version != 1)
        throw std::runtime_error("load_graph: " + path + " is not a graph cache file");
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw std::runtime_error("load_graph: bad header in " + path);
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        unsigned long long u, v;
        double w;
        if (!(in >> u >> v >> w)) throw std::runtime_error("load_graph: truncated " + path);
        edges.push_back({static_cast<node_t>(u), static_cast<node_t>(v), w});
    }
    return Graph::from_edge_list(edges, n);
}

inline void save_id_map(const std::vector<long long>& ids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_id_map: cannot open " + path);
    out << "# dense_id original_id\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << i << ' ' << ids[i] << '\n';
}

} // namespace rsf
