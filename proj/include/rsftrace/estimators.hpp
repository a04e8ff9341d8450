#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rsftrace/estimate_run.hpp"
#include "rsftrace/forest.hpp"
#include "rsftrace/graph.hpp"

namespace rsf {

// guarantees variance reduction for the matrix estimators
inline double alpha_safe(const Graph& g, double q) { return 2.0 * q / (q + g.max_degree()); }

// usually a good estimate of the optimal coefficient
inline double alpha_heuristic(const Graph& g, double q) { return q / (q + g.avg_degree()); }

struct AlphaPolicy {
    enum class Kind { safe, heuristic, fixed };
    Kind kind = Kind::heuristic;
    double value = 0.0;

    static AlphaPolicy safe() { return {Kind::safe, 0.0}; }
    static AlphaPolicy heuristic() { return {Kind::heuristic, 0.0}; }
    static AlphaPolicy fixed(double alpha) { return {Kind::fixed, alpha}; }

    // evaluated once per (graph, q), not per sample
    double resolve(const Graph& g, double q) const {
        switch (kind) {
            case Kind::safe: return alpha_safe(g, q);
            case Kind::heuristic: return alpha_heuristic(g, q);
            case Kind::fixed: return value;
        }
        return value;
    }
};

enum class CvVariant { tilde, bar };

// c_tilde = n - |roots| - (1/q) * sum over roots i, neighbors j of
//           w(i,j) [root_of(j) != i]; touches only the roots' adjacencies.
inline double control_variate_tilde(const Graph& g, const ForestSample& f, double q,
                                    std::size_t* scanned = nullptr) {
    double boundary = 0.0;
    std::size_t visits = 0;
    for (node_t r : f.roots) {
        auto nbr = g.neighbors(r);
        auto w = g.weights(r);
        for (std::size_t t = 0; t < nbr.size(); ++t) {
            ++visits;
            if (f.root_of[nbr[t]] != r) boundary += w[t];
        }
    }
    if (scanned) *scanned = visits;
    return static_cast<double>(g.node_count()) - static_cast<double>(f.root_count()) -
           boundary / q;
}

// c_bar = n - |roots| - (1/q) * sum over all i, neighbors j of
//         w(i,j) [tree(j) != tree(i)] / |tree(i)|; touches every edge twice.
inline double control_variate_bar(const Graph& g, const ForestSample& f, double q,
                                  std::size_t* scanned = nullptr) {
    const std::size_t n = g.node_count();
    double weighted_cut = 0.0;
    std::size_t visits = 0;
    for (node_t i = 0; i < n; ++i) {
        const double inv_size = 1.0 / static_cast<double>(f.tree_sizes[f.tree_id[i]]);
        auto nbr = g.neighbors(i);
        auto w = g.weights(i);
        for (std::size_t t = 0; t < nbr.size(); ++t) {
            ++visits;
            if (f.tree_id[nbr[t]] != f.tree_id[i]) weighted_cut += inv_size * w[t];
        }
    }
    if (scanned) *scanned = visits;
    return static_cast<double>(n) - static_cast<double>(f.root_count()) - weighted_cut / q;
}

// Both control variates and the combined estimators for one forest draw.
// The combined values default to roots + alpha * c; sign = -1 recovers the
// flipped convention (cv_sign in the CLI).
struct CvSample {
    std::size_t roots = 0;
    double c_tilde = 0.0;
    double c_bar = 0.0;
    double s_tilde = 0.0;
    double s_bar = 0.0;
    double alpha = 0.0;
    std::size_t scanned_tilde = 0;  // adjacency entries read for c_tilde
    std::size_t scanned_bar = 0;    // adjacency entries read for c_bar
};

inline CvSample cv_sample(const Graph& g, const ForestSample& f, double q, double alpha,
                          int sign = +1) {
    if (f.node_count() != g.node_count())
        throw std::invalid_argument("cv_sample: forest drawn from a different graph");
    CvSample s;
    s.roots = f.root_count();
    s.alpha = alpha;
    s.c_tilde = control_variate_tilde(g, f, q, &s.scanned_tilde);
    s.c_bar = control_variate_bar(g, f, q, &s.scanned_bar);
    const double a = sign >= 0 ? alpha : -alpha;
    s.s_tilde = static_cast<double>(s.roots) + a * s.c_tilde;
    s.s_bar = static_cast<double>(s.roots) + a * s.c_bar;
    return s;
}

// plain root-count estimator of tr(q (L + qI)^-1)
inline EstimateRun estimate_basic(const Graph& g, double q, std::size_t n_samples,
                                  std::uint64_t seed, unsigned threads = 1) {
    return detail::run_mc("basic", n_samples, seed, threads, [&] {
        return [&g, q, sampler = ForestSampler(g), f = ForestSample{}](
                   std::size_t, std::mt19937_64& rng) mutable {
            sampler.sample_into(f, q, rng);
            return static_cast<double>(f.root_count());
        };
    });
}

inline EstimateRun estimate_cv(const Graph& g, double q, std::size_t n_samples,
                               AlphaPolicy policy, CvVariant variant, std::uint64_t seed,
                               unsigned threads = 1, int sign = +1) {
    const double alpha = policy.resolve(g, q);
    const double a = sign >= 0 ? alpha : -alpha;
    const char* name = variant == CvVariant::tilde ? "cv_tilde" : "cv_bar";
    return detail::run_mc(name, n_samples, seed, threads, [&g, q, a, variant] {
        return [&g, q, a, variant, sampler = ForestSampler(g), f = ForestSample{}](
                   std::size_t, std::mt19937_64& rng) mutable {
            sampler.sample_into(f, q, rng);
            const double c = variant == CvVariant::tilde ? control_variate_tilde(g, f, q)
                                                         : control_variate_bar(g, f, q);
            return static_cast<double>(f.root_count()) + a * c;
        };
    });
}

} // namespace rsf
