#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsftrace/estimate_run.hpp"
#include "rsftrace/graph.hpp"
#include "rsftrace/solver.hpp"

namespace rsf {

enum class ProbeKind { rademacher, gaussian };

struct ProbeConfig {
    ProbeKind kind = ProbeKind::rademacher;
    std::size_t probes = 100;
    double tol = 1e-8;        // relative residual of each linear solve
    std::size_t max_iter = 0; // 0 = solver default
};

// Probe-based trace estimator: averages a' K a = q * a' (L + qI)^-1 a over
// random probes (Rademacher or Gaussian). Solver failures propagate.
inline EstimateRun estimate_probe(const Graph& g, double q, const ProbeConfig& cfg,
                                  std::uint64_t seed, unsigned threads = 1) {
    if (cfg.probes < 1) throw std::invalid_argument("estimate_probe: need at least one probe");
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0))
        throw std::invalid_argument("estimate_probe: tol in (0, 1)");
    const char* name = cfg.kind == ProbeKind::rademacher ? "hutchinson_cg" : "girard_cg";
    const std::size_t n = g.node_count();
    return detail::run_mc(name, cfg.probes, seed, threads, [&g, q, cfg, n] {
        return [&g, q, cfg, n, a = std::vector<double>(n)](std::size_t,
                                                           std::mt19937_64& rng) mutable {
            if (cfg.kind == ProbeKind::rademacher) {
                std::bernoulli_distribution coin(0.5);
                for (auto& v : a) v = coin(rng) ? 1.0 : -1.0;
            } else {
                std::normal_distribution<double> gauss(0.0, 1.0);
                for (auto& v : a) v = gauss(rng);
            }
            const CgResult sol = solve_shifted(g, q, a, cfg.tol, cfg.max_iter);
            if (!sol.converged)
                throw std::runtime_error("estimate_probe: solver did not reach tolerance");
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += a[i] * sol.x[i];
            return q * acc;
        };
    });
}

// Tikhonov smoother x = q (L + qI)^-1 y.
inline std::vector<double> smooth(const Graph& g, double q, std::span<const double> y,
                                  double tol = 1e-8) {
    CgResult sol = solve_shifted(g, q, y, tol);
    if (!sol.converged) throw std::runtime_error("smooth: solver did not reach tolerance");
    for (double& v : sol.x) v *= q;
    return std::move(sol.x);
}

} // namespace rsf
