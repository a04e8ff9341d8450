#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsftrace/graph.hpp"

namespace rsf {

struct CgResult {
    std::vector<double> x;
    double rel_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // preconditioned norms sqrt(r' M^-1 r)
};

// Jacobi-preconditioned conjugate gradient for (L + qI) x = b, O(m) per
// iteration. Stops when ||r|| <= tol * ||b||; on hitting max_iter the best
// iterate is returned with converged == false.
inline CgResult solve_shifted(const Graph& g, double q, std::span<const double> b,
                              double tol = 1e-8, std::size_t max_iter = 0) {
    if (!(q > 0.0)) throw std::invalid_argument("solve_shifted: q must be positive");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("solve_shifted: tol in (0, 1)");
    const std::size_t n = g.node_count();
    if (b.size() != n) throw std::invalid_argument("solve_shifted: rhs length != node count");
    if (max_iter == 0) max_iter = 10 * n + 100;

    auto dot = [](std::span<const double> u, std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };

    CgResult res;
    res.x.assign(n, 0.0);
    std::vector<double> r(b.begin(), b.end());  // r = b - A*0
    std::vector<double> z(n), p(n), ap(n);

    const double bnorm = std::sqrt(dot(r, r));
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / (q + g.degree(static_cast<node_t>(i)));
    p = z;
    double rz = dot(r, z);
    res.residual_history.push_back(std::sqrt(rz));

    double best_rel = 1.0;
    std::vector<double> best_x = res.x;
    for (std::size_t it = 0; it < max_iter; ++it) {
        g.laplacian_apply(p, ap);
        for (std::size_t i = 0; i < n; ++i) ap[i] += q * p[i];
        const double pap = dot(p, ap);
        if (pap <= 0.0) break;  // cannot happen for q > 0 except through rounding
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ++res.iterations;
        const double rel = std::sqrt(dot(r, r)) / bnorm;
        if (rel < best_rel) {
            best_rel = rel;
            best_x = res.x;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / (q + g.degree(static_cast<node_t>(i)));
        const double rz_next = dot(r, z);
        res.residual_history.push_back(std::sqrt(rz_next));
        if (rel <= tol) {
            res.converged = true;
            res.rel_residual = rel;
            return res;
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res.x = std::move(best_x);
    res.rel_residual = best_rel;
    res.converged = false;
    return res;
}

} // namespace rsf
