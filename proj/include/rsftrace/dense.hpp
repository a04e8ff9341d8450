#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "rsftrace/graph.hpp"

namespace rsf {

inline Eigen::MatrixXd dense_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (node_t i = 0; i < g.node_count(); ++i) {
        L(i, i) = g.degree(i);
        auto nbr = g.neighbors(i);
        auto w = g.weights(i);
        for (std::size_t t = 0; t < nbr.size(); ++t) L(i, nbr[t]) = -w[t];
    }
    return L;
}

struct DenseReference {
    Eigen::MatrixXd smoother;  // K = q (L + qI)^-1
    double trace = 0.0;
};

// Exact smoother and trace by dense Cholesky; intended for small graphs.
inline DenseReference dense_reference(const Graph& g, double q, std::size_t dense_limit = 2000) {
    if (g.node_count() > dense_limit)
        throw std::invalid_argument("dense_reference: graph exceeds the dense limit");
    if (!(q > 0.0)) throw std::invalid_argument("dense_reference: q must be positive");
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd A = dense_laplacian(g);
    A.diagonal().array() += q;
    DenseReference ref;
    ref.smoother = Eigen::LLT<Eigen::MatrixXd>(A).solve(
        Eigen::MatrixXd::Identity(n, n) * q);
    ref.trace = ref.smoother.trace();
    return ref;
}

// Laplacian spectrum, ascending. tr(K) = sum q / (q + lambda_i), so one
// decomposition serves every q.
inline Eigen::VectorXd laplacian_eigenvalues(const Graph& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double trace_from_eigenvalues(const Eigen::VectorXd& evals, double q) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) acc += q / (q + std::max(evals[i], 0.0));
    return acc;
}

} // namespace rsf
