// Side-by-side run of every estimator on one graph and q, printing means,
// standard errors and per-sample cost.

#include <iostream>

#include "rsftrace/bench.hpp"

int main() {
    const rsf::Graph g = rsf::gen_barabasi_albert(2000, 10, /*seed=*/3);
    const double q = rsf::find_q_for_ratio(g, 0.3);
    const double trace = rsf::trace_from_eigenvalues(rsf::laplacian_eigenvalues(g), q);
    std::cout << "n=" << g.node_count() << " m=" << g.edge_count() << " q=" << q
              << " tr(K)=" << trace << "\n\n";

    rsf::MethodParams params;
    params.samples = 500;
    std::cout << "method\tmean\tstderr\tt_per_sample_s\n";
    for (auto m : {rsf::Method::basic, rsf::Method::cv_tilde, rsf::Method::cv_bar,
                   rsf::Method::stratified, rsf::Method::hutchinson_cg}) {
        const auto run = rsf::run_method(g, q, m, /*seed=*/11, params);
        std::cout << run.method << '\t' << run.mean << '\t' << run.stderr_of_mean() << '\t'
                  << run.t_per_sample << '\n';
    }
    return 0;
}
