// Command-line front end: graph generation/caching, single estimates, the
// CSV benchmark harness, and exact references on tiny graphs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rsftrace/rsftrace.hpp"

namespace {

rsf::Graph make_graph(const std::string& spec_text, double scale, std::uint64_t seed,
                      std::vector<long long>* ids = nullptr) {
    const auto spec = rsf::parse_graph_spec(spec_text);
    if (spec.type == "snap" && ids != nullptr && scale == 1.0) return rsf::load_snap(spec.path, ids);
    std::string note;
    rsf::Graph g = rsf::realize_graph(spec, scale, seed, &note);
    if (!note.empty()) std::cerr << "[gen] " << note << '\n';
    return g;
}

rsf::AlphaPolicy parse_alpha(const std::string& text) {
    return rsf::detail::alpha_policy_from_string(text);
}

int cmd_gen(const std::string& graph_spec, std::uint64_t seed, double scale,
            const std::string& out) {
    std::vector<long long> ids;
    const rsf::Graph g = make_graph(graph_spec, scale, seed, &ids);
    std::cerr << "[gen] n=" << g.node_count() << " m=" << g.edge_count()
              << " d_max=" << g.max_degree() << " d_avg=" << g.avg_degree() << '\n';
    if (!out.empty()) {
        rsf::save_graph(g, out);
        if (!ids.empty()) rsf::save_id_map(ids, out + ".ids");
        std::cerr << "[gen] wrote " << out << (ids.empty() ? "" : " (+.ids)") << '\n';
    }
    return 0;
}

int cmd_estimate(const std::string& graph_spec, double q, double ratio,
                 const std::string& method_name, const rsf::MethodParams& params,
                 std::uint64_t seed, double scale, const std::string& out) {
    const rsf::Graph g = make_graph(graph_spec, scale, rsf::mix_seed(seed, 1));
    if (q <= 0.0) {
        q = rsf::find_q_for_ratio(g, ratio, 0.02, rsf::mix_seed(seed, 2));
        std::cerr << "[estimate] ratio " << ratio << " -> q = " << q << '\n';
    }
    const rsf::Method method = rsf::method_from_string(method_name);
    const rsf::EstimateRun run = rsf::run_method(g, q, method, seed, params);

    std::ostringstream text;
    text << "graph: " << graph_spec << "\nn: " << g.node_count() << "\nm: " << g.edge_count()
         << "\nq: " << q << "\nmethod: " << run.method << "\nsamples: " << run.samples
         << "\nmean: " << run.mean << "\nstderr: " << run.stderr_of_mean()
         << "\nsample_variance: " << run.sample_variance
         << "\nt_per_sample_s: " << run.t_per_sample << "\nseed: " << run.seed << '\n';
    std::cout << text.str();
    if (!out.empty()) {
        std::ofstream f(out);
        f << text.str();
    }
    return 0;
}

int cmd_oracle(const std::string& graph_spec, double q, double alpha_opt) {
    const rsf::Graph g = make_graph(graph_spec, 1.0, 1);
    const auto en = rsf::oracle::enumerate_forests(g, q);
    const double alpha = alpha_opt >= 0.0 ? alpha_opt : rsf::alpha_heuristic(g, q);
    const auto stats = rsf::oracle::exact_stats(en, g, q, alpha);
    const auto ref = rsf::dense_reference(g, q);
    std::cout << "n: " << g.node_count() << "\nm: " << g.edge_count() << "\nq: " << q
              << "\nforests: " << en.forests.size()
              << "\npartition_function: " << en.partition_function
              << "\ntrace: " << ref.trace << "\ne_roots: " << stats.e_roots
              << "\nvar_roots: " << stats.var_roots << "\ne_c_tilde: " << stats.e_c_tilde
              << "\ne_c_bar: " << stats.e_c_bar << "\nvar_c_tilde: " << stats.var_c_tilde
              << "\nvar_c_bar: " << stats.var_c_bar
              << "\ncov_roots_c_tilde: " << stats.cov_roots_c_tilde
              << "\ncov_roots_c_bar: " << stats.cov_roots_c_bar
              << "\nalpha: " << alpha << "\nalpha_star_tilde: " << stats.alpha_star_tilde
              << "\nalpha_star_bar: " << stats.alpha_star_bar
              << "\nvar_s_tilde: " << stats.var_s_tilde << "\nvar_s_bar: " << stats.var_s_bar
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-spanning-forest trace estimation for q(L+qI)^-1"};
    app.require_subcommand(1);

    std::string graph_spec, out, config_path, method_name = "basic", alpha_text = "heuristic";
    std::string methods_csv;
    double q = 0.0, ratio = 0.0, scale = 1.0, epsilon = 0.002, alpha_fixed = -1.0;
    std::uint64_t seed = 1;
    std::size_t samples = 100, strata = 5;
    unsigned threads = 1;
    int cv_sign = +1;

    auto* gen = app.add_subcommand("gen", "generate or load a graph and cache it");
    gen->add_option("--graph", graph_spec, "graph spec, e.g. ba:n=10000,k=10 or snap:PATH")
        ->required();
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--scale", scale, "size scale factor");
    gen->add_option("--out", out, "write graph cache here");

    auto* est = app.add_subcommand("estimate", "run one trace estimator");
    est->add_option("--graph", graph_spec, "graph spec")->required();
    est->add_option("--q", q, "regularization strength");
    est->add_option("--ratio", ratio, "pick q so tr(K)/n hits this value");
    est->add_option("--method", method_name,
                    "basic|cv_tilde|cv_bar|stratified|hutchinson_cg|girard_cg");
    est->add_option("--samples", samples, "number of samples/probes");
    est->add_option("--strata", strata, "stratum count for stratified");
    est->add_option("--alpha-policy", alpha_text, "safe|heuristic|fixed:X");
    est->add_option("--cv-sign", cv_sign, "+1 combines roots + alpha*c, -1 flips it");
    est->add_option("--seed", seed, "rng seed");
    est->add_option("--scale", scale, "size scale factor");
    est->add_option("--threads", threads, "sample-parallel workers");
    est->add_option("--out", out, "also write the report here");

    auto* bench = app.add_subcommand("bench", "effective-runtime benchmark -> CSV");
    bench->add_option("--config", config_path, "JSON benchmark config")->required();
    bench->add_option("--scale", scale, "shrink every family, preserving its shape");
    bench->add_option("--samples", samples, "samples per cell");
    bench->add_option("--epsilon", epsilon, "relative error target");
    bench->add_option("--seed", seed, "rng seed");
    bench->add_option("--threads", threads, "sample-parallel workers");
    bench->add_option("--methods", methods_csv, "comma-separated method override");
    bench->add_option("--out", out, "CSV path (default stdout)");

    auto* orc = app.add_subcommand("oracle", "exact statistics by enumeration (n <= 7)");
    orc->add_option("--graph", graph_spec, "graph spec")->required();
    orc->add_option("--q", q, "regularization strength")->required();
    orc->add_option("--alpha", alpha_fixed, "report variances at this alpha");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(graph_spec, seed, scale, out);

        if (est->parsed()) {
            if (q <= 0.0 && !(ratio > 0.0 && ratio < 1.0))
                throw std::invalid_argument("estimate: pass --q > 0 or --ratio in (0,1)");
            rsf::MethodParams params;
            params.samples = samples;
            params.strata = strata;
            params.alpha = parse_alpha(alpha_text);
            params.cv_sign = cv_sign;
            params.threads = threads;
            return cmd_estimate(graph_spec, q, ratio, method_name, params, seed, scale, out);
        }

        if (bench->parsed()) {
            rsf::BenchConfig cfg = rsf::load_bench_config(config_path);
            // flags override the file
            for (const auto* opt : {bench->get_option("--scale")})
                if (opt->count()) cfg.scale = scale;
            if (bench->get_option("--samples")->count()) cfg.samples = samples;
            if (bench->get_option("--epsilon")->count()) cfg.epsilon = epsilon;
            if (bench->get_option("--seed")->count()) cfg.seed = seed;
            if (bench->get_option("--threads")->count()) cfg.threads = threads;
            if (!methods_csv.empty()) {
                cfg.methods.clear();
                std::stringstream ss(methods_csv);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) cfg.methods.push_back(rsf::method_from_string(item));
            }
            std::size_t failures = 0;
            if (out.empty()) {
                failures = rsf::run_benchmark(cfg, std::cout, std::cerr);
            } else {
                std::ofstream f(out);
                if (!f) throw std::runtime_error("cannot open " + out);
                failures = rsf::run_benchmark(cfg, f, std::cerr);
            }
            if (failures) std::cerr << "[bench] " << failures << " cell(s) failed\n";
            return failures == 0 ? 0 : 1;
        }

        if (orc->parsed()) return cmd_oracle(graph_spec, q, alpha_fixed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
