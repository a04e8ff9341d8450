#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsftrace/baselines.hpp"
#include "rsftrace/dense.hpp"
#include "rsftrace/estimators.hpp"
#include "rsftrace/generators.hpp"
#include "rsftrace/graph_io.hpp"
#include "rsftrace/stratified.hpp"

namespace rsf {

// ---------------------------------------------------------------------------
// effective runtime: time to reach relative error epsilon
// ---------------------------------------------------------------------------

struct EffectiveRuntime {
    std::size_t k = 1;       // samples needed for relative error epsilon
    double seconds = 0.0;    // k * t_per_sample
    bool zero_variance = false;
};

// sigma_1 = sqrt(N) * stderr; k solves epsilon = sigma_1 / (trace_ref sqrt(k)).
inline EffectiveRuntime effective_runtime(const EstimateRun& run, double trace_ref,
                                          double epsilon) {
    if (!(trace_ref > 0.0)) throw std::invalid_argument("effective_runtime: trace_ref > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("effective_runtime: epsilon > 0");
    EffectiveRuntime out;
    const double sigma1 = run.sigma1();
    if (sigma1 == 0.0) {
        out.k = 1;  // deterministic estimator
        out.zero_variance = true;
    } else {
        const double ratio = sigma1 / (epsilon * trace_ref);
        const double k_real = std::ceil(ratio * ratio);
        if (k_real >= 9e18)
            throw std::runtime_error("effective_runtime: iteration count overflows");
        out.k = static_cast<std::size_t>(k_real);
        if (out.k < 1) out.k = 1;
    }
    out.seconds = static_cast<double>(out.k) * run.t_per_sample;
    return out;
}

// ---------------------------------------------------------------------------
// q selection: tr(K)/n is strictly increasing in q
// ---------------------------------------------------------------------------

// Bisection on log q until |tr(K)/n - target| <= tol, exact through the
// Laplacian spectrum for graphs up to dense_limit nodes and Monte Carlo
// (probe_samples root-count draws per point) beyond.
inline double find_q_for_ratio(const Graph& g, double target, double tol = 0.02,
                               std::uint64_t seed = 0, std::size_t probe_samples = 64,
                               std::size_t dense_limit = 2000) {
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("find_q_for_ratio: target in (0, 1)");
    const double davg = g.avg_degree();
    if (davg <= 0.0)
        throw std::runtime_error("find_q_for_ratio: ratio is 1 for every q on an edgeless graph");
    const double n = static_cast<double>(g.node_count());

    std::optional<Eigen::VectorXd> evals;
    if (g.node_count() <= dense_limit) evals = laplacian_eigenvalues(g);
    std::uint64_t probe_counter = 0;
    auto ratio_at = [&](double q) {
        if (evals) return trace_from_eigenvalues(*evals, q) / n;
        return estimate_basic(g, q, probe_samples, mix_seed(seed, ++probe_counter)).mean / n;
    };

    double lo = 1e-6 * davg, hi = 1e6 * davg;
    // tr(K)/n decreases to (#components)/n as q -> 0, so targets at or below
    // that limit are unreachable; the upper endpoint is cheap to evaluate
    // directly (huge q absorbs walks immediately).
    const double floor_ratio =
        static_cast<double>(connected_components_count(g)) / n;
    if (target <= floor_ratio || ratio_at(hi) < target)
        throw std::runtime_error("find_q_for_ratio: target ratio unreachable within bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double r = ratio_at(mid);
        if (std::abs(r - target) <= tol) return mid;
        (r < target ? lo : hi) = mid;
    }
    throw std::runtime_error("find_q_for_ratio: bracket exhausted without reaching the target");
}

// ---------------------------------------------------------------------------
// methods
// ---------------------------------------------------------------------------

enum class Method { basic, cv_tilde, cv_bar, stratified, hutchinson_cg, girard_cg };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::basic: return "basic";
        case Method::cv_tilde: return "cv_tilde";
        case Method::cv_bar: return "cv_bar";
        case Method::stratified: return "stratified";
        case Method::hutchinson_cg: return "hutchinson_cg";
        case Method::girard_cg: return "girard_cg";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "basic") return Method::basic;
    if (s == "cv_tilde") return Method::cv_tilde;
    if (s == "cv_bar") return Method::cv_bar;
    if (s == "stratified") return Method::stratified;
    if (s == "hutchinson_cg") return Method::hutchinson_cg;
    if (s == "girard_cg") return Method::girard_cg;
    throw std::invalid_argument("unknown method '" + s + "'");
}

struct MethodParams {
    std::size_t samples = 100;
    std::size_t strata = 5;
    AlphaPolicy alpha = AlphaPolicy::heuristic();
    int cv_sign = +1;
    double probe_tol = 1e-8;
    unsigned threads = 1;
    std::size_t exact_threshold = 4096;  // strata model switch
};

inline EstimateRun run_method(const Graph& g, double q, Method m, std::uint64_t seed,
                              const MethodParams& p) {
    switch (m) {
        case Method::basic:
            return estimate_basic(g, q, p.samples, seed, p.threads);
        case Method::cv_tilde:
            return estimate_cv(g, q, p.samples, p.alpha, CvVariant::tilde, seed, p.threads,
                               p.cv_sign);
        case Method::cv_bar:
            return estimate_cv(g, q, p.samples, p.alpha, CvVariant::bar, seed, p.threads,
                               p.cv_sign);
        case Method::stratified: {
            const auto plan = build_strata(g, q, p.strata, p.samples, p.exact_threshold);
            return estimate_stratified(g, q, plan, seed, p.threads);
        }
        case Method::hutchinson_cg:
        case Method::girard_cg: {
            ProbeConfig cfg;
            cfg.kind = m == Method::hutchinson_cg ? ProbeKind::rademacher : ProbeKind::gaussian;
            cfg.probes = p.samples;
            cfg.tol = p.probe_tol;
            return estimate_probe(g, q, cfg, seed, p.threads);
        }
    }
    throw std::logic_error("run_method: unreachable");
}

// ---------------------------------------------------------------------------
// graph specs ("ba:n=10000,k=10", "grid3:side=50", "snap:data/foo.txt", ...)
// ---------------------------------------------------------------------------

struct GraphSpec {
    std::string name;  // display name; defaults to the type tag
    std::string type;  // ba | kreg | grid3 | grid2 | path | star | complete | snap | file
    std::size_t n = 0, k = 0, side = 0, rows = 0, cols = 0, leaves = 0;
    bool periodic = true;
    std::string path;
    std::vector<GraphSpec> surrogate;  // at most one; stands in for a missing dataset
};

inline GraphSpec parse_graph_spec(const std::string& text) {
    GraphSpec s;
    const auto colon = text.find(':');
    s.type = text.substr(0, colon);
    s.name = s.type;
    if (s.type == "snap" || s.type == "file") {
        if (colon == std::string::npos || colon + 1 >= text.size())
            throw std::invalid_argument("graph spec '" + text + "': missing path");
        s.path = text.substr(colon + 1);
        return s;
    }
    std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
        auto next = rest.find(',', pos);
        if (next == std::string::npos) next = rest.size();
        const std::string item = rest.substr(pos, next - pos);
        pos = next + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("graph spec item '" + item + "': expected key=value");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "n") s.n = std::stoull(val);
        else if (key == "k") s.k = std::stoull(val);
        else if (key == "side") s.side = std::stoull(val);
        else if (key == "rows") s.rows = std::stoull(val);
        else if (key == "cols") s.cols = std::stoull(val);
        else if (key == "leaves") s.leaves = std::stoull(val);
        else if (key == "periodic") s.periodic = val == "1" || val == "true";
        else throw std::invalid_argument("graph spec: unknown key '" + key + "'");
    }
    return s;
}

// Applies the size scale while preserving the family: linear in n for the
// random families, per-axis for lattices. Dataset files load as-is at scale 1
// and fall back to their surrogate spec otherwise (or when the file is
// missing). `note` receives a human-readable remark when a substitution
// happened.
inline Graph realize_graph(const GraphSpec& s, double scale, std::uint64_t seed,
                           std::string* note = nullptr) {
    auto scaled = [scale](std::size_t v, double exponent) {
        const double f = std::pow(scale, exponent);
        return static_cast<std::size_t>(std::llround(static_cast<double>(v) * f));
    };
    if (s.type == "ba") {
        std::size_t n = std::max<std::size_t>(s.k + 1, scaled(s.n, 1.0));
        return gen_barabasi_albert(n, s.k, seed);
    }
    if (s.type == "kreg") {
        std::size_t n = std::max<std::size_t>(s.k + 1, scaled(s.n, 1.0));
        if ((n * s.k) % 2 != 0) ++n;
        return gen_k_regular(n, s.k, seed);
    }
    if (s.type == "grid3") {
        std::size_t side = std::max<std::size_t>(2, scaled(s.side, 1.0 / 3.0));
        return gen_grid3d(side, s.periodic);
    }
    if (s.type == "grid2") {
        std::size_t rows = std::max<std::size_t>(2, scaled(s.rows, 0.5));
        std::size_t cols = std::max<std::size_t>(2, scaled(s.cols, 0.5));
        return gen_grid2d(rows, cols, s.periodic);
    }
    if (s.type == "path") return gen_path(std::max<std::size_t>(1, scaled(s.n, 1.0)));
    if (s.type == "star") return gen_star(std::max<std::size_t>(1, scaled(s.leaves, 1.0)));
    if (s.type == "complete") {
        const std::size_t n = std::max<std::size_t>(2, scaled(s.n, 1.0));
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                edges.push_back({static_cast<node_t>(i), static_cast<node_t>(j), 1.0});
        return Graph::from_edge_list(edges, n);
    }
    if (s.type == "file") return load_graph(s.path);
    if (s.type == "snap") {
        const bool present = std::filesystem::exists(s.path);
        if (present && scale == 1.0) return load_snap(s.path);
        if (!s.surrogate.empty()) {
            if (note)
                *note = "dataset '" + s.path + (present ? "' not usable at scale != 1"
                                                        : "' not found") +
                        "; using surrogate generator";
            return realize_graph(s.surrogate.front(), scale, seed, nullptr);
        }
        if (present) {
            if (note) *note = "no surrogate for '" + s.path + "'; loading at full size";
            return load_snap(s.path);
        }
        throw std::runtime_error("dataset '" + s.path + "' not found and no surrogate given");
    }
    throw std::invalid_argument("unknown graph type '" + s.type + "'");
}

// ---------------------------------------------------------------------------
// benchmark configuration (JSON file + programmatic)
// ---------------------------------------------------------------------------

struct BenchConfig {
    std::uint64_t seed = 1;
    std::size_t samples = 100;
    double epsilon = 0.002;
    double scale = 1.0;
    std::size_t q_count = 8;
    double ratio_min = 0.05;
    double ratio_max = 0.65;
    double ratio_tol = 0.02;
    std::vector<double> q_values;  // explicit q grid; overrides the ratio range
    std::vector<Method> methods = {Method::basic, Method::cv_tilde, Method::cv_bar,
                                   Method::stratified, Method::hutchinson_cg};
    std::size_t strata = 5;
    AlphaPolicy alpha = AlphaPolicy::heuristic();
    int cv_sign = +1;
    unsigned threads = 1;
    double probe_tol = 1e-8;
    std::size_t dense_limit = 2000;
    std::size_t ref_samples = 20000;  // CV-bar reference above dense_limit
    std::vector<GraphSpec> graphs;
};

namespace detail {

inline GraphSpec graph_spec_from_json(const nlohmann::json& j) {
    GraphSpec s;
    s.type = j.at("type").get<std::string>();
    s.name = j.value("name", s.type);
    s.n = j.value("n", 0ull);
    s.k = j.value("k", 0ull);
    s.side = j.value("side", 0ull);
    s.rows = j.value("rows", 0ull);
    s.cols = j.value("cols", 0ull);
    s.leaves = j.value("leaves", 0ull);
    s.periodic = j.value("periodic", true);
    s.path = j.value("path", std::string{});
    if (j.contains("surrogate")) s.surrogate.push_back(graph_spec_from_json(j.at("surrogate")));
    return s;
}

inline AlphaPolicy alpha_policy_from_string(const std::string& text) {
    if (text == "safe") return AlphaPolicy::safe();
    if (text == "heuristic") return AlphaPolicy::heuristic();
    if (text.rfind("fixed:", 0) == 0) return AlphaPolicy::fixed(std::stod(text.substr(6)));
    throw std::invalid_argument("alpha policy '" + text + "': expected safe|heuristic|fixed:X");
}

} // namespace detail

inline BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    nlohmann::json j;
    in >> j;
    BenchConfig c;
    c.seed = j.value("seed", c.seed);
    c.samples = j.value("samples", c.samples);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.scale = j.value("scale", c.scale);
    c.q_count = j.value("q_count", c.q_count);
    c.ratio_min = j.value("ratio_min", c.ratio_min);
    c.ratio_max = j.value("ratio_max", c.ratio_max);
    c.ratio_tol = j.value("ratio_tol", c.ratio_tol);
    if (j.contains("q_values")) c.q_values = j.at("q_values").get<std::vector<double>>();
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m));
    }
    c.strata = j.value("strata", c.strata);
    if (j.contains("alpha_policy"))
        c.alpha = detail::alpha_policy_from_string(j.at("alpha_policy").get<std::string>());
    c.cv_sign = j.value("cv_sign", c.cv_sign);
    c.threads = j.value("threads", c.threads);
    c.probe_tol = j.value("probe_tol", c.probe_tol);
    c.dense_limit = j.value("dense_limit", c.dense_limit);
    c.ref_samples = j.value("ref_samples", c.ref_samples);
    if (!j.contains("graphs")) throw std::runtime_error("config " + path + ": no graphs listed");
    for (const auto& gj : j.at("graphs")) c.graphs.push_back(detail::graph_spec_from_json(gj));
    return c;
}

// ---------------------------------------------------------------------------
// CSV benchmark driver
// ---------------------------------------------------------------------------

inline const char* bench_csv_header() {
    return "graph,n,m,q,ratio,method,mean,stderr,t_per_sample,k,effective_runtime_s,seed,"
           "threads,trace_ref_stderr,error";
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_sanitize(std::string text) {
    for (char& ch : text)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return text;
}

} // namespace detail

// Runs every (graph, q, method) cell and streams CSV rows. Timing columns
// (t_per_sample, effective_runtime_s) vary run to run; everything else is a
// deterministic function of the configuration. Returns the number of failed
// cells; failures land in the `error` column and the run continues.
inline std::size_t run_benchmark(const BenchConfig& cfg, std::ostream& csv,
                                 std::ostream& log) {
    csv << bench_csv_header() << '\n';
    std::size_t failures = 0;
    std::uint64_t cell = 0;

    MethodParams params;
    params.samples = cfg.samples;
    params.strata = cfg.strata;
    params.alpha = cfg.alpha;
    params.cv_sign = cfg.cv_sign;
    params.probe_tol = cfg.probe_tol;
    params.threads = cfg.threads;

    auto emit_error = [&](const std::string& graph_name, double q, const std::string& what) {
        csv << detail::csv_sanitize(graph_name) << ",0,0," << detail::csv_num(q)
            << ",nan,,nan,nan,nan,0,nan," << cfg.seed << ',' << cfg.threads << ",nan,"
            << detail::csv_sanitize(what) << '\n';
        ++failures;
    };

    for (std::size_t gi = 0; gi < cfg.graphs.size(); ++gi) {
        const GraphSpec& spec = cfg.graphs[gi];
        Graph g;
        std::string note;
        try {
            g = realize_graph(spec, cfg.scale, mix_seed(cfg.seed, 1000 + gi), &note);
        } catch (const std::exception& e) {
            log << "[bench] graph '" << spec.name << "' failed: " << e.what() << '\n';
            emit_error(spec.name, 0.0, e.what());
            continue;
        }
        if (!note.empty()) log << "[bench] " << spec.name << ": " << note << '\n';
        log << "[bench] " << spec.name << ": n=" << g.node_count() << " m=" << g.edge_count()
            << '\n';

        std::vector<double> qs = cfg.q_values;
        std::optional<Eigen::VectorXd> evals;
        if (g.node_count() <= cfg.dense_limit) evals = laplacian_eigenvalues(g);
        if (qs.empty()) {
            try {
                const double q_lo = find_q_for_ratio(g, cfg.ratio_min, cfg.ratio_tol,
                                                     mix_seed(cfg.seed, 2000 + gi), 64,
                                                     cfg.dense_limit);
                const double q_hi = find_q_for_ratio(g, cfg.ratio_max, cfg.ratio_tol,
                                                     mix_seed(cfg.seed, 3000 + gi), 64,
                                                     cfg.dense_limit);
                if (cfg.q_count == 1) {
                    qs.push_back(q_hi);
                } else {
                    const double step = std::log(q_hi / q_lo) /
                                        static_cast<double>(cfg.q_count - 1);
                    for (std::size_t i = 0; i < cfg.q_count; ++i)
                        qs.push_back(q_lo * std::exp(step * static_cast<double>(i)));
                }
            } catch (const std::exception& e) {
                log << "[bench] q grid for '" << spec.name << "' failed: " << e.what() << '\n';
                emit_error(spec.name, 0.0, e.what());
                continue;
            }
        }

        for (double q : qs) {
            double trace_ref = 0.0, ref_stderr = 0.0;
            try {
                if (evals) {
                    trace_ref = trace_from_eigenvalues(*evals, q);
                } else {
                    const auto ref = estimate_cv(g, q, cfg.ref_samples, cfg.alpha,
                                                 CvVariant::bar, mix_seed(cfg.seed, ++cell),
                                                 cfg.threads, cfg.cv_sign);
                    trace_ref = ref.mean;
                    ref_stderr = ref.stderr_of_mean();
                    log << "[bench] " << spec.name << " q=" << q
                        << ": estimated reference trace " << trace_ref << " +- " << ref_stderr
                        << '\n';
                }
            } catch (const std::exception& e) {
                emit_error(spec.name, q, std::string("trace reference: ") + e.what());
                continue;
            }
            const double ratio = trace_ref / static_cast<double>(g.node_count());

            for (Method m : cfg.methods) {
                const std::uint64_t cell_seed = mix_seed(cfg.seed, ++cell);
                try {
                    if (m == Method::stratified) {
                        // sigma_N = sigma_1 / sqrt(N) needs proportional allocation
                        const auto plan = build_strata(g, q, params.strata, params.samples,
                                                       params.exact_threshold);
                        if (!plan.proportional)
                            throw std::runtime_error(
                                "effective runtime undefined for non-proportional allocation");
                    }
                    const EstimateRun run = run_method(g, q, m, cell_seed, params);
                    const EffectiveRuntime er = effective_runtime(run, trace_ref, cfg.epsilon);
                    csv << detail::csv_sanitize(spec.name) << ',' << g.node_count() << ','
                        << g.edge_count() << ',' << detail::csv_num(q) << ','
                        << detail::csv_num(ratio) << ',' << to_string(m) << ','
                        << detail::csv_num(run.mean) << ','
                        << detail::csv_num(run.stderr_of_mean()) << ','
                        << detail::csv_num(run.t_per_sample) << ',' << er.k << ','
                        << detail::csv_num(er.seconds) << ',' << cell_seed << ','
                        << cfg.threads << ',' << detail::csv_num(ref_stderr) << ",\n";
                } catch (const std::exception& e) {
                    log << "[bench] cell (" << spec.name << ", q=" << q << ", "
                        << to_string(m) << ") failed: " << e.what() << '\n';
                    csv << detail::csv_sanitize(spec.name) << ',' << g.node_count() << ','
                        << g.edge_count() << ',' << detail::csv_num(q) << ','
                        << detail::csv_num(ratio) << ',' << to_string(m)
                        << ",nan,nan,nan,0,nan," << cell_seed << ',' << cfg.threads << ','
                        << detail::csv_num(ref_stderr) << ','
                        << detail::csv_sanitize(e.what()) << '\n';
                    ++failures;
                }
            }
        }
    }
    return failures;
}

} // namespace rsf
