#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsftrace/estimate_run.hpp"
#include "rsftrace/estimators.hpp"
#include "rsftrace/forest.hpp"
#include "rsftrace/graph.hpp"

namespace rsf {

// P(i is a first-visit root) = q / (q + d_i)
inline std::vector<double> root_probabilities(const Graph& g, double q) {
    std::vector<double> p(g.node_count());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = q / (q + g.degree(static_cast<node_t>(i)));
    return p;
}

// pmf of a sum of independent Bernoulli(p_i) by iterative convolution;
// O(n^2) time, O(n) space.
inline std::vector<double> poisson_binomial_exact(std::span<const double> probs) {
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("poisson_binomial_exact: probability outside [0, 1]");
    std::vector<double> pmf(probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    std::size_t filled = 0;
    for (double p : probs) {
        ++filled;
        for (std::size_t k = filled; k-- > 0;) {
            pmf[k + 1] += pmf[k] * p;
            pmf[k] *= 1.0 - p;
        }
    }
    return pmf;
}

struct NormalApprox {
    double mu = 0.0;
    double sigma2 = 0.0;
};

// moment-matched normal for the law of the first-visit root count
inline NormalApprox poisson_binomial_normal(const Graph& g, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("poisson_binomial_normal: q must be positive");
    NormalApprox a;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double d = g.degree(static_cast<node_t>(i));
        a.mu += q / (q + d);
        a.sigma2 += q * d / ((q + d) * (q + d));
    }
    return a;
}

inline double normal_cdf(double x, double mu, double sigma) {
    if (sigma <= 0.0) return x < mu ? 0.0 : 1.0;
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

enum class StrataModel { exact_poisson_binomial, normal_approx };

// inclusive integer interval
struct IntInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool contains(std::size_t v) const { return v >= lo && v <= hi; }
};

struct StrataPlan {
    std::vector<IntInterval> strata;   // disjoint, contiguous, exhaustive on {0..n}
    std::vector<double> probs;
    std::vector<std::size_t> alloc;
    StrataModel model = StrataModel::exact_poisson_binomial;
    bool proportional = true;
    std::size_t requested = 0;
    bool reduced = false;  // fewer strata than requested after merging

    std::size_t total_samples() const {
        return std::accumulate(alloc.begin(), alloc.end(), std::size_t{0});
    }
};

// Cut points are the smallest integers b with CDF(b) >= k/K; empty strata
// merge away, probabilities are recomputed for the final strata, and the
// proportional allocation is rounded with a largest-remainder pass keeping
// every stratum at N_k >= 1. The exact pmf is used up to exact_threshold
// nodes, beyond that the continuity-corrected normal; under the normal model
// the outer strata absorb the tails so probabilities still sum to one.
inline StrataPlan build_strata(const Graph& g, double q, std::size_t K, std::size_t N,
                               std::size_t exact_threshold = 4096) {
    if (K < 1) throw std::invalid_argument("build_strata: need K >= 1");
    if (N < K) throw std::invalid_argument("build_strata: need N >= K");
    const std::size_t n = g.node_count();

    StrataPlan plan;
    plan.requested = K;
    plan.model = n <= exact_threshold ? StrataModel::exact_poisson_binomial
                                      : StrataModel::normal_approx;

    std::vector<double> cdf;  // cdf[b] = P(X <= b), b in {0..n}
    if (plan.model == StrataModel::exact_poisson_binomial) {
        const auto pmf = poisson_binomial_exact(root_probabilities(g, q));
        cdf.resize(pmf.size());
        double acc = 0.0;
        for (std::size_t b = 0; b < pmf.size(); ++b) cdf[b] = (acc += pmf[b]);
    } else {
        const auto na = poisson_binomial_normal(g, q);
        const double sigma = std::sqrt(na.sigma2);
        cdf.resize(n + 1);
        for (std::size_t b = 0; b <= n; ++b)
            cdf[b] = normal_cdf(static_cast<double>(b) + 0.5, na.mu, sigma);
    }

    std::vector<std::size_t> cuts;  // upper endpoints, strictly increasing, last == n
    for (std::size_t k = 1; k < K; ++k) {
        const double target = static_cast<double>(k) / static_cast<double>(K);
        std::size_t b = 0;
        while (b < n && cdf[b] < target) ++b;
        if (cuts.empty() || b > cuts.back()) cuts.push_back(b);
    }
    if (cuts.empty() || cuts.back() < n) cuts.push_back(n);
    else cuts.back() = n;

    std::size_t lo = 0;
    for (std::size_t c : cuts) {
        plan.strata.push_back({lo, c});
        const double p_hi = c == n ? 1.0 : cdf[c];
        const double p_lo = lo == 0 ? 0.0 : cdf[lo - 1];
        plan.probs.push_back(p_hi - p_lo);
        lo = c + 1;
    }
    // merge any zero-probability stratum into its successor (or predecessor
    // for the last one)
    for (std::size_t k = 0; k < plan.strata.size();) {
        if (plan.probs[k] > 0.0) {
            ++k;
            continue;
        }
        if (k + 1 < plan.strata.size()) {
            plan.strata[k + 1].lo = plan.strata[k].lo;
            plan.probs[k + 1] += plan.probs[k];
        } else if (k > 0) {
            plan.strata[k - 1].hi = plan.strata[k].hi;
            plan.probs[k - 1] += plan.probs[k];
        } else {
            throw std::runtime_error("build_strata: degenerate distribution");
        }
        plan.strata.erase(plan.strata.begin() + static_cast<std::ptrdiff_t>(k));
        plan.probs.erase(plan.probs.begin() + static_cast<std::ptrdiff_t>(k));
    }
    plan.reduced = plan.strata.size() < K;

    // proportional allocation, largest remainder, every stratum >= 1 sample
    const std::size_t S = plan.strata.size();
    plan.alloc.assign(S, 0);
    std::vector<std::pair<double, std::size_t>> rem(S);
    std::size_t used = 0;
    for (std::size_t k = 0; k < S; ++k) {
        const double exact = static_cast<double>(N) * plan.probs[k];
        plan.alloc[k] = static_cast<std::size_t>(exact);
        used += plan.alloc[k];
        rem[k] = {exact - static_cast<double>(plan.alloc[k]), k};
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; used < N; ++i, ++used) ++plan.alloc[rem[i % S].second];
    for (std::size_t k = 0; k < S; ++k) {
        while (plan.alloc[k] == 0) {
            const std::size_t donor = static_cast<std::size_t>(
                std::max_element(plan.alloc.begin(), plan.alloc.end()) - plan.alloc.begin());
            if (plan.alloc[donor] <= 1)
                throw std::runtime_error("build_strata: cannot give every stratum a sample");
            --plan.alloc[donor];
            ++plan.alloc[k];
        }
    }
    return plan;
}

// Rejection sampling of a first-visit root set conditioned on its size
// falling in `stratum`: independent Bernoulli(q/(q+d_i)) inclusions, retried
// until accepted. stratum_prob only bounds the attempt budget.
inline std::vector<node_t> sample_root_set(const Graph& g, double q, IntInterval stratum,
                                           double stratum_prob, std::mt19937_64& rng) {
    if (!(stratum_prob > 0.0))
        throw std::invalid_argument("sample_root_set: stratum has zero probability");
    const auto probs = root_probabilities(g, q);
    const std::size_t max_attempts = std::max<std::size_t>(
        1000, static_cast<std::size_t>(std::ceil(50.0 / stratum_prob)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<node_t> x;
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        x.clear();
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (unif(rng) < probs[i]) x.push_back(static_cast<node_t>(i));
        if (stratum.contains(x.size())) return x;
    }
    throw std::runtime_error("sample_root_set: rejection budget exhausted; stratum probability " +
                             std::to_string(stratum_prob) + " looks mis-specified");
}

// Stratified root-count estimator. Per stratum k: N_k root sets by rejection,
// forests conditioned on them, stratum means recombined with the stratum
// probabilities. Reported sample_variance is the per-sample equivalent
// N * sum_k p_k^2 var_k / N_k, which matches sigma_1^2 under proportional
// allocation. Per-sample time includes rejection and conditional sampling.
inline EstimateRun estimate_stratified(const Graph& g, double q, const StrataPlan& plan,
                                       std::uint64_t seed, unsigned threads = 1) {
    if (plan.strata.empty()) throw std::invalid_argument("estimate_stratified: empty plan");
    const std::size_t n_total = plan.total_samples();

    struct StratumAccum {
        RunningMoments moments;
        double busy = 0.0;
    };
    const auto probs = root_probabilities(g, q);
    std::vector<StratumAccum> acc(plan.strata.size());
    double busy_total = 0.0;

    std::size_t base = 0;
    for (std::size_t k = 0; k < plan.strata.size(); ++k) {
        const IntInterval stratum = plan.strata[k];
        const double p_k = plan.probs[k];
        // reuse the shared driver inside the stratum; stream index is offset
        // by `base` so the whole run is one global index space
        auto sub = detail::run_mc(
            "stratified", plan.alloc[k], mix_seed(seed, 0x5374726174ull + base), threads,
            [&, stratum, p_k] {
                return [&, stratum, p_k, sampler = ForestSampler(g), f = ForestSample{},
                        x = std::vector<node_t>{}](std::size_t, std::mt19937_64& rng) mutable {
                    const std::size_t max_attempts = std::max<std::size_t>(
                        1000, static_cast<std::size_t>(std::ceil(50.0 / p_k)));
                    std::uniform_real_distribution<double> unif(0.0, 1.0);
                    bool accepted = false;
                    for (std::size_t attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
                        x.clear();
                        for (std::size_t i = 0; i < probs.size(); ++i)
                            if (unif(rng) < probs[i]) x.push_back(static_cast<node_t>(i));
                        accepted = stratum.contains(x.size());
                    }
                    if (!accepted)
                        throw std::runtime_error(
                            "estimate_stratified: rejection budget exhausted in stratum");
                    sampler.sample_conditional_into(f, q, x, rng);
                    return static_cast<double>(f.root_count());
                };
            });
        acc[k].moments.count = sub.samples;
        acc[k].moments.mean = sub.mean;
        acc[k].moments.m2 = sub.sample_variance * static_cast<double>(
                                sub.samples > 1 ? sub.samples - 1 : 0);
        busy_total += sub.t_per_sample * static_cast<double>(sub.samples);
        base += plan.alloc[k];
    }

    double mean = 0.0;
    double var_of_mean = 0.0;
    for (std::size_t k = 0; k < plan.strata.size(); ++k) {
        mean += plan.probs[k] * acc[k].moments.mean;
        if (acc[k].moments.count > 1)
            var_of_mean += plan.probs[k] * plan.probs[k] * acc[k].moments.variance() /
                           static_cast<double>(acc[k].moments.count);
    }

    EstimateRun run;
    run.method = "stratified";
    run.mean = mean;
    run.samples = n_total;
    run.sample_variance = static_cast<double>(n_total) * var_of_mean;
    run.t_per_sample = n_total ? busy_total / static_cast<double>(n_total) : 0.0;
    run.seed = seed;
    return run;
}

} // namespace rsf
