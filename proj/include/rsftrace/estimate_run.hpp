#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "rsftrace/rng.hpp"

namespace rsf {

// Streaming count / mean / M2 accumulator. merge() combines per-thread
// partials without bias.
struct RunningMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    void merge(const RunningMoments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const std::size_t total = count + o.count;
        mean += d * static_cast<double>(o.count) / static_cast<double>(total);
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) /
                         static_cast<double>(total);
        count = total;
    }
    // unbiased sample variance
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

// Outcome of running one estimator for `samples` draws.
//
// `sample_variance` is the single-sample variance sigma_1^2. For stratified
// runs it is the proportional-allocation equivalent N * Var(estimate), so
// sigma1()/stderr_of_mean() mean the same thing for every method.
// `t_per_sample` averages wall time over the counted draws; one warm-up draw
// is excluded.
struct EstimateRun {
    std::string method;
    double mean = 0.0;
    std::size_t samples = 0;
    double sample_variance = 0.0;
    double t_per_sample = 0.0;  // seconds
    std::uint64_t seed = 0;

    double sigma1() const { return std::sqrt(sample_variance); }
    double stderr_of_mean() const {
        return samples ? std::sqrt(sample_variance / static_cast<double>(samples)) : 0.0;
    }
};

namespace detail {

// Shared Monte Carlo driver. make_worker() builds one stateful callable per
// thread (scratch buffers and the like); worker(j, stream_j) returns the
// sample value. One warm-up draw (stream index = n_samples) is discarded,
// then j runs over [0, n_samples) in contiguous chunks whose partial moments
// merge in chunk order. Per-sample values are identical to a serial run
// because each draw owns its stream. t_per_sample aggregates busy time
// across threads.
template <typename MakeWorker>
EstimateRun run_mc(std::string method, std::size_t n_samples, std::uint64_t seed,
                   unsigned threads, MakeWorker&& make_worker) {
    using clock = std::chrono::steady_clock;
    {
        auto worker = make_worker();
        auto warm = make_stream(seed, n_samples);
        (void)worker(n_samples, warm);
    }
    if (threads < 1) threads = 1;
    if (threads > n_samples) threads = static_cast<unsigned>(n_samples);

    std::vector<RunningMoments> moments(threads);
    std::vector<double> busy(threads, 0.0);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned t, std::size_t lo, std::size_t hi) {
        try {
            auto worker = make_worker();
            auto t0 = clock::now();
            for (std::size_t j = lo; j < hi; ++j) {
                auto stream = make_stream(seed, j);
                moments[t].add(worker(j, stream));
            }
            busy[t] = std::chrono::duration<double>(clock::now() - t0).count();
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0, 0, n_samples);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_samples + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(n_samples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    RunningMoments total;
    double busy_total = 0.0;
    for (unsigned t = 0; t < threads; ++t) {
        total.merge(moments[t]);
        busy_total += busy[t];
    }
    EstimateRun run;
    run.method = std::move(method);
    run.mean = total.mean;
    run.samples = total.count;
    run.sample_variance = total.variance();
    run.t_per_sample = n_samples ? busy_total / static_cast<double>(n_samples) : 0.0;
    run.seed = seed;
    return run;
}

} // namespace detail

} // namespace rsf
