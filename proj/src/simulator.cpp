#include "hawkes_moments/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

namespace hawkes_moments::sim {

Rng substream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x4a17u};
    return Rng(seq);
}

Method parse_method(const std::string& name)
{
    if (name == "cluster") {
        return Method::cluster;
    }
    if (name == "thinning") {
        return Method::thinning;
    }
    throw std::invalid_argument("unknown simulation method: " + name);
}

std::string to_string(Method method)
{
    return method == Method::cluster ? "cluster" : "thinning";
}

void MCConfig::validate() const
{
    if (n_paths == 0) {
        throw std::invalid_argument("MCConfig: n_paths must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("MCConfig: horizon must be positive");
    }
}

namespace {

void check_horizon(double horizon)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::domain_error("simulation horizon must be positive and finite");
    }
}

}  // namespace

EventSample simulate_cluster(const KernelParams& params, double horizon, Rng& rng)
{
    params.validate();
    check_horizon(horizon);
    if (!params.subcritical()) {
        throw SupercriticalError("cluster simulation needs a < b (got a=" +
                                 std::to_string(params.a) + ", b=" + std::to_string(params.b) +
                                 ")");
    }
    EventSample sample;
    sample.horizon = horizon;

    std::poisson_distribution<std::size_t> immigrants(params.nu * horizon);
    std::uniform_real_distribution<double> uniform(0.0, horizon);
    const std::size_t n_immigrants = params.nu > 0.0 ? immigrants(rng) : 0;
    std::vector<double> pending;
    for (std::size_t i = 0; i < n_immigrants; ++i) {
        pending.push_back(uniform(rng));
    }

    // Descendants of a point beyond the horizon are beyond it too, so only
    // points inside [0, horizon] need to branch.
    const double mean_children = params.branching_ratio();
    std::poisson_distribution<std::size_t> children(mean_children > 0.0 ? mean_children : 1.0);
    std::exponential_distribution<double> displacement(params.b);
    while (!pending.empty()) {
        const double y = pending.back();
        pending.pop_back();
        if (y > horizon) {
            continue;
        }
        sample.events.push_back(y);
        if (mean_children == 0.0) {
            continue;
        }
        const std::size_t k = children(rng);
        for (std::size_t c = 0; c < k; ++c) {
            pending.push_back(y + displacement(rng));
        }
    }
    std::sort(sample.events.begin(), sample.events.end());
    return sample;
}

EventSample simulate_thinning(const KernelParams& params, double horizon, Rng& rng)
{
    params.validate();
    check_horizon(horizon);
    EventSample sample;
    sample.horizon = horizon;

    std::exponential_distribution<double> unit_exp(1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double t = 0.0;
    double excitation = 0.0;  // sum_i e^{-b (t - T_i)}
    while (true) {
        // The intensity only decays between events, so its current value
        // bounds it until the next accepted point.
        const double bound = params.nu + params.a * excitation;
        if (bound <= 0.0) {
            break;
        }
        const double wait = unit_exp(rng) / bound;
        t += wait;
        if (t > horizon) {
            break;
        }
        excitation *= std::exp(-params.b * wait);
        const double intensity = params.nu + params.a * excitation;
        if (uniform(rng) * bound <= intensity) {
            sample.events.push_back(t);
            excitation += 1.0;
        }
    }
    return sample;
}

EventSample simulate(const KernelParams& params, double horizon, Method method, Rng& rng)
{
    return method == Method::cluster ? simulate_cluster(params, horizon, rng)
                                     : simulate_thinning(params, horizon, rng);
}

FamilyStats simulate_family(const KernelParams& params, Rng& rng)
{
    params.validate();
    if (!params.subcritical()) {
        throw SupercriticalError("family simulation needs a < b");
    }
    FamilyStats stats;
    const double mean_children = params.branching_ratio();
    if (mean_children == 0.0) {
        stats.size = 1;
        return stats;
    }
    std::poisson_distribution<std::size_t> children(mean_children);
    std::size_t unexplored = 1;
    while (unexplored > 0) {
        --unexplored;
        ++stats.size;
        const std::size_t k = children(rng);
        stats.offspring += k;
        unexplored += k;
    }
    return stats;
}

std::vector<std::size_t> count_at(const EventSample& sample, const QueryTimes& times)
{
    std::vector<std::size_t> counts;
    counts.reserve(times.size());
    for (double t : times.times()) {
        if (t > sample.horizon) {
            throw std::domain_error("count_at: time " + std::to_string(t) +
                                    " beyond the simulated horizon " +
                                    std::to_string(sample.horizon));
        }
        counts.push_back(static_cast<std::size_t>(
            std::upper_bound(sample.events.begin(), sample.events.end(), t) -
            sample.events.begin()));
    }
    return counts;
}

double intensity_at(const EventSample& sample, const KernelParams& params, double t)
{
    double excitation = 0.0;
    for (double s : sample.events) {
        if (s > t) {
            break;
        }
        excitation += std::exp(-params.b * (t - s));
    }
    return params.nu + params.a * excitation;
}

namespace {

// Pairwise summation over [begin, end); fixed split points make the result
// independent of how the values were produced.
double pairwise_sum(const double* begin, const double* end)
{
    const std::ptrdiff_t n = end - begin;
    if (n <= 16) {
        double s = 0.0;
        for (const double* p = begin; p != end; ++p) {
            s += *p;
        }
        return s;
    }
    const double* mid = begin + n / 2;
    return pairwise_sum(begin, mid) + pairwise_sum(mid, end);
}

}  // namespace

MomentEstimate estimate(const KernelParams& params, const MCConfig& cfg,
                        const std::function<double(const EventSample&)>& statistic)
{
    cfg.validate();
    std::vector<double> values(cfg.n_paths);
    auto run = [&](std::size_t first, std::size_t last) {
        for (std::size_t i = first; i < last; ++i) {
            Rng rng = substream(cfg.seed, i);
            values[i] = statistic(simulate(params, cfg.horizon, cfg.method, rng));
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.n_paths));
    if (threads == 1) {
        run(0, cfg.n_paths);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> failures(threads);
        const std::size_t chunk = (cfg.n_paths + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            const std::size_t first = std::min(cfg.n_paths, w * chunk);
            const std::size_t last = std::min(cfg.n_paths, first + chunk);
            pool.emplace_back([&, w, first, last] {
                try {
                    run(first, last);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (const auto& f : failures) {
            if (f) {
                std::rethrow_exception(f);
            }
        }
    }

    const double n = static_cast<double>(cfg.n_paths);
    const double mean = pairwise_sum(values.data(), values.data() + values.size()) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        sq[i] = d * d;
    }
    MomentEstimate est;
    est.value = mean;
    est.n_samples = cfg.n_paths;
    if (cfg.n_paths > 1) {
        const double var = pairwise_sum(sq.data(), sq.data() + sq.size()) / (n - 1.0);
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

MomentEstimate estimate_joint_moment(const KernelParams& params, const QueryTimes& times,
                                     const MCConfig& cfg)
{
    if (times.empty()) {
        throw std::domain_error("estimate_joint_moment: need at least one time");
    }
    if (times.back() > cfg.horizon) {
        throw std::domain_error("estimate_joint_moment: times exceed the horizon");
    }
    return estimate(params, cfg, [&](const EventSample& sample) {
        double prod = 1.0;
        for (std::size_t c : count_at(sample, times)) {
            prod *= static_cast<double>(c);
        }
        return prod;
    });
}

std::vector<PathPoint> path_on_grid(const EventSample& sample, const KernelParams& params,
                                    double step)
{
    if (!(step > 0.0)) {
        throw std::domain_error("path step must be positive");
    }
    std::vector<PathPoint> path;
    const auto n_steps = static_cast<std::size_t>(std::floor(sample.horizon / step + 1e-9));
    std::size_t seen = 0;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = std::min(sample.horizon, static_cast<double>(i) * step);
        while (seen < sample.events.size() && sample.events[seen] <= t) {
            ++seen;
        }
        path.push_back({t, seen, intensity_at(sample, params, t)});
    }
    return path;
}

std::vector<PathPoint> export_path(const KernelParams& params, double horizon, double step,
                                   Rng& rng, Method method)
{
    if (!(step > 0.0)) {
        throw std::domain_error("path step must be positive");
    }
    return path_on_grid(simulate(params, horizon, method, rng), params, step);
}

void write_path_csv(std::ostream& os, const std::vector<PathPoint>& path)
{
    auto shortest = [](double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    os << "t,X,lambda\n";
    for (const PathPoint& p : path) {
        os << shortest(p.t) << ',' << p.count << ',' << shortest(p.intensity) << '\n';
    }
}

}  // namespace hawkes_moments::sim
