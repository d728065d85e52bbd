#pragma once

#include "hawkes_moments/hawkes.hpp"
#include "hawkes_moments/kernel_params.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes_moments::sim {

using Rng = std::mt19937_64;

/// Thrown for a >= b, where clusters are not almost surely finite.
class SupercriticalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Independent generator for path `stream` under a master seed.
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// Sorted event times in [0, horizon].
struct EventSample {
    std::vector<double> events;
    double horizon{0.0};
};

enum class Method { cluster, thinning };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct MCConfig {
    std::size_t n_paths{100000};
    double horizon{2.0};
    std::uint64_t seed{1};
    Method method{Method::cluster};
    /// Paths are split over this many threads; the estimate does not depend on it.
    std::size_t threads{1};

    void validate() const;
};

struct MomentEstimate {
    double value{0.0};
    /// Unbiased sample standard deviation over sqrt(n_samples).
    double std_error{0.0};
    std::size_t n_samples{0};
};

/// Immigrants ~ Poisson(nu * horizon) placed uniformly; each event at y has
/// Poisson(a / b) children at y + Exp(b). Requires a < b.
EventSample simulate_cluster(const KernelParams& params, double horizon, Rng& rng);

/// Ogata thinning against the intensity nu + a sum_i e^{-b (t - T_i)}.
EventSample simulate_thinning(const KernelParams& params, double horizon, Rng& rng);

EventSample simulate(const KernelParams& params, double horizon, Method method, Rng& rng);

/// Whole family of one immigrant, with no time horizon.
struct FamilyStats {
    std::size_t size{0};       // immigrant included
    std::size_t offspring{0};  // direct children summed over all members
};

FamilyStats simulate_family(const KernelParams& params, Rng& rng);

/// X_{t_i} = number of events <= t_i.
std::vector<std::size_t> count_at(const EventSample& sample, const QueryTimes& times);

/// lambda_t = nu + a sum_{T_i <= t} e^{-b (t - T_i)}, right-continuous.
double intensity_at(const EventSample& sample, const KernelParams& params, double t);

/// Mean and standard error of statistic(path) over cfg.n_paths independent
/// paths; path i uses substream(cfg.seed, i).
MomentEstimate estimate(const KernelParams& params, const MCConfig& cfg,
                        const std::function<double(const EventSample&)>& statistic);

/// Monte Carlo estimate of E[X_{t_1} ... X_{t_n}].
MomentEstimate estimate_joint_moment(const KernelParams& params, const QueryTimes& times,
                                     const MCConfig& cfg);

struct PathPoint {
    double t;
    std::size_t count;
    double intensity;
};

/// (t, X_t, lambda_t) on the grid 0, step, 2 step, ... <= horizon.
std::vector<PathPoint> export_path(const KernelParams& params, double horizon, double step,
                                   Rng& rng, Method method = Method::cluster);
std::vector<PathPoint> path_on_grid(const EventSample& sample, const KernelParams& params,
                                    double step);

/// CSV with header `t,X,lambda`.
void write_path_csv(std::ostream& os, const std::vector<PathPoint>& path);

}  // namespace hawkes_moments::sim
