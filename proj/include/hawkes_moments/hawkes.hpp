#pragma once

#include "hawkes_moments/exppoly.hpp"
#include "hawkes_moments/kernel_params.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

namespace hawkes_moments {

/// Observation times t_1 <= ... <= t_n, all positive. Duplicates are kept:
/// (t, t) asks for the second power of X_t. Input order does not matter.
class QueryTimes {
public:
    QueryTimes() = default;
    explicit QueryTimes(std::vector<double> times);
    QueryTimes(std::initializer_list<double> times) : QueryTimes(std::vector<double>(times)) {}

    std::span<const double> times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }
    double operator[](std::size_t i) const { return times_[i]; }

private:
    std::vector<double> times_;
};

/// Memo tables keyed by sorted time multisets.
///
/// Lookups and inserts are guarded by a shared mutex; concurrent inserts on the
/// same key keep the last value written, which is harmless because values are
/// computed deterministically.
class CumulantCache {
public:
    using Key = std::vector<double>;

    std::optional<ExpPoly> find_kappa_z(const Key& key) const;
    void store_kappa_z(const Key& key, ExpPoly value);
    std::optional<double> find_cumulant(const Key& key) const;
    void store_cumulant(const Key& key, double value);

    /// Univariate (Bell-polynomial) path, keyed by (order, t).
    std::optional<ExpPoly> find_kappa_z_univariate(std::size_t n, double t) const;
    void store_kappa_z_univariate(std::size_t n, double t, ExpPoly value);
    std::optional<double> find_cumulant_univariate(std::size_t n, double t) const;
    void store_cumulant_univariate(std::size_t n, double t, double value);

    std::size_t size() const;
    void clear();

private:
    mutable std::shared_mutex mutex_;
    std::map<Key, ExpPoly> kappa_z_;
    std::map<Key, double> cumulant_;
    std::map<std::pair<std::size_t, double>, ExpPoly> kappa_z_univariate_;
    std::map<std::pair<std::size_t, double>, double> cumulant_univariate_;
};

struct EngineOptions {
    /// Largest number of times in one joint query (B_8 = 4140 partitions).
    std::size_t max_order{8};
    /// Worker threads used to fill the cache; 1 is the bit-reproducible mode.
    std::size_t threads{1};
    double series_cutoff{kSeriesCutoff};
};

/// kappa_z^(1)(1_[0,t]) = (I - Gamma)^{-1} 1_[0,t](z) on [0, t]:
///   b/(b-a) + a/(a-b) e^{(a-b)(t-z)}  if a != b,   1 + a (t - z)  if a == b.
/// Close to a == b the same function comes out as a short polynomial.
ExpPoly kappa_z_first(double t, const KernelParams& params,
                      double series_cutoff = kSeriesCutoff);

/// Joint moments and cumulants of X_{t_1}, ..., X_{t_n} for an exponential
/// kernel Hawkes process started empty at time 0.
///
/// The cluster cumulants kappa_z (process started from one point at z) are
/// built recursively as exponential polynomials in z:
///
///   kappa_z(t_1..t_n) = (I - Gamma)^{-1} Gamma  sum_{partitions, k >= 2}  prod_blocks kappa_z(block)
///
/// and the process cumulant integrates the all-partitions product against
/// nu dz over [0, min t]. Moments follow from the moment-cumulant relation.
/// Every intermediate result is memoized.
class HawkesMoments {
public:
    explicit HawkesMoments(KernelParams params, EngineOptions options = {});

    const KernelParams& params() const { return params_; }
    const EngineOptions& options() const { return options_; }
    CumulantCache& cache() { return cache_; }

    ExpPoly kappa_z_joint(const QueryTimes& times);
    ExpPoly kappa_z_univariate(std::size_t n, double t);

    double joint_cumulant(const QueryTimes& times);
    /// E[X_{t_1} ... X_{t_n}]; the empty product gives 1.
    double joint_moment(const QueryTimes& times);

    /// kappa^(n)(X_t) and E[X_t^n] through Bell polynomials in one variable.
    double univariate_cumulant(std::size_t n, double t);
    /// sum_k B_{n,k}(kappa_z^(1), ...), the z-integrand of kappa^(n)(X_t) / nu.
    ExpPoly univariate_cumulant_integrand(std::size_t n, double t);
    double univariate_moment(std::size_t n, double t);

private:
    void check_order(std::size_t n) const;
    // Fills kappa_z for every proper sub-multiset of `times`, smallest first.
    void prefill(const std::vector<double>& times);
    ExpPoly compute_kappa_z(const std::vector<double>& times);
    ExpPoly kappa_z_cached(const std::vector<double>& times);
    double compute_cumulant(const std::vector<double>& times);

    KernelParams params_;
    EngineOptions options_;
    CumulantCache cache_;
};

}  // namespace hawkes_moments
