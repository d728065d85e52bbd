#include "hawkes_moments/hawkes.hpp"

#include "hawkes_moments/combinatorics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace hawkes_moments {

QueryTimes::QueryTimes(std::vector<double> times) : times_(std::move(times))
{
    for (double t : times_) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::domain_error("QueryTimes: times must be positive and finite, got " +
                                    std::to_string(t));
        }
    }
    std::sort(times_.begin(), times_.end());
}

// ---------------------------------------------------------------------------
// CumulantCache

std::optional<ExpPoly> CumulantCache::find_kappa_z(const Key& key) const
{
    std::shared_lock lock(mutex_);
    if (auto it = kappa_z_.find(key); it != kappa_z_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void CumulantCache::store_kappa_z(const Key& key, ExpPoly value)
{
    std::unique_lock lock(mutex_);
    kappa_z_.insert_or_assign(key, std::move(value));
}

std::optional<double> CumulantCache::find_cumulant(const Key& key) const
{
    std::shared_lock lock(mutex_);
    if (auto it = cumulant_.find(key); it != cumulant_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void CumulantCache::store_cumulant(const Key& key, double value)
{
    std::unique_lock lock(mutex_);
    cumulant_.insert_or_assign(key, value);
}

std::optional<ExpPoly> CumulantCache::find_kappa_z_univariate(std::size_t n, double t) const
{
    std::shared_lock lock(mutex_);
    if (auto it = kappa_z_univariate_.find({n, t}); it != kappa_z_univariate_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void CumulantCache::store_kappa_z_univariate(std::size_t n, double t, ExpPoly value)
{
    std::unique_lock lock(mutex_);
    kappa_z_univariate_.insert_or_assign({n, t}, std::move(value));
}

std::optional<double> CumulantCache::find_cumulant_univariate(std::size_t n, double t) const
{
    std::shared_lock lock(mutex_);
    if (auto it = cumulant_univariate_.find({n, t}); it != cumulant_univariate_.end()) {
        return it->second;
    }
    return std::nullopt;
}

void CumulantCache::store_cumulant_univariate(std::size_t n, double t, double value)
{
    std::unique_lock lock(mutex_);
    cumulant_univariate_.insert_or_assign({n, t}, value);
}

std::size_t CumulantCache::size() const
{
    std::shared_lock lock(mutex_);
    return kappa_z_.size() + cumulant_.size() + kappa_z_univariate_.size() +
           cumulant_univariate_.size();
}

void CumulantCache::clear()
{
    std::unique_lock lock(mutex_);
    kappa_z_.clear();
    cumulant_.clear();
    kappa_z_univariate_.clear();
    cumulant_univariate_.clear();
}

// ---------------------------------------------------------------------------

ExpPoly kappa_z_first(double t, const KernelParams& params, double series_cutoff)
{
    if (!(t > 0.0)) {
        throw std::domain_error("kappa_z_first: t must be positive");
    }
    const ExpPoly one = ExpPoly::constant(1.0, t);
    return one + shift_integrate(one, t, params, series_cutoff);
}

namespace {

std::vector<double> select(const std::vector<double>& times, const Block& block)
{
    std::vector<double> out;
    out.reserve(block.size());
    for (std::size_t i : block) {
        out.push_back(times[i - 1]);
    }
    return out;
}

// Sub-multisets of `times` grouped by size (index s holds size-s subsets).
std::vector<std::vector<std::vector<double>>> sub_multisets(const std::vector<double>& times)
{
    const std::size_t n = times.size();
    std::vector<std::set<std::vector<double>>> by_size(n + 1);
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> sub;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) {
                sub.push_back(times[i]);
            }
        }
        by_size[sub.size()].insert(std::move(sub));
    }
    std::vector<std::vector<std::vector<double>>> out(n + 1);
    for (std::size_t s = 0; s <= n; ++s) {
        out[s].assign(by_size[s].begin(), by_size[s].end());
    }
    return out;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(threads, count); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace

HawkesMoments::HawkesMoments(KernelParams params, EngineOptions options)
    : params_(params), options_(options)
{
    params_.validate();
    if (options_.max_order == 0) {
        throw std::invalid_argument("EngineOptions: max_order must be positive");
    }
    if (options_.max_order > kDefaultPartitionCap) {
        throw std::invalid_argument("EngineOptions: max_order above the partition cap of " +
                                    std::to_string(kDefaultPartitionCap));
    }
}

void HawkesMoments::check_order(std::size_t n) const
{
    if (n > options_.max_order) {
        throw SizeLimitError("order " + std::to_string(n) + " exceeds the configured cap of " +
                             std::to_string(options_.max_order));
    }
}

ExpPoly HawkesMoments::compute_kappa_z(const std::vector<double>& times)
{
    const std::size_t n = times.size();
    if (n == 1) {
        return kappa_z_first(times.front(), params_, options_.series_cutoff);
    }
    const double t_min = times.front();
    ExpPoly sum = ExpPoly::zero(t_min);
    for_each_set_partition(
        n,
        [&](std::span<const std::size_t> rgs, std::size_t k) {
            if (k < 2) {
                return;
            }
            const Partition p = partition_from_rgs(rgs, k);
            ExpPoly product = kappa_z_cached(select(times, p.blocks.front()));
            for (std::size_t j = 1; j < p.blocks.size() && !product.is_zero(); ++j) {
                product = product * kappa_z_cached(select(times, p.blocks[j]));
            }
            sum = sum + product;
        },
        options_.max_order);
    return shift_integrate(sum, t_min, params_, options_.series_cutoff);
}

ExpPoly HawkesMoments::kappa_z_cached(const std::vector<double>& times)
{
    if (auto hit = cache_.find_kappa_z(times)) {
        return *std::move(hit);
    }
    ExpPoly value = compute_kappa_z(times);
    cache_.store_kappa_z(times, value);
    return value;
}

void HawkesMoments::prefill(const std::vector<double>& times)
{
    if (options_.threads <= 1 || times.size() < 3) {
        return;
    }
    const auto levels = sub_multisets(times);
    for (std::size_t s = 1; s < times.size(); ++s) {
        const auto& level = levels[s];
        parallel_for(level.size(), options_.threads,
                     [&](std::size_t i) { kappa_z_cached(level[i]); });
    }
}

ExpPoly HawkesMoments::kappa_z_joint(const QueryTimes& times)
{
    if (times.empty()) {
        throw std::domain_error("kappa_z_joint: need at least one time");
    }
    check_order(times.size());
    std::vector<double> key(times.times().begin(), times.times().end());
    prefill(key);
    return kappa_z_cached(key);
}

double HawkesMoments::compute_cumulant(const std::vector<double>& times)
{
    const std::size_t n = times.size();
    const double t_min = times.front();
    ExpPoly integrand = ExpPoly::zero(t_min);
    for_each_set_partition(
        n,
        [&](std::span<const std::size_t> rgs, std::size_t k) {
            const Partition p = partition_from_rgs(rgs, k);
            ExpPoly product = kappa_z_cached(select(times, p.blocks.front()));
            for (std::size_t j = 1; j < p.blocks.size() && !product.is_zero(); ++j) {
                product = product * kappa_z_cached(select(times, p.blocks[j]));
            }
            integrand = integrand + product;
        },
        options_.max_order);
    return params_.nu * integrate_over_domain(integrand, t_min, params_, options_.series_cutoff);
}

double HawkesMoments::joint_cumulant(const QueryTimes& times)
{
    if (times.empty()) {
        throw std::domain_error("joint_cumulant: need at least one time");
    }
    check_order(times.size());
    std::vector<double> key(times.times().begin(), times.times().end());
    if (auto hit = cache_.find_cumulant(key)) {
        return *hit;
    }
    prefill(key);
    const double value = compute_cumulant(key);
    cache_.store_cumulant(key, value);
    return value;
}

double HawkesMoments::joint_moment(const QueryTimes& times)
{
    if (times.empty()) {
        return 1.0;
    }
    check_order(times.size());
    const std::vector<double> all(times.times().begin(), times.times().end());
    prefill(all);
    return joint_moment_from_block_cumulants(
        all.size(),
        [&](const Block& block) { return joint_cumulant(QueryTimes(select(all, block))); },
        options_.max_order);
}

ExpPoly HawkesMoments::kappa_z_univariate(std::size_t n, double t)
{
    if (n == 0) {
        throw std::domain_error("kappa_z_univariate: n must be at least 1");
    }
    check_order(n);
    if (!(t > 0.0)) {
        throw std::domain_error("kappa_z_univariate: t must be positive");
    }
    if (n == 1) {
        return kappa_z_first(t, params_, options_.series_cutoff);
    }
    if (auto hit = cache_.find_kappa_z_univariate(n, t)) {
        return *std::move(hit);
    }
    // a_n only enters B_{n,1}, which the recursion skips.
    std::vector<ExpPoly> args;
    for (std::size_t i = 1; i < n; ++i) {
        args.push_back(kappa_z_univariate(i, t));
    }
    args.push_back(ExpPoly::zero(t));
    const auto table = partial_bell_table<ExpPoly>(n, args, ExpPoly::zero(t),
                                                   ExpPoly::constant(1.0, t));
    ExpPoly sum = ExpPoly::zero(t);
    for (std::size_t k = 2; k <= n; ++k) {
        sum = sum + table[n][k];
    }
    ExpPoly value = shift_integrate(sum, t, params_, options_.series_cutoff);
    cache_.store_kappa_z_univariate(n, t, value);
    return value;
}

ExpPoly HawkesMoments::univariate_cumulant_integrand(std::size_t n, double t)
{
    if (n == 0) {
        throw std::domain_error("univariate_cumulant: n must be at least 1");
    }
    check_order(n);
    std::vector<ExpPoly> args;
    for (std::size_t i = 1; i <= n; ++i) {
        args.push_back(kappa_z_univariate(i, t));
    }
    const auto table = partial_bell_table<ExpPoly>(n, args, ExpPoly::zero(t),
                                                   ExpPoly::constant(1.0, t));
    ExpPoly integrand = ExpPoly::zero(t);
    for (std::size_t k = 1; k <= n; ++k) {
        integrand = integrand + table[n][k];
    }
    return integrand;
}

double HawkesMoments::univariate_cumulant(std::size_t n, double t)
{
    if (auto hit = cache_.find_cumulant_univariate(n, t)) {
        return *hit;
    }
    const ExpPoly integrand = univariate_cumulant_integrand(n, t);
    const double value =
        params_.nu * integrate_over_domain(integrand, t, params_, options_.series_cutoff);
    cache_.store_cumulant_univariate(n, t, value);
    return value;
}

double HawkesMoments::univariate_moment(std::size_t n, double t)
{
    if (n == 0) {
        return 1.0;
    }
    check_order(n);
    std::vector<double> kappas;
    for (std::size_t i = 1; i <= n; ++i) {
        kappas.push_back(univariate_cumulant(i, t));
    }
    return moments_from_cumulants_univariate(kappas);
}

}  // namespace hawkes_moments
