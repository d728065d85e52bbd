#include "hawkes_moments/borel.hpp"

#include "hawkes_moments/combinatorics.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hawkes_moments::borel {

BorelParam::BorelParam(double mu) : mu(mu)
{
    if (!(mu > 0.0 && mu < 1.0)) {
        throw std::domain_error("Borel parameter must lie in (0, 1), got " + std::to_string(mu));
    }
}

double pmf(std::size_t n, BorelParam p)
{
    if (n == 0) {
        throw std::domain_error("borel::pmf: n must be at least 1");
    }
    const double nd = static_cast<double>(n);
    const double mu = p.mu;
    if (n > 50) {
        return std::exp(-mu * nd + (nd - 1.0) * std::log(mu * nd) - std::lgamma(nd + 1.0));
    }
    double value = std::exp(-mu * nd);
    for (std::size_t i = 1; i < n; ++i) {
        value *= mu * nd / static_cast<double>(i);
    }
    return value / nd;
}

namespace {

std::mutex cache_mutex;
std::map<std::pair<std::size_t, std::uint64_t>, double> cache;

}  // namespace

double cumulant(std::size_t n, BorelParam p)
{
    if (n == 0) {
        throw std::domain_error("borel::cumulant: n must be at least 1");
    }
    const double mu = p.mu;
    if (n == 1) {
        return 1.0 / (1.0 - mu);
    }
    const auto key = std::make_pair(n, std::bit_cast<std::uint64_t>(mu));
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    // Only B_{n,k} with k >= 2 enter, which read kappa^(1..n-1).
    std::vector<double> lower(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        lower[i - 1] = cumulant(i, p);
    }
    const std::vector<double> row = partial_bell_row(n, lower);
    double sum = 0.0;
    for (std::size_t k = 2; k <= n; ++k) {
        sum += row[k - 1];
    }
    const double value = mu * sum / (1.0 - mu);
    std::lock_guard lock(cache_mutex);
    cache.insert_or_assign(key, value);
    return value;
}

double moment(std::size_t n, BorelParam p)
{
    if (n == 0) {
        return 1.0;
    }
    std::vector<double> kappas(n);
    for (std::size_t i = 1; i <= n; ++i) {
        kappas[i - 1] = cumulant(i, p);
    }
    return moments_from_cumulants_univariate(kappas);
}

double moment_by_series(std::size_t n, BorelParam p, std::size_t max_terms)
{
    double sum = 0.0;
    for (std::size_t k = 1; k <= max_terms; ++k) {
        const double term = std::pow(static_cast<double>(k), static_cast<double>(n)) * pmf(k, p);
        sum += term;
        if (k > 1 && term < 1e-16 * sum) {
            break;
        }
    }
    return sum;
}

void clear_cache()
{
    std::lock_guard lock(cache_mutex);
    cache.clear();
}

}  // namespace hawkes_moments::borel
