#include "hawkes_moments/combinatorics.hpp"

#include <algorithm>
#include <string>

namespace hawkes_moments {

void check_partition_size(std::size_t n, std::size_t cap)
{
    if (n == 0) {
        throw SizeLimitError("set partitions: n must be at least 1");
    }
    if (n > cap) {
        throw SizeLimitError("set partitions: n = " + std::to_string(n) +
                             " exceeds the cap of " + std::to_string(cap));
    }
}

Partition partition_from_rgs(std::span<const std::size_t> rgs, std::size_t num_blocks)
{
    Partition p;
    p.blocks.resize(num_blocks);
    for (std::size_t i = 0; i < rgs.size(); ++i) {
        p.blocks[rgs[i]].push_back(i + 1);
    }
    return p;
}

std::vector<Partition> enumerate_set_partitions(std::size_t n, std::size_t cap)
{
    std::vector<Partition> out;
    for_each_set_partition(
        n,
        [&](std::span<const std::size_t> rgs, std::size_t k) {
            out.push_back(partition_from_rgs(rgs, k));
        },
        cap);
    return out;
}

std::uint64_t bell_number(std::size_t n)
{
    // Bell triangle; exact in 64 bits up to n = 25.
    if (n > 25) {
        throw SizeLimitError("bell_number: n too large for 64-bit result");
    }
    std::vector<std::uint64_t> row{1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) {
            next.push_back(next.back() + v);
        }
        row = std::move(next);
    }
    return row.front();
}

namespace {

void check_bell_args(std::size_t n, std::size_t k, std::span<const double> args)
{
    if (n == 0) {
        throw std::domain_error("partial_bell: n must be at least 1");
    }
    if (k < 1 || k > n) {
        throw std::domain_error("partial_bell: need 1 <= k <= n");
    }
    if (args.size() < n - k + 1) {
        throw std::domain_error("partial_bell: need n - k + 1 arguments");
    }
}

// Product over blocks of a_{|block|}, reading block sizes off the RGS.
template <typename Real>
Real block_size_product(std::span<const std::size_t> rgs, std::size_t k,
                        std::span<const double> args, std::vector<std::size_t>& sizes)
{
    sizes.assign(k, 0);
    for (std::size_t label : rgs) {
        ++sizes[label];
    }
    Real prod = 1.0;
    for (std::size_t s : sizes) {
        prod *= args[s - 1];
    }
    return prod;
}

template <typename Real>
std::vector<Real> bell_row(std::size_t n, std::span<const double> args)
{
    check_bell_args(n, 1, args);
    std::vector<Real> row(n, 0.0);
    std::vector<std::size_t> sizes;
    for_each_set_partition(n, [&](std::span<const std::size_t> rgs, std::size_t blocks) {
        row[blocks - 1] += block_size_product<Real>(rgs, blocks, args, sizes);
    });
    return row;
}

}  // namespace

double partial_bell(std::size_t n, std::size_t k, std::span<const double> args)
{
    check_bell_args(n, k, args);
    double sum = 0.0;
    std::vector<std::size_t> sizes;
    for_each_set_partition(n, [&](std::span<const std::size_t> rgs, std::size_t blocks) {
        if (blocks == k) {
            sum += block_size_product<double>(rgs, blocks, args, sizes);
        }
    });
    return sum;
}

std::vector<double> partial_bell_row(std::size_t n, std::span<const double> args)
{
    return bell_row<double>(n, args);
}

double complete_bell(std::size_t n, std::span<const double> args)
{
    double sum = 0.0;
    for (double v : partial_bell_row(n, args)) {
        sum += v;
    }
    return sum;
}

double moments_from_cumulants_univariate(std::span<const double> kappas)
{
    if (kappas.empty()) {
        return 1.0;
    }
    return complete_bell(kappas.size(), kappas);
}

double cumulants_from_moments_univariate(std::span<const double> moments)
{
    const std::size_t n = moments.size();
    if (n == 0) {
        throw std::domain_error("cumulants_from_moments_univariate: need at least one moment");
    }
    // The alternating sum cancels heavily; the extended accumulator keeps
    // the result near the conditioning limit of the double inputs.
    const std::vector<long double> row = bell_row<long double>(n, moments);
    long double sum = 0.0L;
    long double signed_factorial = 1.0L;  // k! (-1)^k
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            signed_factorial *= -static_cast<long double>(k);
        }
        sum += signed_factorial * row[k];
    }
    return static_cast<double>(sum);
}

double joint_moment_from_block_cumulants(std::size_t n, const BlockFunction& block_cumulant,
                                         std::size_t cap)
{
    double sum = 0.0;
    for_each_set_partition(
        n,
        [&](std::span<const std::size_t> rgs, std::size_t k) {
            const Partition p = partition_from_rgs(rgs, k);
            double prod = 1.0;
            for (const Block& block : p.blocks) {
                prod *= block_cumulant(block);
            }
            sum += prod;
        },
        cap);
    return sum;
}

double joint_cumulant_from_block_moments(std::size_t n, const BlockFunction& block_moment,
                                         std::size_t cap)
{
    check_partition_size(n, cap);
    std::vector<long double> by_blocks(n, 0.0L);
    for_each_set_partition(
        n,
        [&](std::span<const std::size_t> rgs, std::size_t k) {
            const Partition p = partition_from_rgs(rgs, k);
            long double prod = 1.0L;
            for (const Block& block : p.blocks) {
                prod *= block_moment(block);
            }
            by_blocks[k - 1] += prod;
        },
        cap);
    long double sum = 0.0L;
    long double signed_factorial = 1.0L;  // (l-1)! (-1)^(l-1)
    for (std::size_t l = 1; l <= n; ++l) {
        if (l > 1) {
            signed_factorial *= -static_cast<long double>(l - 1);
        }
        sum += signed_factorial * by_blocks[l - 1];
    }
    return static_cast<double>(sum);
}

}  // namespace hawkes_moments
