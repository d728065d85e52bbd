#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkes_moments {

/// Thrown when a combinatorial size guard is exceeded.
class SizeLimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultPartitionCap = 12;

/// Sorted 1-based indices into {1..n}.
using Block = std::vector<std::size_t>;

/// A set partition of {1..n} into disjoint nonempty blocks.
///
/// Blocks are ordered by their smallest element, which is the order the
/// restricted-growth-string enumerator produces them in.
struct Partition {
    std::vector<Block> blocks;

    std::size_t num_blocks() const { return blocks.size(); }
    bool operator==(const Partition&) const = default;
};

/// Throws SizeLimitError unless 1 <= n <= cap.
void check_partition_size(std::size_t n, std::size_t cap = kDefaultPartitionCap);

/// Visits every set partition of {1..n} as a restricted growth string.
///
/// The visitor receives `rgs` (rgs[i] is the 0-based block label of element
/// i+1) and the number of blocks. Strings are visited in lexicographic order,
/// so the first call is the single-block partition and the last one is the
/// all-singletons partition.
template <typename Visitor>
void for_each_set_partition(std::size_t n, Visitor&& visit,
                            std::size_t cap = kDefaultPartitionCap)
{
    check_partition_size(n, cap);
    std::vector<std::size_t> rgs(n, 0);
    // running_max[i] = max(rgs[0..i])
    std::vector<std::size_t> running_max(n, 0);
    while (true) {
        visit(std::span<const std::size_t>(rgs), running_max[n - 1] + 1);
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] > running_max[i - 1]) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++rgs[i];
        running_max[i] = std::max(running_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            running_max[j] = running_max[i];
        }
    }
}

/// Converts a restricted growth string into a Partition with 1-based blocks.
Partition partition_from_rgs(std::span<const std::size_t> rgs, std::size_t num_blocks);

std::vector<Partition> enumerate_set_partitions(std::size_t n,
                                                std::size_t cap = kDefaultPartitionCap);

std::uint64_t bell_number(std::size_t n);

/// B_{n,k}(a_1, ..., a_{n-k+1}) as the sum over partitions of {1..n} into k
/// blocks of the product of a_{|block|}. `args[i]` holds a_{i+1}.
double partial_bell(std::size_t n, std::size_t k, std::span<const double> args);

/// All of B_{n,1}, ..., B_{n,n} from one enumeration pass; index 0 holds B_{n,1}.
std::vector<double> partial_bell_row(std::size_t n, std::span<const double> args);

double complete_bell(std::size_t n, std::span<const double> args);

/// E[X^n] from kappa^(1..n). An empty input gives E[X^0] = 1.
double moments_from_cumulants_univariate(std::span<const double> kappas);

/// kappa^(n) from E[X], ..., E[X^n].
double cumulants_from_moments_univariate(std::span<const double> moments);

using BlockFunction = std::function<double(const Block&)>;

/// Sum over all partitions of {1..n} of the product of block cumulants.
double joint_moment_from_block_cumulants(std::size_t n, const BlockFunction& block_cumulant,
                                         std::size_t cap = kDefaultPartitionCap);

/// Sum over l of (l-1)! (-1)^(l-1) times the sum over l-block partitions of the
/// product of block moments.
double joint_cumulant_from_block_moments(std::size_t n, const BlockFunction& block_moment,
                                         std::size_t cap = kDefaultPartitionCap);

/// Partial Bell polynomials over an arbitrary commutative ring, by the
/// recurrence B_{n,k} = sum_i C(n-1, i-1) a_i B_{n-i,k-1}.
///
/// Returns table[m][k] for 0 <= k <= m <= n. `args[i]` holds a_{i+1};
/// `zero` and `one` are the ring identities. Ring needs +, and * by Ring and
/// by double.
template <typename Ring>
std::vector<std::vector<Ring>> partial_bell_table(std::size_t n, std::span<const Ring> args,
                                                  const Ring& zero, const Ring& one)
{
    if (args.size() < n) {
        throw std::invalid_argument("partial_bell_table: need n arguments");
    }
    std::vector<std::vector<double>> binom(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        binom[m].assign(m + 1, 1.0);
        for (std::size_t j = 1; j < m; ++j) {
            binom[m][j] = binom[m - 1][j - 1] + binom[m - 1][j];
        }
    }
    std::vector<std::vector<Ring>> table(n + 1);
    table[0].push_back(one);
    for (std::size_t m = 1; m <= n; ++m) {
        table[m].assign(m + 1, zero);
        for (std::size_t k = 1; k <= m; ++k) {
            Ring acc = zero;
            for (std::size_t i = 1; i + k - 1 <= m; ++i) {
                const Ring& prev = table[m - i][k - 1];
                acc = acc + (args[i - 1] * prev) * binom[m - 1][i - 1];
            }
            table[m][k] = acc;
        }
    }
    return table;
}

}  // namespace hawkes_moments
