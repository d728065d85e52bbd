#pragma once

#include <cstddef>

namespace hawkes_moments::borel {

/// Offspring mean of a Poisson Galton-Watson tree; must lie in (0, 1).
struct BorelParam {
    double mu;

    explicit BorelParam(double mu);
};

/// P(X = n) = e^{-mu n} (mu n)^{n-1} / n! for the total progeny X. n >= 1.
double pmf(std::size_t n, BorelParam mu);

/// kappa^(n)(X) from kappa^(1) = 1/(1-mu) and
/// kappa^(n) = mu/(1-mu) * sum_{k=2}^n B_{n,k}(kappa^(1), ..., kappa^(n-k+1)).
/// Results are memoized per (n, mu) in a process-wide cache.
double cumulant(std::size_t n, BorelParam mu);

/// E[X^n] as the complete Bell polynomial of the cumulants; E[X^0] = 1.
double moment(std::size_t n, BorelParam mu);

/// sum_{k>=1} k^n P(X = k), stopped once a term falls below 1e-16 of the
/// running sum (or after max_terms terms).
double moment_by_series(std::size_t n, BorelParam mu, std::size_t max_terms = 1000000);

void clear_cache();

}  // namespace hawkes_moments::borel
