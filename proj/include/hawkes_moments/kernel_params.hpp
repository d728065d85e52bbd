#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_moments {

/// Exponential-kernel Hawkes parameters.
///
/// Offspring intensity a * exp(-b x) dx on [0, inf), immigrant intensity nu.
/// The branching ratio is a / b. Moments over a finite horizon are defined
/// for a >= b as well; only the simulator and stationary readings need a < b.
struct KernelParams {
    double a{0.5};
    double b{1.0};
    double nu{1.0};

    void validate() const
    {
        if (!(a >= 0.0) || !(b > 0.0) || !(nu >= 0.0)) {
            throw std::domain_error("KernelParams: need a >= 0, b > 0, nu >= 0 (got a=" +
                                    std::to_string(a) + ", b=" + std::to_string(b) +
                                    ", nu=" + std::to_string(nu) + ")");
        }
    }

    double branching_ratio() const { return a / b; }
    bool subcritical() const { return a < b; }
};

}  // namespace hawkes_moments
