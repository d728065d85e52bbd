#pragma once

#include "hawkes_moments/kernel_params.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace hawkes_moments {

/// Exponent rate m_a * a + m_b * b with exact integer bookkeeping.
struct RateExpr {
    int m_a{0};
    int m_b{0};

    double value(const KernelParams& params) const { return m_a * params.a + m_b * params.b; }
    bool is_zero() const { return m_a == 0 && m_b == 0; }

    friend RateExpr operator+(RateExpr x, RateExpr y) { return {x.m_a + y.m_a, x.m_b + y.m_b}; }
    friend RateExpr operator-(RateExpr x) { return {-x.m_a, -x.m_b}; }
    friend auto operator<=>(const RateExpr&, const RateExpr&) = default;
};

/// coeff * z^power * exp(rate * z)
struct ExpPolyTerm {
    double coeff{0.0};
    int power{0};
    RateExpr rate{};

    bool operator==(const ExpPolyTerm&) const = default;
};

/// A finite sum of ExpPolyTerms, valid for 0 <= z <= domain_end.
///
/// Always held in canonical form: terms sorted by (power, m_a, m_b), at most
/// one term per (power, rate), and coefficients negligible against the largest
/// one dropped. Constants built without a domain are valid on [0, inf).
class ExpPoly {
public:
    static constexpr double kUnbounded = std::numeric_limits<double>::infinity();
    static constexpr double kDropTolerance = 1e-14;

    ExpPoly() = default;
    ExpPoly(std::vector<ExpPolyTerm> terms, double domain_end = kUnbounded);

    static ExpPoly zero(double domain_end = kUnbounded) { return ExpPoly({}, domain_end); }
    static ExpPoly constant(double c, double domain_end = kUnbounded);
    static ExpPoly monomial(double coeff, int power, RateExpr rate,
                            double domain_end = kUnbounded);

    const std::vector<ExpPolyTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    double domain_end() const { return domain_end_; }
    int max_power() const;

    /// Throws std::domain_error outside [0, domain_end].
    double eval(double z, const KernelParams& params) const;

    /// One line per term: "coeff * z^p * exp((m_a*a + m_b*b)*z)".
    std::string to_string() const;
    static ExpPoly parse(const std::string& text, double domain_end = kUnbounded);

    friend ExpPoly operator+(const ExpPoly& f, const ExpPoly& g);
    friend ExpPoly operator-(const ExpPoly& f, const ExpPoly& g);
    friend ExpPoly operator*(const ExpPoly& f, const ExpPoly& g);
    friend ExpPoly operator*(const ExpPoly& f, double c);
    friend ExpPoly operator*(double c, const ExpPoly& f) { return f * c; }

    bool operator==(const ExpPoly&) const = default;

private:
    void canonicalize();

    std::vector<ExpPolyTerm> terms_;
    double domain_end_{kUnbounded};
};

inline ExpPoly add(const ExpPoly& f, const ExpPoly& g) { return f + g; }
inline ExpPoly scale(const ExpPoly& f, double c) { return f * c; }
inline ExpPoly mul(const ExpPoly& f, const ExpPoly& g) { return f * g; }

std::ostream& operator<<(std::ostream& os, const ExpPoly& f);

/// Below this value of |mu| * T the integral of y^q e^{mu y} is taken from
/// its Taylor series in mu, so the result stays polynomial instead of carrying
/// 1/mu^(q+1) coefficients that cancel catastrophically as mu -> 0.
inline constexpr double kSeriesCutoff = 0.5;

/// g(z) = a * int_0^{T-z} f(z+y) e^{(a-b) y} dy on [0, T], in closed form.
///
/// This is the action of (I - Gamma)^{-1} Gamma for the exponential kernel on
/// functions supported on [0, T]. Requires T > 0 and f.domain_end() >= T.
ExpPoly shift_integrate(const ExpPoly& f, double T, const KernelParams& params,
                        double series_cutoff = kSeriesCutoff);

/// int_0^T f(z) dz in closed form. Requires 0 <= T <= f.domain_end().
double integrate_over_domain(const ExpPoly& f, double T, const KernelParams& params,
                             double series_cutoff = kSeriesCutoff);

}  // namespace hawkes_moments
