#include "hawkes_moments/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hawkes_moments {

ExpPoly::ExpPoly(std::vector<ExpPolyTerm> terms, double domain_end)
    : terms_(std::move(terms)), domain_end_(domain_end)
{
    if (!(domain_end > 0.0)) {
        throw std::domain_error("ExpPoly: domain_end must be positive");
    }
    for (const ExpPolyTerm& t : terms_) {
        if (t.power < 0) {
            throw std::domain_error("ExpPoly: negative power");
        }
    }
    canonicalize();
}

ExpPoly ExpPoly::constant(double c, double domain_end)
{
    return ExpPoly({{c, 0, {}}}, domain_end);
}

ExpPoly ExpPoly::monomial(double coeff, int power, RateExpr rate, double domain_end)
{
    return ExpPoly({{coeff, power, rate}}, domain_end);
}

void ExpPoly::canonicalize()
{
    auto key_less = [](const ExpPolyTerm& x, const ExpPolyTerm& y) {
        if (x.power != y.power) {
            return x.power < y.power;
        }
        return x.rate < y.rate;
    };
    std::stable_sort(terms_.begin(), terms_.end(), key_less);

    std::vector<ExpPolyTerm> merged;
    merged.reserve(terms_.size());
    for (const ExpPolyTerm& t : terms_) {
        if (!merged.empty() && merged.back().power == t.power && merged.back().rate == t.rate) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }

    // Terms are compared by |coeff| * D^power with D = domain_end (1 when
    // unbounded), which bounds the polynomial factor on the domain.
    const double scale = std::isfinite(domain_end_) ? domain_end_ : 1.0;
    auto magnitude = [&](const ExpPolyTerm& t) {
        return std::abs(t.coeff) * std::pow(scale, t.power);
    };
    double largest = 0.0;
    for (const ExpPolyTerm& t : merged) {
        largest = std::max(largest, magnitude(t));
    }
    const double cutoff = kDropTolerance * largest;
    std::erase_if(merged, [&](const ExpPolyTerm& t) {
        return t.coeff == 0.0 || magnitude(t) < cutoff;
    });
    terms_ = std::move(merged);
}

int ExpPoly::max_power() const
{
    int p = 0;
    for (const ExpPolyTerm& t : terms_) {
        p = std::max(p, t.power);
    }
    return p;
}

double ExpPoly::eval(double z, const KernelParams& params) const
{
    if (!(z >= 0.0) || z > domain_end_) {
        throw std::domain_error("ExpPoly::eval: z = " + std::to_string(z) +
                                " outside [0, " + std::to_string(domain_end_) + "]");
    }
    double sum = 0.0;
    for (const ExpPolyTerm& t : terms_) {
        sum += t.coeff * std::pow(z, t.power) * std::exp(t.rate.value(params) * z);
    }
    return sum;
}

ExpPoly operator+(const ExpPoly& f, const ExpPoly& g)
{
    std::vector<ExpPolyTerm> terms = f.terms_;
    terms.insert(terms.end(), g.terms_.begin(), g.terms_.end());
    return ExpPoly(std::move(terms), std::min(f.domain_end_, g.domain_end_));
}

ExpPoly operator-(const ExpPoly& f, const ExpPoly& g)
{
    return f + g * -1.0;
}

ExpPoly operator*(const ExpPoly& f, double c)
{
    std::vector<ExpPolyTerm> terms = f.terms_;
    for (ExpPolyTerm& t : terms) {
        t.coeff *= c;
    }
    return ExpPoly(std::move(terms), f.domain_end_);
}

ExpPoly operator*(const ExpPoly& f, const ExpPoly& g)
{
    std::vector<ExpPolyTerm> terms;
    terms.reserve(f.terms_.size() * g.terms_.size());
    for (const ExpPolyTerm& x : f.terms_) {
        for (const ExpPolyTerm& y : g.terms_) {
            terms.push_back({x.coeff * y.coeff, x.power + y.power, x.rate + y.rate});
        }
    }
    return ExpPoly(std::move(terms), std::min(f.domain_end_, g.domain_end_));
}

std::string ExpPoly::to_string() const
{
    std::string out;
    char line[160];
    for (const ExpPolyTerm& t : terms_) {
        std::snprintf(line, sizeof line, "%.17g * z^%d * exp((%d*a + %d*b)*z)\n", t.coeff,
                      t.power, t.rate.m_a, t.rate.m_b);
        out += line;
    }
    return out;
}

ExpPoly ExpPoly::parse(const std::string& text, double domain_end)
{
    std::vector<ExpPolyTerm> terms;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ExpPolyTerm t;
        if (std::sscanf(line.c_str(), " %lf * z^%d * exp((%d*a + %d*b)*z)", &t.coeff, &t.power,
                        &t.rate.m_a, &t.rate.m_b) != 4) {
            throw std::invalid_argument("ExpPoly::parse: malformed line: " + line);
        }
        terms.push_back(t);
    }
    return ExpPoly(std::move(terms), domain_end);
}

std::ostream& operator<<(std::ostream& os, const ExpPoly& f)
{
    return os << f.to_string();
}

namespace {

// An antiderivative of w^p e^{mu w}, written as
//   F(w) = e^{mu w} * sum_j exp_coeffs[j] w^j  +  sum_j poly_coeffs[j] w^j.
struct Antiderivative {
    double mu{0.0};
    std::vector<double> exp_coeffs;
    std::vector<double> poly_coeffs;

    double operator()(double w) const
    {
        return std::exp(mu * w) * horner(exp_coeffs, w) + horner(poly_coeffs, w);
    }

    static double horner(const std::vector<double>& c, double w)
    {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            acc = acc * w + *it;
        }
        return acc;
    }
};

// Series terms are only trusted while |mu| * span stays below this.
constexpr double kSeriesReach = 8.0;

// Near a == b every rate in play is a small multiple of a - b, and the basis
// functions e^{k (a-b) z} become nearly collinear. Such calls switch all of
// their terms to the Taylor form together: mixing the two forms inside one
// recursion loses far more precision than either form alone.
bool near_degenerate(const KernelParams& params, double span, double cutoff)
{
    return params.a != params.b && std::abs(params.a - params.b) * span < cutoff;
}

Antiderivative antiderivative(int p, double mu, bool exactly_zero, double span, bool series)
{
    Antiderivative F;
    F.mu = mu;
    const double x = std::abs(mu) * span;
    if (exactly_zero || mu == 0.0) {
        F.poly_coeffs.assign(p + 2, 0.0);
        F.poly_coeffs[p + 1] = 1.0 / (p + 1);
    } else if (series && x < kSeriesReach) {
        // sum_j mu^j w^{p+j+1} / (j! (p+j+1))
        double mu_pow_over_fact = 1.0;  // mu^j / j!
        double magnitude = 1.0;         // (|mu| span)^j / j!
        for (int j = 0; j < 200; ++j) {
            if (j > 0) {
                mu_pow_over_fact *= mu / j;
                magnitude *= x / j;
                if (magnitude < 1e-18) {
                    break;
                }
            }
            F.poly_coeffs.resize(p + j + 2, 0.0);
            F.poly_coeffs[p + j + 1] = mu_pow_over_fact / (p + j + 1);
        }
    } else {
        // e^{mu w} sum_{j=0}^p (-1)^j p!/(p-j)! w^{p-j} / mu^{j+1}
        F.exp_coeffs.assign(p + 1, 0.0);
        double c = 1.0 / mu;
        for (int j = 0; j <= p; ++j) {
            if (j > 0) {
                c *= -static_cast<double>(p - j + 1) / mu;
            }
            F.exp_coeffs[p - j] = c;
        }
    }
    return F;
}

}  // namespace

ExpPoly shift_integrate(const ExpPoly& f, double T, const KernelParams& params,
                        double series_cutoff)
{
    if (!(T > 0.0)) {
        throw std::domain_error("shift_integrate: T must be positive");
    }
    if (f.domain_end() < T) {
        throw std::domain_error("shift_integrate: f is only valid up to " +
                                std::to_string(f.domain_end()) + " < T = " + std::to_string(T));
    }
    if (params.a == 0.0) {
        return ExpPoly::zero(T);
    }
    // g(z) = a e^{-k z} [F(T) - F(z)] with F' = f(w) e^{k w}, k = a - b.
    const RateExpr kernel = params.a == params.b ? RateExpr{} : RateExpr{1, -1};
    const RateExpr back = -kernel;
    const bool series = near_degenerate(params, T, series_cutoff);

    std::vector<ExpPolyTerm> out;
    for (const ExpPolyTerm& t : f.terms()) {
        const RateExpr mu_rate = t.rate + kernel;
        const Antiderivative F = antiderivative(t.power, mu_rate.value(params),
                                                mu_rate.is_zero(), T, series);
        const double scale = params.a * t.coeff;
        out.push_back({scale * F(T), 0, back});
        for (std::size_t j = 0; j < F.exp_coeffs.size(); ++j) {
            if (F.exp_coeffs[j] != 0.0) {
                out.push_back({-scale * F.exp_coeffs[j], static_cast<int>(j), t.rate});
            }
        }
        for (std::size_t j = 0; j < F.poly_coeffs.size(); ++j) {
            if (F.poly_coeffs[j] != 0.0) {
                out.push_back({-scale * F.poly_coeffs[j], static_cast<int>(j), back});
            }
        }
    }
    return ExpPoly(std::move(out), T);
}

double integrate_over_domain(const ExpPoly& f, double T, const KernelParams& params,
                             double series_cutoff)
{
    if (!(T >= 0.0) || T > f.domain_end()) {
        throw std::domain_error("integrate_over_domain: T = " + std::to_string(T) +
                                " outside [0, " + std::to_string(f.domain_end()) + "]");
    }
    const bool series = near_degenerate(params, T, series_cutoff);
    double sum = 0.0;
    for (const ExpPolyTerm& t : f.terms()) {
        const Antiderivative F =
            antiderivative(t.power, t.rate.value(params), t.rate.is_zero(), T, series);
        sum += t.coeff * (F(T) - F(0.0));
    }
    return sum;
}

}  // namespace hawkes_moments
