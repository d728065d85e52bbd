#include "hawkes_moments/combinatorics.hpp"
#include "hawkes_moments/hawkes.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace hawkes_moments;
using oracle::rel_err;

namespace {

const KernelParams kParams{0.5, 1.0, 1.0};

}  // namespace

TEST_CASE("parameters")
{
    CHECK_THROWS_AS((KernelParams{-0.1, 1.0, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((KernelParams{0.1, 0.0, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((KernelParams{0.1, 1.0, -1.0}.validate()), std::domain_error);
    CHECK(kParams.subcritical());
    CHECK(kParams.branching_ratio() == 0.5);
    CHECK_FALSE((KernelParams{1.0, 1.0, 1.0}.subcritical()));
    CHECK_THROWS_AS(HawkesMoments(kParams, {.max_order = 13}), std::invalid_argument);
}

TEST_CASE("query times")
{
    const QueryTimes q{2.0, 1.0, 2.0};
    CHECK(q.size() == 3);
    CHECK(q.front() == 1.0);
    CHECK(q.back() == 2.0);
    CHECK_THROWS_AS(QueryTimes({1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(QueryTimes({-1.0}), std::domain_error);
    CHECK_THROWS_AS(QueryTimes({std::nan("")}), std::domain_error);
}

TEST_CASE("first-order cluster cumulant")
{
    const double t = 2.0;
    const ExpPoly k = kappa_z_first(t, kParams);
    // Canonical order puts rate (-1, 1) before (0, 0).
    REQUIRE(k.size() == 2);
    CHECK(k.terms()[0].rate == RateExpr{-1, 1});
    CHECK(rel_err(k.terms()[0].coeff, 0.5 * std::exp(-0.5 * t) / (0.5 - 1.0)) < 1e-15);
    CHECK(k.terms()[1].rate == RateExpr{});
    CHECK(rel_err(k.terms()[1].coeff, 1.0 / (1.0 - 0.5)) < 1e-15);
    CHECK(rel_err(k.eval(0.0, kParams), 2.0 - std::exp(-1.0)) < 1e-15);
    CHECK(k.domain_end() == t);

    for (const KernelParams& p : {kParams, KernelParams{0.0, 1.0, 1.0}, KernelParams{0.8, 0.8, 1.0},
                                  KernelParams{2.0, 0.5, 1.0}}) {
        CHECK(kappa_z_first(1.3, p).eval(1.3, p) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const KernelParams poisson{0.0, 1.0, 1.0};
    const ExpPoly one = kappa_z_first(3.0, poisson);
    REQUIRE(one.size() == 1);
    CHECK(one.terms()[0] == ExpPolyTerm{1.0, 0, {}});

    const KernelParams equal{0.8, 0.8, 1.0};
    const ExpPoly lin = kappa_z_first(1.5, equal);
    REQUIRE(lin.size() == 2);
    CHECK(lin.terms()[0] == ExpPolyTerm{1.0 + 0.8 * 1.5, 0, {}});
    CHECK(lin.terms()[1] == ExpPolyTerm{-0.8, 1, {}});
    CHECK_THROWS_AS(kappa_z_first(0.0, kParams), std::domain_error);
}

TEST_CASE("higher cluster cumulants")
{
    HawkesMoments poisson({0.0, 1.0, 1.0});
    CHECK(poisson.kappa_z_joint({1.0, 2.0}).is_zero());
    CHECK(poisson.kappa_z_univariate(2, 2.0).is_zero());

    HawkesMoments engine(kParams);
    for (const QueryTimes& q : {QueryTimes{1.0, 2.0}, QueryTimes{2.0, 2.0, 2.0},
                                QueryTimes{0.5, 1.0, 1.5, 2.0}}) {
        const ExpPoly k = engine.kappa_z_joint(q);
        CHECK(k.domain_end() == q.front());
        CHECK(std::abs(k.eval(q.front(), kParams)) < 1e-12);
    }
}

TEST_CASE("second-order cluster cumulant against quadrature")
{
    const double a = kParams.a;
    const double b = kParams.b;
    HawkesMoments engine(kParams);
    for (auto [t1, t2] : {std::pair{2.0, 2.0}, std::pair{1.0, 2.0}, std::pair{0.7, 1.9}}) {
        const ExpPoly k = engine.kappa_z_joint({t1, t2});
        for (double z : {0.0, 0.25 * t1, 0.5 * t1, 0.9 * t1}) {
            auto integrand = [&](double y) {
                return a * oracle::kappa1(a, b, t1, z + y) * oracle::kappa1(a, b, t2, z + y) *
                       std::exp((a - b) * y);
            };
            CHECK(rel_err(k.eval(z, kParams), oracle::integrate(integrand, 0.0, t1 - z)) < 1e-8);
        }
    }
}

TEST_CASE("second cumulant against nested quadrature")
{
    const double a = kParams.a;
    const double b = kParams.b;
    const double t1 = 1.0;
    const double t2 = 2.0;
    auto k2 = [&](double z) {
        auto inner = [&](double y) {
            return a * oracle::kappa1(a, b, t1, z + y) * oracle::kappa1(a, b, t2, z + y) *
                   std::exp((a - b) * y);
        };
        return oracle::integrate(inner, 0.0, t1 - z);
    };
    auto integrand = [&](double z) {
        return k2(z) + oracle::kappa1(a, b, t1, z) * oracle::kappa1(a, b, t2, z);
    };
    HawkesMoments engine(kParams);
    CHECK(rel_err(engine.joint_cumulant({t1, t2}), oracle::integrate(integrand, 0.0, t1)) < 1e-8);
}

TEST_CASE("univariate Bell path equals the partition path")
{
    HawkesMoments engine(kParams);
    const double t = 2.0;
    CHECK(engine.kappa_z_univariate(1, t) == kappa_z_first(t, kParams));
    for (std::size_t n = 2; n <= 3; ++n) {
        const ExpPoly bell = engine.kappa_z_univariate(n, t);
        const ExpPoly part = engine.kappa_z_joint(QueryTimes(std::vector<double>(n, t)));
        for (double z : {0.0, 0.5, 1.0, 1.5, 1.9}) {
            CHECK(rel_err(bell.eval(z, kParams), part.eval(z, kParams)) < 1e-10);
        }
    }
    CHECK(engine.univariate_moment(0, t) == 1.0);
    for (std::size_t n = 1; n <= 5; ++n) {
        const QueryTimes q(std::vector<double>(n, t));
        CHECK(rel_err(engine.univariate_cumulant(n, t), engine.joint_cumulant(q)) < 1e-9);
        CHECK(rel_err(engine.univariate_moment(n, t), engine.joint_moment(q)) < 1e-9);
    }
}

TEST_CASE("first and second moments against the closed forms")
{
    HawkesMoments engine(kParams);
    CHECK(rel_err(engine.joint_cumulant({2.0}), oracle::first_moment(0.5, 1.0, 2.0)) < 1e-13);
    CHECK(rel_err(engine.joint_cumulant({2.0}), 2.0 + 2.0 * std::exp(-1.0)) < 1e-13);
    for (double t : {0.5, 1.0, 1.5, 2.0}) {
        CHECK(rel_err(engine.joint_moment({t, 2.0}),
                      oracle::second_joint_moment(0.5, 1.0, t, 2.0)) < 1e-9);
    }
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(rel_err(engine.univariate_moment(2, t), oracle::second_moment(0.5, 1.0, t)) < 1e-9);
        CHECK(rel_err(engine.joint_moment({t, t}), oracle::second_moment(0.5, 1.0, t)) < 1e-9);
    }
}

TEST_CASE("Poisson limit")
{
    const double nu = 1.7;
    HawkesMoments engine({0.0, 1.0, nu});
    CHECK(engine.joint_cumulant({2.0}) == doctest::Approx(nu * 2.0).epsilon(1e-14));
    for (const QueryTimes& q : {QueryTimes{0.3, 2.0}, QueryTimes{1.0, 1.0, 4.0},
                                QueryTimes{0.5, 1.5, 2.5, 3.5}}) {
        CHECK(std::abs(engine.joint_cumulant(q) - nu * q.front()) <= 1e-12 * nu * q.front());
    }
    CHECK(rel_err(engine.joint_moment({1.0, 2.0}), nu * 1.0 * (1.0 + nu * 2.0)) < 1e-14);
    // E[N_t^n] is the Touchard polynomial in nu t.
    for (std::size_t n = 1; n <= 5; ++n) {
        double touchard = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            touchard += oracle::stirling2(n, k) * std::pow(nu * 2.0, static_cast<double>(k));
        }
        CHECK(rel_err(engine.univariate_moment(n, 2.0), touchard) < 1e-12);
    }
}

TEST_CASE("symmetries")
{
    HawkesMoments engine(kParams);
    const double base = engine.joint_cumulant({0.5, 1.2, 2.0});
    CHECK(HawkesMoments(kParams).joint_cumulant({2.0, 0.5, 1.2}) == base);
    CHECK(HawkesMoments(kParams).joint_cumulant({1.2, 2.0, 0.5}) == base);
    CHECK(HawkesMoments(kParams).joint_moment({2.0, 1.2, 0.5}) ==
          HawkesMoments(kParams).joint_moment({0.5, 1.2, 2.0}));

    HawkesMoments doubled({0.5, 1.0, 2.0});
    for (const QueryTimes& q : {QueryTimes{2.0}, QueryTimes{1.0, 2.0}, QueryTimes{0.5, 1.2, 2.0},
                                QueryTimes{1.0, 1.0, 2.0, 2.0}}) {
        CHECK(rel_err(doubled.joint_cumulant(q), 2.0 * engine.joint_cumulant(q)) < 1e-12);
    }
}

TEST_CASE("moments are nondecreasing in each time")
{
    HawkesMoments engine(kParams);
    const std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0};
    for (double s : grid) {
        double prev = 0.0;
        for (double t : grid) {
            const double m = engine.joint_moment({s, t, 1.0});
            CHECK(m >= prev);
            prev = m;
        }
    }
}

TEST_CASE("continuity across a = b")
{
    const double a = 0.5;
    HawkesMoments equal({a, a, 1.0});
    HawkesMoments near({a, a * (1 + 1e-6), 1.0});
    for (const QueryTimes& q : {QueryTimes{2.0}, QueryTimes{1.0, 2.0}, QueryTimes{2.0, 2.0},
                                QueryTimes{0.5, 1.0, 2.0}, QueryTimes{2.0, 2.0, 2.0}}) {
        CHECK(rel_err(near.joint_cumulant(q), equal.joint_cumulant(q)) <= 1e-3);
        CHECK(rel_err(near.joint_moment(q), equal.joint_moment(q)) <= 1e-3);
    }
    // At a = b the mean is t + a t^2 / 2.
    CHECK(rel_err(equal.joint_cumulant({2.0}), 2.0 + 0.5 * 4.0 / 2.0) < 1e-14);
}

TEST_CASE("size cap")
{
    HawkesMoments engine(kParams, {.max_order = 3});
    CHECK_THROWS_AS(engine.joint_moment({1.0, 1.0, 1.0, 1.0}), SizeLimitError);
    CHECK_THROWS_AS(engine.univariate_moment(4, 1.0), SizeLimitError);
    CHECK(engine.joint_moment({}) == 1.0);
}

TEST_CASE("threaded fill is bit-identical to the serial path")
{
    const QueryTimes q{0.4, 0.9, 1.3, 1.3, 2.0};
    HawkesMoments serial(kParams);
    HawkesMoments threaded(kParams, {.threads = 4});
    CHECK(threaded.joint_moment(q) == serial.joint_moment(q));
    CHECK(threaded.joint_cumulant(q) == serial.joint_cumulant(q));
    CHECK(threaded.kappa_z_joint(q) == serial.kappa_z_joint(q));
}

TEST_CASE("cache hits are bit-identical")
{
    HawkesMoments engine(kParams);
    const QueryTimes q{0.8, 1.1, 2.0};
    const double first = engine.joint_moment(q);
    CHECK(engine.cache().size() > 0);
    CHECK(engine.joint_moment(q) == first);
    engine.cache().clear();
    CHECK(engine.cache().size() == 0);
    CHECK(engine.joint_moment(q) == first);
}

TEST_CASE("golden: univariate third-order cluster cumulant")
{
    HawkesMoments engine(kParams);
    std::ifstream in(std::string(HAWKES_GOLDEN_DIR) + "/kappa_z_3.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    REQUIRE(!ss.str().empty());
    CHECK(engine.kappa_z_univariate(3, 2.0).to_string() == ss.str());
}
