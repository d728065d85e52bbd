#include "hawkes_moments/hawkes.hpp"
#include "hawkes_moments/simulator.hpp"
#include "oracles.hpp"
#include "stats.hpp"

#include <doctest.h>

#include <sstream>

using namespace hawkes_moments;
using namespace hawkes_moments::sim;

namespace {

const KernelParams kParams{0.5, 1.0, 1.0};

std::vector<double> counts_at(const KernelParams& p, double t, Method method, std::size_t n,
                              std::uint64_t seed)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = substream(seed, i);
        x[i] = static_cast<double>(count_at(simulate(p, t, method, rng), QueryTimes{t})[0]);
    }
    return x;
}

}  // namespace

TEST_CASE("config and method names")
{
    CHECK(parse_method("cluster") == Method::cluster);
    CHECK(parse_method("thinning") == Method::thinning);
    CHECK(to_string(Method::thinning) == "thinning");
    CHECK_THROWS_AS(parse_method("ogata"), std::invalid_argument);
    MCConfig cfg;
    cfg.n_paths = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("cluster simulation refuses a >= b")
{
    Rng rng = substream(1, 0);
    CHECK_THROWS_AS(simulate_cluster({1.0, 1.0, 1.0}, 2.0, rng), SupercriticalError);
    CHECK_THROWS_AS(simulate_family({2.0, 1.0, 1.0}, rng), SupercriticalError);
    CHECK_NOTHROW(simulate_thinning({1.0, 1.0, 1.0}, 2.0, rng));
}

TEST_CASE("samples are sorted and inside the horizon")
{
    for (Method m : {Method::cluster, Method::thinning}) {
        for (std::uint64_t i = 0; i < 200; ++i) {
            Rng rng = substream(5, i);
            const EventSample s = simulate(kParams, 3.0, m, rng);
            CHECK(std::is_sorted(s.events.begin(), s.events.end()));
            for (double e : s.events) {
                CHECK(e >= 0.0);
                CHECK(e <= 3.0);
            }
        }
    }
}

TEST_CASE("no immigrants, no events")
{
    Rng rng = substream(9, 0);
    CHECK(simulate_thinning({0.5, 1.0, 0.0}, 5.0, rng).events.empty());
    CHECK(simulate_cluster({0.5, 1.0, 0.0}, 5.0, rng).events.empty());
}

TEST_CASE("reproducibility")
{
    Rng r1 = substream(42, 7);
    Rng r2 = substream(42, 7);
    CHECK(simulate_cluster(kParams, 4.0, r1).events == simulate_cluster(kParams, 4.0, r2).events);
    Rng r3 = substream(42, 8);
    Rng r4 = substream(42, 7);
    CHECK(simulate_thinning(kParams, 4.0, r3).events !=
          simulate_thinning(kParams, 4.0, r4).events);

    MCConfig cfg;
    cfg.n_paths = 5000;
    cfg.seed = 3;
    const auto serial = estimate_joint_moment(kParams, {1.0, 2.0}, cfg);
    cfg.threads = 3;
    const auto threaded = estimate_joint_moment(kParams, {1.0, 2.0}, cfg);
    CHECK(serial.value == threaded.value);
    CHECK(serial.std_error == threaded.std_error);
    CHECK(serial.n_samples == 5000);
}

TEST_CASE("count_at")
{
    EventSample empty{{}, 3.0};
    CHECK(count_at(empty, {1.0, 2.0}) == std::vector<std::size_t>{0, 0});
    EventSample two{{0.5, 1.5}, 2.0};
    CHECK(count_at(two, {1.0, 2.0}) == std::vector<std::size_t>{1, 2});
    CHECK(count_at(two, {1.5}) == std::vector<std::size_t>{2});
    CHECK_THROWS_AS(count_at(two, {2.5}), std::domain_error);

    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng = substream(11, i);
        const EventSample s = simulate(kParams, 2.0, Method::cluster, rng);
        const auto c = count_at(s, {0.1, 0.5, 0.5, 1.0, 1.7, 2.0});
        CHECK(std::is_sorted(c.begin(), c.end()));
        CHECK(c.back() == s.events.size());
    }
}

TEST_CASE("Poisson case")
{
    const KernelParams poisson{0.0, 1.0, 1.0};
    for (Method m : {Method::cluster, Method::thinning}) {
        const auto x = counts_at(poisson, 2.0, m, 100000, 17);
        const auto mean = stats::mean_se(x);
        const auto var = stats::variance_se(x);
        CHECK(std::abs(stats::z_score(mean.mean, 2.0, mean.se)) <= 4.0);
        CHECK(std::abs(stats::z_score(var.mean, 2.0, var.se)) <= 4.0);
    }
    MCConfig cfg;
    cfg.n_paths = 20000;
    const auto est = estimate_joint_moment(poisson, {2.0}, cfg);
    CHECK(std::abs(stats::z_score(est.value, 2.0, est.std_error)) <= 4.0);
}

TEST_CASE("family sizes and offspring")
{
    const std::size_t n = 100000;
    std::vector<double> size(n);
    std::vector<double> offspring(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = substream(23, i);
        const FamilyStats f = simulate_family(kParams, rng);
        size[i] = static_cast<double>(f.size);
        offspring[i] = static_cast<double>(f.offspring);
    }
    const double mu = kParams.branching_ratio();
    const auto per_event = stats::ratio_se(offspring, size);
    CHECK(std::abs(stats::z_score(per_event.mean, mu, per_event.se)) <= 4.0);
    const auto mean_size = stats::mean_se(size);
    CHECK(std::abs(stats::z_score(mean_size.mean, 1.0 / (1.0 - mu), mean_size.se)) <= 4.0);
}

TEST_CASE("moments against the analytic values")
{
    HawkesMoments engine(kParams);
    MCConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 29;
    cfg.threads = 4;
    const auto first = estimate_joint_moment(kParams, {2.0}, cfg);
    CHECK(std::abs(stats::z_score(first.value, oracle::first_moment(0.5, 1.0, 2.0),
                                  first.std_error)) <= 4.0);
    const auto second = estimate_joint_moment(kParams, {1.0, 2.0}, cfg);
    CHECK(std::abs(stats::z_score(second.value, oracle::second_joint_moment(0.5, 1.0, 1.0, 2.0),
                                  second.std_error)) <= 4.0);
    const auto third = estimate_joint_moment(kParams, {2.0, 2.0, 2.0}, cfg);
    CHECK(std::abs(stats::z_score(third.value, engine.univariate_moment(3, 2.0),
                                  third.std_error)) <= 4.0);
}

TEST_CASE("cluster and thinning agree")
{
    const auto c = counts_at(kParams, 2.0, Method::cluster, 100000, 31);
    const auto t = counts_at(kParams, 2.0, Method::thinning, 100000, 37);
    CHECK(std::abs(stats::two_sample_z(stats::mean_se(c), stats::mean_se(t))) <= 4.0);
    CHECK(std::abs(stats::two_sample_z(stats::variance_se(c), stats::variance_se(t))) <= 4.0);
}

TEST_CASE("intensity path")
{
    Rng rng = substream(41, 0);
    const EventSample s = simulate(kParams, 10.0, Method::cluster, rng);
    REQUIRE(!s.events.empty());
    CHECK(intensity_at(s, kParams, 0.0) == kParams.nu + (s.events.front() == 0.0 ? kParams.a : 0.0));
    for (double e : s.events) {
        const double before = intensity_at(s, kParams, std::nextafter(e, 0.0));
        const double after = intensity_at(s, kParams, e);
        // Events may share a time only with probability zero.
        CHECK(after - before == doctest::Approx(kParams.a).epsilon(1e-9));
    }

    const auto path = path_on_grid(s, kParams, 0.01);
    CHECK(path.front().t == 0.0);
    CHECK(path.front().intensity == kParams.nu);
    CHECK(path.back().t == doctest::Approx(10.0));
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& p = path[i - 1];
        const auto& q = path[i];
        CHECK(q.count >= p.count);
        if (q.count == p.count) {
            const double want = (p.intensity - kParams.nu) * std::exp(-kParams.b * (q.t - p.t));
            CHECK(std::abs((q.intensity - kParams.nu) - want) <= 1e-9 * want + 1e-15);
        }
    }

    std::ostringstream os;
    write_path_csv(os, {{0.0, 0, 1.0}, {0.5, 2, 1.25}});
    CHECK(os.str() == "t,X,lambda\n0,0,1\n0.5,2,1.25\n");
    CHECK_THROWS_AS(path_on_grid(s, kParams, 0.0), std::domain_error);

    Rng r1 = substream(43, 0);
    Rng r2 = substream(43, 0);
    const auto exported = export_path(kParams, 5.0, 0.1, r1);
    const auto rebuilt = path_on_grid(simulate(kParams, 5.0, Method::cluster, r2), kParams, 0.1);
    REQUIRE(exported.size() == rebuilt.size());
    REQUIRE(exported.size() == 51);
    for (std::size_t i = 0; i < exported.size(); ++i) {
        CHECK(exported[i].count == rebuilt[i].count);
        CHECK(exported[i].intensity == rebuilt[i].intensity);
    }
}
