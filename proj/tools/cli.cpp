#include "cli.hpp"

#include "hawkes_moments/borel.hpp"
#include "hawkes_moments/combinatorics.hpp"
#include "hawkes_moments/hawkes.hpp"
#include "hawkes_moments/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hawkes_moments::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string shortest(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct ModelFlags {
    double a{0.5};
    double b{1.0};
    double nu{1.0};
    std::size_t max_order{8};
    std::size_t threads{1};

    KernelParams params() const { return {a, b, nu}; }
    EngineOptions options() const
    {
        EngineOptions o;
        o.max_order = max_order;
        o.threads = threads;
        return o;
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool require_kernel)
{
    auto* a = cmd->add_option("--a", f.a, "offspring kernel amplitude (a >= 0)");
    auto* b = cmd->add_option("--b", f.b, "kernel decay rate (b > 0)");
    if (require_kernel) {
        a->required();
        b->required();
    } else {
        a->capture_default_str();
        b->capture_default_str();
    }
    cmd->add_option("--nu", f.nu, "immigrant intensity")->capture_default_str();
    cmd->add_option("--max-order", f.max_order, "largest accepted order")
        ->capture_default_str()
        ->check(CLI::Range(1, static_cast<int>(kDefaultPartitionCap)));
    cmd->add_option("--threads", f.threads, "worker threads")->capture_default_str();
}

void warn_if_supercritical(const KernelParams& p, std::ostream& err)
{
    if (!p.subcritical()) {
        err << "warning: a >= b (branching ratio " << p.branching_ratio()
            << "); only finite-horizon values are meaningful\n";
    }
}

void print_value(std::ostream& out, double v)
{
    out << std::setprecision(12) << v << '\n';
}

int cmd_moment_or_cumulant(const ModelFlags& flags, const std::vector<double>& times,
                           bool cumulant, std::ostream& out, std::ostream& err)
{
    const KernelParams params = flags.params();
    params.validate();
    warn_if_supercritical(params, err);
    HawkesMoments engine(params, flags.options());
    const QueryTimes q(times);
    print_value(out, cumulant ? engine.joint_cumulant(q) : engine.joint_moment(q));
    return kOk;
}

struct GridFlags {
    std::vector<std::string> axes;
    std::string output;
};

int cmd_grid(const ModelFlags& flags, const GridFlags& grid, std::ostream& out,
             std::ostream& err)
{
    const KernelParams params = flags.params();
    params.validate();
    warn_if_supercritical(params, err);

    std::vector<GridAxis> axes;
    std::vector<std::size_t> free_axes;
    for (const std::string& text : grid.axes) {
        axes.push_back(parse_grid_axis(text));
        if (axes.back().free) {
            free_axes.push_back(axes.size() - 1);
        }
    }
    if (free_axes.size() > 2) {
        throw std::invalid_argument("grid: at most two free time variables");
    }
    if (axes.size() > flags.max_order) {
        throw SizeLimitError("grid: order " + std::to_string(axes.size()) +
                             " exceeds the cap of " + std::to_string(flags.max_order));
    }

    std::ofstream file(grid.output);
    if (!file) {
        throw IoError("grid: cannot write " + grid.output);
    }
    for (std::size_t i : free_axes) {
        file << 't' << (i + 1) << ',';
    }
    file << "moment\n";

    HawkesMoments engine(params, flags.options());
    const std::size_t outer = free_axes.empty() ? 1 : axes[free_axes[0]].steps;
    const std::size_t inner = free_axes.size() < 2 ? 1 : axes[free_axes[1]].steps;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < outer; ++i) {
        for (std::size_t j = 0; j < inner; ++j) {
            std::vector<double> times;
            for (const GridAxis& ax : axes) {
                times.push_back(ax.start);
            }
            if (!free_axes.empty()) {
                times[free_axes[0]] = axes[free_axes[0]].at(i);
            }
            if (free_axes.size() == 2) {
                times[free_axes[1]] = axes[free_axes[1]].at(j);
            }
            // X_0 = 0 almost surely.
            const bool at_origin = std::any_of(times.begin(), times.end(),
                                               [](double t) { return t == 0.0; });
            const double value = at_origin ? 0.0 : engine.joint_moment(QueryTimes(times));
            for (std::size_t k : free_axes) {
                file << shortest(times[k]) << ',';
            }
            file << shortest(value) << '\n';
            ++rows;
        }
    }
    file.flush();
    if (!file) {
        throw IoError("grid: write failed for " + grid.output);
    }
    out << "wrote " << rows << " rows to " << grid.output << '\n';
    return kOk;
}

struct ValidateFlags {
    std::vector<double> times;
    std::size_t paths{100000};
    std::uint64_t seed{1};
    std::string method{"cluster"};
    double analytic_scale{1.0};
};

int cmd_validate(const ModelFlags& flags, const ValidateFlags& v, std::ostream& out,
                 std::ostream& err)
{
    const KernelParams params = flags.params();
    params.validate();
    warn_if_supercritical(params, err);
    if (v.paths < 1000) {
        throw std::invalid_argument("validate: need at least 1000 paths");
    }
    const QueryTimes q(v.times);
    HawkesMoments engine(params, flags.options());
    const double analytic = engine.joint_moment(q) * v.analytic_scale;

    sim::MCConfig cfg;
    cfg.n_paths = v.paths;
    cfg.horizon = q.back();
    cfg.seed = v.seed;
    cfg.method = sim::parse_method(v.method);
    cfg.threads = flags.threads;
    const sim::MomentEstimate est = sim::estimate_joint_moment(params, q, cfg);

    double z = 0.0;
    if (est.std_error > 0.0) {
        z = (est.value - analytic) / est.std_error;
    } else if (est.value != analytic) {
        z = std::numeric_limits<double>::infinity();
    }
    const bool pass = std::abs(z) <= 4.0;

    nlohmann::json report = {
        {"times", std::vector<double>(q.times().begin(), q.times().end())},
        {"a", params.a},
        {"b", params.b},
        {"nu", params.nu},
        {"method", v.method},
        {"analytic", analytic},
        {"estimate",
         {{"value", est.value},
          {"std_error", est.std_error},
          {"n_samples", est.n_samples},
          {"seed", v.seed}}},
        {"z", std::isfinite(z) ? nlohmann::json(z) : nlohmann::json(nullptr)},
        {"pass", pass},
    };
    out << report.dump() << '\n';
    return pass ? kOk : kValidationFailed;
}

struct BorelFlags {
    double mu{0.5};
    std::size_t n{1};
    std::string which;
};

int cmd_borel(const BorelFlags& f, std::ostream& out)
{
    const borel::BorelParam mu(f.mu);
    double value = 0.0;
    if (f.which == "pmf") {
        value = borel::pmf(f.n, mu);
    } else if (f.which == "cumulant") {
        if (f.n > kDefaultPartitionCap) {
            throw SizeLimitError("borel: order above " + std::to_string(kDefaultPartitionCap));
        }
        value = borel::cumulant(f.n, mu);
    } else {
        if (f.n > kDefaultPartitionCap) {
            throw SizeLimitError("borel: order above " + std::to_string(kDefaultPartitionCap));
        }
        value = borel::moment(f.n, mu);
    }
    print_value(out, value);
    return kOk;
}

struct BenchFlags {
    double t{2.0};
};

int cmd_bench(const ModelFlags& flags, const BenchFlags& bench, std::ostream& out, std::ostream& err)
{
    const KernelParams params = flags.params();
    params.validate();
    warn_if_supercritical(params, err);
    HawkesMoments engine(params, flags.options());
    out << "# univariate cumulants and moments of X_t, t = " << bench.t << ", a = " << params.a
        << ", b = " << params.b << ", nu = " << params.nu << '\n'
        << "# term counts are terms of the numeric exponential-polynomial representation"
        << " used here;\n# they are not comparable to summand counts of symbolic expansions\n";
    out << "order,kappa_z_terms,integrand_terms,cumulant,moment,seconds\n";
    for (std::size_t n = 1; n <= flags.max_order; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const ExpPoly kz = engine.kappa_z_univariate(n, bench.t);
        const ExpPoly integrand = engine.univariate_cumulant_integrand(n, bench.t);
        const double cumulant = engine.univariate_cumulant(n, bench.t);
        const double moment = engine.univariate_moment(n, bench.t);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        out << n << ',' << kz.size() << ',' << integrand.size() << ','
            << std::setprecision(12) << cumulant << ',' << moment << ','
            << std::setprecision(3) << elapsed.count() << '\n';
    }
    return kOk;
}

struct PathFlags {
    double horizon{10.0};
    double step{0.01};
    std::uint64_t seed{1};
    std::string method{"cluster"};
    std::string output{"-"};
};

int cmd_path(const ModelFlags& flags, const PathFlags& p, std::ostream& out, std::ostream& err)
{
    const KernelParams params = flags.params();
    params.validate();
    warn_if_supercritical(params, err);
    sim::Rng rng = sim::substream(p.seed, 0);
    const auto path = sim::export_path(params, p.horizon, p.step, rng, sim::parse_method(p.method));
    if (p.output == "-") {
        sim::write_path_csv(out, path);
        return kOk;
    }
    std::ofstream file(p.output);
    if (!file) {
        throw IoError("path: cannot write " + p.output);
    }
    sim::write_path_csv(file, path);
    file.flush();
    if (!file) {
        throw IoError("path: write failed for " + p.output);
    }
    return kOk;
}

}  // namespace

double GridAxis::at(std::size_t i) const
{
    if (!free || steps < 2) {
        return start;
    }
    if (i + 1 == steps) {
        return stop;
    }
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

GridAxis parse_grid_axis(const std::string& text)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || !std::isfinite(v)) {
            throw std::invalid_argument("grid: cannot parse '" + text + "'");
        }
        return v;
    };
    GridAxis axis;
    const auto first = text.find(':');
    if (first == std::string::npos) {
        axis.start = axis.stop = number(text);
        if (axis.start < 0.0) {
            throw std::invalid_argument("grid: times must be nonnegative");
        }
        return axis;
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) {
        throw std::invalid_argument("grid: expected start:stop:steps, got '" + text + "'");
    }
    axis.free = true;
    axis.start = number(text.substr(0, first));
    axis.stop = number(text.substr(first + 1, second - first - 1));
    const double steps = number(text.substr(second + 1));
    if (!(axis.start < axis.stop) || axis.start < 0.0) {
        throw std::invalid_argument("grid: need 0 <= start < stop in '" + text + "'");
    }
    if (steps < 2.0 || steps != std::floor(steps) || steps > 1e6) {
        throw std::invalid_argument("grid: steps must be an integer >= 2 in '" + text + "'");
    }
    axis.steps = static_cast<std::size_t>(steps);
    return axis;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Joint moments and cumulants of exponential-kernel Hawkes processes"};
    app.require_subcommand(1);

    ModelFlags moment_flags;
    std::vector<double> moment_times;
    auto* moment = app.add_subcommand("moment", "joint moment E[X_t1 ... X_tn]");
    add_model_flags(moment, moment_flags, true);
    moment->add_option("times", moment_times, "observation times")->required();

    ModelFlags cumulant_flags;
    std::vector<double> cumulant_times;
    auto* cumulant = app.add_subcommand("cumulant", "joint cumulant of X_t1, ..., X_tn");
    add_model_flags(cumulant, cumulant_flags, true);
    cumulant->add_option("times", cumulant_times, "observation times")->required();

    ModelFlags grid_model;
    GridFlags grid_flags;
    auto* grid = app.add_subcommand("grid", "joint moments on a grid of times, as CSV");
    add_model_flags(grid, grid_model, true);
    grid->add_option("-o,--output", grid_flags.output, "CSV output path")->required();
    grid->add_option("axes", grid_flags.axes,
                     "one entry per time: a fixed value or start:stop:steps")
        ->required();

    ModelFlags validate_model;
    ValidateFlags validate_flags;
    auto* validate = app.add_subcommand("validate", "compare a moment against Monte Carlo");
    add_model_flags(validate, validate_model, true);
    validate->add_option("--paths", validate_flags.paths, "Monte Carlo paths")
        ->capture_default_str();
    validate->add_option("--seed", validate_flags.seed, "master seed")->capture_default_str();
    validate->add_option("--method", validate_flags.method, "cluster or thinning")
        ->check(CLI::IsMember({"cluster", "thinning"}))
        ->capture_default_str();
    validate->add_option("--analytic-scale", validate_flags.analytic_scale)
        ->group("");  // test hook: perturbs the analytic value
    validate->add_option("times", validate_flags.times, "observation times")->required();

    BorelFlags borel_flags;
    auto* borel_cmd = app.add_subcommand("borel", "Borel distribution values");
    borel_cmd->add_option("--mu", borel_flags.mu, "offspring mean in (0, 1)")->required();
    borel_cmd->add_option("--n", borel_flags.n, "order or support point")->required();
    borel_cmd->add_option("which", borel_flags.which, "pmf, cumulant or moment")
        ->required()
        ->check(CLI::IsMember({"pmf", "cumulant", "moment"}));

    ModelFlags bench_model;
    BenchFlags bench_flags;
    bench_model.max_order = 6;
    auto* bench = app.add_subcommand("bench", "timings and term counts per order");
    add_model_flags(bench, bench_model, false);
    bench->add_option("--t", bench_flags.t, "observation time")->capture_default_str();

    ModelFlags path_model;
    PathFlags path_flags;
    auto* path = app.add_subcommand("path", "simulated sample path of X_t and lambda_t, as CSV");
    add_model_flags(path, path_model, false);
    path->add_option("--horizon", path_flags.horizon)->capture_default_str();
    path->add_option("--step", path_flags.step)->capture_default_str();
    path->add_option("--seed", path_flags.seed)->capture_default_str();
    path->add_option("--method", path_flags.method)
        ->check(CLI::IsMember({"cluster", "thinning"}))
        ->capture_default_str();
    path->add_option("-o,--output", path_flags.output, "output path, - for stdout")
        ->capture_default_str();

    std::vector<const char*> argv;
    for (const std::string& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*moment) {
            return cmd_moment_or_cumulant(moment_flags, moment_times, false, out, err);
        }
        if (*cumulant) {
            return cmd_moment_or_cumulant(cumulant_flags, cumulant_times, true, out, err);
        }
        if (*grid) {
            return cmd_grid(grid_model, grid_flags, out, err);
        }
        if (*validate) {
            return cmd_validate(validate_model, validate_flags, out, err);
        }
        if (*borel_cmd) {
            return cmd_borel(borel_flags, out);
        }
        if (*bench) {
            return cmd_bench(bench_model, bench_flags, out, err);
        }
        if (*path) {
            return cmd_path(path_model, path_flags, out, err);
        }
    } catch (const SizeLimitError& e) {
        err << "error: " << e.what() << '\n';
        return kSizeCap;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::logic_error& e) {
        // domain_error, invalid_argument and friends: bad input
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace hawkes_moments::cli
