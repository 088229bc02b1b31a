#include "ivboot/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ivboot/diagnostics.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/harness.hpp"
#include "ivboot/reference_tables.hpp"
#include "ivboot/simgen.hpp"
#include "ivboot/stats.hpp"

namespace ivboot::cli {

namespace {

struct Flags {
    std::optional<std::string> config_path;
    std::optional<int> table;
    std::optional<int> reps;
    std::optional<int> boot_reps;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> error;
    std::optional<double> concentration;
    std::optional<int> n;
    std::optional<int> q;
    std::optional<std::string> grid;
    double beta0 = 1.0;
    std::string out;
    std::string report;
    std::string format = "csv";
    int threads = 0;
    std::string check = "all";
};

// Registers the shared flag set on one subcommand.
void add_common(CLI::App& app, Flags& f, bool with_table_default) {
    const SimConfig d = table_config(1);
    app.add_option("--config", f.config_path, "JSON config file with SimConfig field names");
    app.add_option("--table", f.table, with_table_default ? "Reference table 1..4 (default 1)"
                                                          : "Start from the settings of reference table 1..4")
        ->check(CLI::Range(1, kNumReferenceTables));
    app.add_option("--reps", f.reps, "Monte Carlo replications per grid point (default " + std::to_string(d.reps) + ")");
    app.add_option("--boot-reps", f.boot_reps, "Bootstrap draws (default " + std::to_string(d.boot_reps) + ")");
    app.add_option("--alpha", f.alpha, "Nominal level (default 0.05)");
    app.add_option("--seed", f.seed, "Master seed (default " + std::to_string(d.master_seed) + ")");
    app.add_option("--error", f.error, "Error law: gauss|laplace|hetero-linear|hetero-periodic (default gauss)");
    app.add_option("--concentration", f.concentration, "Concentration constant c (default 4)");
    app.add_option("--n", f.n, "Sample size (default " + std::to_string(d.n) + ")");
    app.add_option("--q", f.q, "Number of instruments (default " + std::to_string(d.q) + ")");
    app.add_option("--grid", f.grid, "Hypothesized values as start:step:end (default: table grid)");
    app.add_option("--out", f.out, "Output file (default: standard output)");
    app.add_option("--format", f.format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", f.threads, "Worker threads, 0 = IVBOOT_THREADS or hardware")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

SimConfig resolve_config(const Flags& f) {
    SimConfig c = table_config(f.table.value_or(1));
    if (f.config_path) {
        std::ifstream in(*f.config_path);
        if (!in) throw ConfigError("cannot open config file '" + *f.config_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed config: ") + e.what());
        }
        c = config_from_json(j, c);
    }
    if (f.reps) c.reps = *f.reps;
    if (f.boot_reps) c.boot_reps = *f.boot_reps;
    if (f.alpha) c.alpha = *f.alpha;
    if (f.seed) c.master_seed = *f.seed;
    if (f.error) c.error.kind = parse_error_kind(*f.error);
    if (f.concentration) c.concentration = *f.concentration;
    if (f.n) c.n = *f.n;
    if (f.q) c.q = *f.q;
    if (f.grid) c.beta_grid = parse_grid(*f.grid);
    c.validate();
    return c;
}

void emit(const Flags& f, const std::string& text, std::ostream& out) {
    if (f.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + f.out + "'");
    file << text;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

IvSample cli_sample(const SimConfig& c) {
    return gen_sample(c, c.beta_star, RngStream{c.master_seed, 0}.substream(stream_tag::sample));
}

std::string sample_text(const IvSample& s, const std::string& format) {
    if (format == "json") {
        nlohmann::json j;
        j["y1"] = std::vector<double>(s.y1.data(), s.y1.data() + s.y1.size());
        j["y2"] = std::vector<double>(s.y2.data(), s.y2.data() + s.y2.size());
        auto z = nlohmann::json::array();
        for (int r = 0; r < s.z.rows(); ++r) {
            const Vec row = s.z.row(r).transpose();
            z.push_back(std::vector<double>(row.data(), row.data() + row.size()));
        }
        j["z"] = z;
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "y1,y2";
    for (int r = 0; r < s.z.rows(); ++r) os << ",z" << r + 1;
    os << '\n';
    for (int i = 0; i < s.n(); ++i) {
        os << fmt(s.y1(i)) << ',' << fmt(s.y2(i));
        for (int r = 0; r < s.z.rows(); ++r) os << ',' << fmt(s.z(r, i));
        os << '\n';
    }
    return os.str();
}

std::string battery_text(const TestBattery& b, const std::string& format) {
    if (format == "json") return to_json(b).dump(2) + "\n";
    std::ostringstream os;
    os << "test,statistic,critical_value,reject\n";
    for (const auto& o : b.outcomes) {
        os << o.name << ',' << fmt(o.statistic) << ',' << fmt(o.critical_value) << ',' << (o.reject ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string table_text(const PowerTable& t, const std::string& format) {
    return format == "json" ? to_json(t).dump(2) + "\n" : to_csv(t);
}

nlohmann::json diagnose(const SimConfig& c, const std::string& check, int threads) {
    const RngStream root{c.master_seed, 0};
    const bool all = check == "all";
    nlohmann::json j;
    if (all || check == "deviation") {
        const Mat x2 = Mat::Identity(c.q, c.q);
        const double g = default_deviation_g(x2);
        const auto k = deviation_constants(x2, g);
        auto pts = nlohmann::json::array();
        for (double x : {0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}) {
            pts.push_back({{"x", x}, {"z2", z_function({x, x2, g})}});
        }
        j["deviation"] = {{"dim", c.q}, {"g", g}, {"x_low", k.x_low}, {"x_c", k.x_c}, {"values", pts}};
    }
    if (all || check == "bernstein") {
        // sum of n Rademacher-signed rank-one 2 x 2 projections scaled by 1/sqrt(n)
        const int n = c.n;
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        MatrixSampler summand = [scale](RngEngine& eng, int i) {
            Mat m = Mat::Zero(2, 2);
            m(i % 2, i % 2) = (eng() & 1u) ? scale : -scale;
            return m;
        };
        const double sigma2 = std::ceil(n / 2.0) * scale * scale;
        std::vector<double> grid{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
        const auto tail = empirical_opnorm_tail(summand, n, grid, c.reps, root.substream(1), threads);
        auto pts = nlohmann::json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            pts.push_back({{"t", grid[i]}, {"empirical", tail[i]}, {"bound", bernstein_bound(grid[i], sigma2, scale, 2)}});
        }
        j["bernstein"] = {{"n", n}, {"reps", c.reps}, {"sigma2", sigma2}, {"tail", pts}};
    }
    if (all || check == "gauss-compare") {
        auto pts = nlohmann::json::array();
        const Mat s0 = Mat::Identity(c.q, c.q);
        for (double gap : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            const Mat s1 = (1.0 + gap) * s0;
            const auto r = gauss_compare_distance(s0, s1, c.reps, root.substream(2));
            pts.push_back({{"gap", gap}, {"distance", r.empirical_kolmogorov}, {"bound_factor", r.bound_factor}});
        }
        j["gauss_compare"] = pts;
    }
    if (all || check == "gar") {
        const std::vector<int> sizes{10, 20, 40, 80, 160};
        const auto pts = gar_scaling_check(SummandLaw::rademacher_product, c.q, sizes, c.reps, root.substream(3), threads);
        auto arr = nlohmann::json::array();
        std::vector<double> xs, ys;
        for (const auto& p : pts) {
            arr.push_back({{"n", p.n}, {"distance", p.distance}, {"dkw", p.dkw}});
            xs.push_back(p.n);
            ys.push_back(std::max(p.distance, 1e-12));
        }
        j["gar"] = {{"law", "rademacher_product"}, {"points", arr}, {"loglog_slope", stats::loglog_slope(xs, ys)}};
    }
    if (all || check == "fsc") {
        Vec theta = Vec::Zero(c.q);
        for (int i = 2; i < c.q; ++i) theta(i) = 1.0 / (i + 1);
        auto eng = root.substream(4).engine();
        const auto design = linear_iv_design(c.n, theta, 1.0, eng);
        j["fsc"] = to_json(fsc_design_check(design));
    }
    if (j.is_null()) throw ConfigError("unknown diagnostic '" + check + "'");
    return j;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak-instrument testing with multiplier bootstrap likelihood ratios", "ivboot"};
    app.require_subcommand(1, 1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "Generate one sample at the true beta and write it");
    add_common(*simulate, f, true);

    auto* power = app.add_subcommand("power", "Rejection frequencies of all five tests over a grid");
    add_common(*power, f, true);

    auto* test = app.add_subcommand("test", "Run all five tests on one generated sample");
    add_common(*test, f, true);
    test->add_option("--beta0", f.beta0, "Hypothesized beta")->capture_default_str();

    auto* reproduce = app.add_subcommand("reproduce-table", "Rerun a reference power table and compare");
    add_common(*reproduce, f, false);
    reproduce->add_option("--report", f.report, "Comparison report JSON file (default: standard error)");

    auto* diag = app.add_subcommand("diagnose", "Concentration and finite-sample condition diagnostics (JSON)");
    add_common(*diag, f, true);
    diag->add_option("--check", f.check, "Which diagnostic")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "deviation", "bernstein", "gauss-compare", "gar", "fsc"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (reproduce->parsed() && !f.table) throw ConfigError("reproduce-table requires --table");
        const SimConfig c = resolve_config(f);
        if (simulate->parsed()) {
            emit(f, sample_text(cli_sample(c), f.format), out);
        } else if (test->parsed()) {
            const PowerStudy study(c, f.threads);
            auto eng = RngStream{c.master_seed, 0}.substream(stream_tag::sample).engine();
            const auto sample = gen_sample(c, study.design(), c.beta_star, eng);
            const auto battery =
                study.run_tests(sample, f.beta0, RngStream{c.master_seed, 0}.substream(stream_tag::bootstrap));
            emit(f, battery_text(battery, f.format), out);
        } else if (power->parsed()) {
            emit(f, table_text(power_curve(c, f.threads), f.format), out);
        } else if (reproduce->parsed()) {
            const auto table = power_curve(c, f.threads);
            emit(f, table_text(table, f.format), out);
            const auto report = compare_to_reference(table, *f.table);
            const std::string rep = to_json(report).dump(2) + "\n";
            if (f.report.empty()) {
                err << rep;
            } else {
                std::ofstream file(f.report, std::ios::binary);
                if (!file) throw ConfigError("cannot write '" + f.report + "'");
                file << rep;
            }
            err << "table " << *f.table << ": " << fmt(100.0 * report.frac_within_tight) << "% of cells within "
                << kTightTolerance << ", " << fmt(100.0 * report.frac_within_loose) << "% within " << kLooseTolerance
                << (report.pass ? " (pass)\n" : " (FAIL)\n");
            return report.pass ? kExitOk : kExitComparisonFailed;
        } else if (diag->parsed()) {
            emit(f, diagnose(c, f.check, f.threads).dump(2) + "\n", out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

} // namespace ivboot::cli
