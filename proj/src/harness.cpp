#include "ivboot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "ivboot/benchmark_tests.hpp"
#include "ivboot/errors.hpp"
#include "ivboot/parallel.hpp"
#include "ivboot/stats.hpp"

namespace ivboot {

namespace {

RngStream root_stream(const SimConfig& c) { return RngStream{c.master_seed, 0}; }

Mat responses(const IvSample& s) {
    Mat y(s.n(), 2);
    y.col(0) = s.y1;
    y.col(1) = s.y2;
    return y;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

double null_lr_critical(const SimConfig& config, const SimDesign& design, int threads) {
    const auto root = root_stream(config).substream(stream_tag::lr_null);
    std::vector<double> stats_null(static_cast<std::size_t>(config.lr_null_reps));
    parallel_for(
        stats_null.size(),
        [&](std::size_t r) {
            auto eng = root.substream(r).engine();
            const IvSample s = gen_sample(config, design, config.beta_star, eng);
            const auto st = st_vectors(design.g_inv_sqrt, s.z * responses(s), s.omega, config.beta_star);
            stats_null[r] = t_clr(st);
        },
        threads);
    return stats::upper_quantile(std::move(stats_null), config.alpha);
}

PowerStudy::PowerStudy(SimConfig config, int threads)
    : config_(std::move(config)),
      threads_(threads),
      design_(make_design(config_)),
      clr_table_(config_.q, config_.clr_draws, root_stream(config_).substream(stream_tag::clr_table)),
      lr_critical_(null_lr_critical(config_, design_, threads)) {}

TestBattery PowerStudy::run_tests(const IvSample& sample, double beta0, const RngStream& boot_rng) const {
    if (sample.z.rows() != design_.z.rows() || sample.z.cols() != design_.z.cols()) {
        throw DimensionError("run_tests: sample does not match the study design");
    }
    const double alpha = config_.alpha;
    const auto st = st_vectors(design_.g_inv_sqrt, sample.z * responses(sample), sample.omega, beta0);
    const double t = t_clr(st);

    TestBattery out;
    auto set = [&](TestId id, double stat, double crit) {
        auto& o = out.outcomes[static_cast<std::size_t>(id)];
        o.name = kTestNames[static_cast<std::size_t>(id)];
        o.statistic = stat;
        o.critical_value = crit;
        o.reject = stat > crit;
    };
    set(TestId::lr, t, lr_critical_);
    set(TestId::clr, t, clr_table_.critical(st.tt(), alpha));
    set(TestId::ar, t_ar(st, config_.q), ar_critical(config_.q, alpha));
    set(TestId::lm, t_lm(st), lm_critical(alpha));

    const AmsBootstrap boot(sample, beta0, config_.centering);
    const auto run = boot.run(config_.boot_reps, alpha, boot_rng);
    out.outcomes[static_cast<std::size_t>(TestId::blr)] = boot.decide(t, run);
    out.boot_retries = run.retries;
    return out;
}

PowerTable PowerStudy::power_curve() const {
    const auto& c = config_;
    const std::size_t n_grid = c.beta_grid.size();
    const auto reps = static_cast<std::size_t>(c.reps);
    const auto root = root_stream(c);

    struct Cell {
        std::array<bool, kNumTests> reject{};
        bool boot_ok = true;
        int retries = 0;
    };
    std::vector<Cell> cells(n_grid * reps);
    parallel_for(
        cells.size(),
        [&](std::size_t idx) {
            const std::size_t g = idx / reps;
            const std::size_t r = idx % reps;
            auto eng = root.substream({stream_tag::sample, g, r}).engine();
            const IvSample s = gen_sample(c, design_, c.beta_star, eng);
            Cell& cell = cells[idx];
            try {
                const auto b = run_tests(s, c.beta_grid[g], root.substream({stream_tag::bootstrap, g, r}));
                for (int k = 0; k < kNumTests; ++k) cell.reject[static_cast<std::size_t>(k)] = b.outcomes[static_cast<std::size_t>(k)].reject;
                cell.retries = b.boot_retries;
            } catch (const BootstrapAbort&) {
                // record the remaining four tests; BLR has no decision for this replication
                cell.boot_ok = false;
                const auto st = st_vectors(design_.g_inv_sqrt, s.z * responses(s), s.omega, c.beta_grid[g]);
                const double t = t_clr(st);
                cell.reject[0] = t > lr_critical_;
                cell.reject[2] = t > clr_table_.critical(st.tt(), c.alpha);
                cell.reject[3] = t_ar(st, c.q) > ar_critical(c.q, c.alpha);
                cell.reject[4] = t_lm(st) > lm_critical(c.alpha);
            }
        },
        threads_);

    PowerTable table;
    table.grid = c.beta_grid;
    table.config = c;
    table.reps_used = c.reps;
    table.lr_critical = lr_critical_;
    for (std::size_t g = 0; g < n_grid; ++g) {
        std::array<int, kNumTests> rej{};
        std::array<int, kNumTests> dec{};
        for (std::size_t r = 0; r < reps; ++r) {
            const Cell& cell = cells[g * reps + r];
            table.boot_retries += cell.retries;
            if (!cell.boot_ok) ++table.boot_aborts;
            for (int k = 0; k < kNumTests; ++k) {
                if (k == static_cast<int>(TestId::blr) && !cell.boot_ok) continue;
                ++dec[static_cast<std::size_t>(k)];
                rej[static_cast<std::size_t>(k)] += cell.reject[static_cast<std::size_t>(k)] ? 1 : 0;
            }
        }
        std::array<double, kNumTests> freq{};
        for (std::size_t k = 0; k < freq.size(); ++k) {
            freq[k] = dec[k] > 0 ? static_cast<double>(rej[k]) / dec[k] : std::nan("");
        }
        table.rows.push_back(freq);
        table.rejections.push_back(rej);
        table.decided.push_back(dec);
    }
    return table;
}

PowerTable power_curve(const SimConfig& config, int threads) {
    config.validate();
    if (config.beta_grid.empty()) throw ConfigError("power_curve: empty beta grid");
    return PowerStudy(config, threads).power_curve();
}

// ---------------------------------------------------------------------------
// comparison
// ---------------------------------------------------------------------------

ComparisonReport compare_rows(const std::vector<double>& grid, const std::vector<std::array<double, kNumTests>>& rows,
                              const ReferenceTable& ref) {
    if (grid.size() != ref.grid.size() || rows.size() != ref.values.size()) {
        throw ConfigError("comparison: grid size differs from reference table " + std::to_string(ref.id));
    }
    ComparisonReport rep;
    rep.reference_id = ref.id;
    int tight = 0, loose = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (std::abs(grid[g] - ref.grid[g]) > 1e-9) {
            throw ConfigError("comparison: grid value " + fmt(grid[g]) + " differs from reference " + fmt(ref.grid[g]));
        }
        for (TestId id : {TestId::lr, TestId::blr, TestId::clr}) {
            const auto k = static_cast<std::size_t>(id);
            CellComparison cell{grid[g], static_cast<int>(k), rows[g][k], ref.values[g][k], 0.0};
            cell.abs_diff = std::abs(cell.ours - cell.reference);
            if (std::isnan(cell.abs_diff)) cell.abs_diff = std::numeric_limits<double>::infinity();
            tight += cell.abs_diff <= kTightTolerance + 1e-12;
            loose += cell.abs_diff <= kLooseTolerance + 1e-12;
            rep.max_abs_diff = std::max(rep.max_abs_diff, cell.abs_diff);
            rep.cells.push_back(cell);
        }
    }
    const auto total = static_cast<double>(rep.cells.size());
    rep.frac_within_tight = tight / total;
    rep.frac_within_loose = loose / total;
    rep.pass = rep.frac_within_tight >= 0.9 && loose == static_cast<int>(rep.cells.size());
    return rep;
}

ComparisonReport compare_to_reference(const PowerTable& table, int reference_id) {
    const auto ref = reference_table(reference_id);
    const auto expected = table_config(reference_id);
    const auto& c = table.config;
    if (c.n != expected.n || c.q != expected.q || c.error.kind != expected.error.kind ||
        std::abs(c.concentration - expected.concentration) > 1e-12 || c.scale != expected.scale) {
        throw ConfigError("comparison: configuration does not match reference table " + std::to_string(reference_id));
    }
    return compare_rows(table.grid, table.rows, ref);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string to_csv(const PowerTable& table) {
    std::ostringstream out;
    out << "offset";
    for (const char* name : kTestNames) out << ',' << name;
    out << '\n';
    for (std::size_t g = 0; g < table.grid.size(); ++g) {
        out << fmt(table.grid[g]);
        for (double v : table.rows[g]) out << ',' << fmt(v);
        out << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const SimConfig& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["q"] = c.q;
    j["concentration"] = c.concentration;
    j["concentration_scale"] = to_string(c.scale);
    j["beta_star"] = c.beta_star;
    j["error"] = {{"kind", to_string(c.error.kind)},
                  {"omega", {{c.error.omega(0, 0), c.error.omega(0, 1)}, {c.error.omega(1, 0), c.error.omega(1, 1)}}},
                  {"laplace_scale", c.error.laplace_scale}};
    j["beta_grid"] = c.beta_grid;
    j["reps"] = c.reps;
    j["boot_reps"] = c.boot_reps;
    j["alpha"] = c.alpha;
    j["master_seed"] = c.master_seed;
    j["clr_draws"] = c.clr_draws;
    j["lr_null_reps"] = c.lr_null_reps;
    j["centering"] = c.centering == BlrCentering::estimate ? "estimate" : "hypothesis";
    return j;
}

nlohmann::json to_json(const PowerTable& t) {
    nlohmann::json j;
    j["config"] = to_json(t.config);
    j["reps_used"] = t.reps_used;
    j["lr_critical"] = t.lr_critical;
    j["boot_retries"] = t.boot_retries;
    j["boot_aborts"] = t.boot_aborts;
    auto rows = nlohmann::json::array();
    for (std::size_t g = 0; g < t.grid.size(); ++g) {
        nlohmann::json row;
        row["offset"] = t.grid[g];
        for (std::size_t k = 0; k < kNumTests; ++k) {
            row[kTestNames[k]] = {{"frequency", t.rows[g][k]},
                                  {"rejections", t.rejections[g][k]},
                                  {"decided", t.decided[g][k]}};
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json j;
    j["reference_table"] = r.reference_id;
    j["frac_within_0.08"] = r.frac_within_tight;
    j["frac_within_0.15"] = r.frac_within_loose;
    j["max_abs_diff"] = r.max_abs_diff;
    j["pass"] = r.pass;
    auto cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        cells.push_back({{"offset", c.grid_value},
                         {"test", kTestNames[static_cast<std::size_t>(c.test)]},
                         {"ours", c.ours},
                         {"reference", c.reference},
                         {"abs_diff", c.abs_diff}});
    }
    j["cells"] = cells;
    return j;
}

nlohmann::json to_json(const TestBattery& b) {
    nlohmann::json j;
    for (const auto& o : b.outcomes) {
        j[o.name] = {{"statistic", o.statistic}, {"critical_value", o.critical_value}, {"reject", o.reject}};
    }
    j["boot_retries"] = b.boot_retries;
    return j;
}

SimConfig config_from_json(const nlohmann::json& j, SimConfig c) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"n", "q", "concentration", "concentration_scale", "beta_star",
                                             "error", "beta_grid", "reps", "boot_reps", "alpha", "master_seed",
                                             "clr_draws", "lr_null_reps", "centering"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
    }
    try {
        if (j.contains("n")) c.n = j.at("n").get<int>();
        if (j.contains("q")) c.q = j.at("q").get<int>();
        if (j.contains("concentration")) c.concentration = j.at("concentration").get<double>();
        if (j.contains("concentration_scale")) {
            c.scale = parse_concentration_scale(j.at("concentration_scale").get<std::string>());
        }
        if (j.contains("beta_star")) c.beta_star = j.at("beta_star").get<double>();
        if (j.contains("beta_grid")) {
            const auto& g = j.at("beta_grid");
            c.beta_grid = g.is_string() ? parse_grid(g.get<std::string>()) : g.get<std::vector<double>>();
        }
        if (j.contains("reps")) c.reps = j.at("reps").get<int>();
        if (j.contains("boot_reps")) c.boot_reps = j.at("boot_reps").get<int>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("clr_draws")) c.clr_draws = j.at("clr_draws").get<int>();
        if (j.contains("lr_null_reps")) c.lr_null_reps = j.at("lr_null_reps").get<int>();
        if (j.contains("centering")) {
            const auto v = j.at("centering").get<std::string>();
            if (v == "estimate") c.centering = BlrCentering::estimate;
            else if (v == "hypothesis") c.centering = BlrCentering::hypothesis;
            else throw ConfigError("centering must be 'estimate' or 'hypothesis'");
        }
        if (j.contains("error")) {
            const auto& e = j.at("error");
            if (!e.is_object()) throw ConfigError("error must be an object");
            for (const auto& [key, _] : e.items()) {
                if (key != "kind" && key != "omega" && key != "laplace_scale") {
                    throw ConfigError("unknown error field '" + key + "'");
                }
            }
            if (e.contains("kind")) c.error.kind = parse_error_kind(e.at("kind").get<std::string>());
            if (e.contains("laplace_scale")) c.error.laplace_scale = e.at("laplace_scale").get<double>();
            if (e.contains("omega")) {
                const auto m = e.at("omega").get<std::vector<std::vector<double>>>();
                if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) throw ConfigError("omega must be 2 x 2");
                c.error.omega << m[0][0], m[0][1], m[1][0], m[1][1];
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed config: ") + ex.what());
    }
    c.validate();
    return c;
}

} // namespace ivboot
