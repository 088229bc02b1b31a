#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ivboot/reference_tables.hpp"
#include "ivboot/simgen.hpp"
#include "ivboot/types.hpp"

namespace ivboot {

struct PowerTable {
    std::vector<double> grid;
    std::vector<std::array<double, kNumTests>> rows;
    std::vector<std::array<int, kNumTests>> rejections;
    // Replications per cell that reached a decision (BLR can lose some to
    // bootstrap aborts).
    std::vector<std::array<int, kNumTests>> decided;
    SimConfig config;
    int reps_used = 0;
    double lr_critical = 0.0;
    int boot_retries = 0;
    int boot_aborts = 0;
};

// All five tests on one sample at one hypothesized beta0.
struct TestBattery {
    std::array<TestOutcome, kNumTests> outcomes;
    int boot_retries = 0;
};

// Shared per-configuration state: design, null critical value of the LR
// statistic and the conditional CLR table.
class PowerStudy {
public:
    explicit PowerStudy(SimConfig config, int threads = 0);

    const SimConfig& config() const { return config_; }
    const SimDesign& design() const { return design_; }
    double lr_critical() const { return lr_critical_; }

    TestBattery run_tests(const IvSample& sample, double beta0, const RngStream& boot_rng) const;

    PowerTable power_curve() const;

private:
    SimConfig config_;
    int threads_;
    SimDesign design_;
    ClrCriticalTable clr_table_;
    double lr_critical_;
};

// Unconditional (1 - alpha) quantile of the LR statistic under the null,
// from config.lr_null_reps simulated samples.
double null_lr_critical(const SimConfig& config, const SimDesign& design, int threads = 0);

PowerTable power_curve(const SimConfig& config, int threads = 0);

struct CellComparison {
    double grid_value = 0.0;
    int test = 0;
    double ours = 0.0;
    double reference = 0.0;
    double abs_diff = 0.0;
};

struct ComparisonReport {
    int reference_id = 0;
    std::vector<CellComparison> cells;  // LR, BLR and CLR cells
    double frac_within_tight = 0.0;     // |diff| <= 0.08
    double frac_within_loose = 0.0;     // |diff| <= 0.15
    double max_abs_diff = 0.0;
    bool pass = false;
};

inline constexpr double kTightTolerance = 0.08;
inline constexpr double kLooseTolerance = 0.15;

// Throws ConfigError when the table's grid or settings differ from the reference.
ComparisonReport compare_to_reference(const PowerTable& table, int reference_id);
ComparisonReport compare_rows(const std::vector<double>& grid,
                              const std::vector<std::array<double, kNumTests>>& rows, const ReferenceTable& ref);

std::string to_csv(const PowerTable& table);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const PowerTable& table);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const TestBattery& battery);

SimConfig config_from_json(const nlohmann::json& j, SimConfig base = {});

} // namespace ivboot
