#include "ivboot/reference_tables.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ivboot/errors.hpp"

namespace ivboot {

namespace {

// Published rejection frequencies, stored verbatim.
constexpr const char* kTable1 = R"csv(offset,LR,BLR,CLR,AR,LM
0.48,1,1,1,0.99,1
0.56,1,1,1,0.97,1
0.64,1,0.99,1,0.88,0.99
0.72,0.96,0.92,0.95,0.74,0.92
0.8,0.69,0.63,0.74,0.5,0.76
0.88,0.29,0.33,0.4,0.28,0.46
0.96,0.07,0.1,0.12,0.17,0.11
1.04,0.02,0.04,0.01,0.12,0.05
1.12,0.13,0.1,0.06,0.12,0.15
1.2,0.46,0.39,0.37,0.23,0.29
1.28,0.75,0.6,0.71,0.37,0.49
1.36,0.91,0.85,0.86,0.57,0.81
1.44,0.99,0.97,0.94,0.77,0.95
1.52,1,1,0.99,0.88,0.99
1.6,1,1,0.99,0.95,1
1.68,1,1,1,0.98,1
1.76,1,1,1,0.99,1
)csv";

constexpr const char* kTable2 = R"csv(offset,LR,BLR,CLR,AR,LM
0.02,1,1,1,1,1
0.16,1,1,1,0.96,0.99
0.3,1,1,1,0.93,0.97
0.44,1,1,1,0.75,0.89
0.58,0.99167,0.95833,0.98333,0.41,0.67
0.72,0.83333,0.71667,0.76667,0.24,0.39
0.86,0.4,0.30833,0.3,0.13,0.17
1,0.075,0.05,0.041667,0.05,0.05
1.14,0.15,0.1,0.19167,0.07,0.09
1.28,0.49167,0.45833,0.45833,0.07,0.16
1.42,0.84167,0.75833,0.86667,0.19,0.3
1.56,0.975,0.94167,0.95833,0.28,0.56
1.7,1,1,1,0.45,0.77
1.84,1,1,1,0.57,0.85
1.98,1,1,1,0.8,0.92
2.12,1,1,1,0.93,0.94
2.26,1,1,1,0.97,0.97
)csv";

constexpr const char* kTable3 = R"csv(offset,LR,BLR,CLR,AR,LM
-0.26,1,0.99167,1,1,1
-0.12,1,0.98333,1,1,1
0.02,1,0.98333,1,1,1
0.16,1,0.975,1,1,1
0.3,0.98333,0.95,1,1,1
0.44,0.9,0.89167,1,0.98333,0.99167
0.58,0.825,0.73333,0.95,0.94167,0.93333
0.72,0.59167,0.51667,0.73333,0.80833,0.8
0.86,0.25,0.2,0.5,0.7,0.50833
1,0.033333,0.05,0.24167,0.5,0.24167
1.14,0.033333,0.0083333,0.24167,0.50833,0.19167
1.28,0.11667,0.041667,0.35833,0.63333,0.35833
1.42,0.25833,0.18333,0.55833,0.73333,0.59167
1.56,0.475,0.41667,0.775,0.825,0.775
1.7,0.64167,0.55,0.89167,0.9,0.89167
1.84,0.775,0.68333,0.975,0.95833,0.95
1.98,0.86667,0.80833,0.99167,0.975,0.975
2.12,0.91667,0.86667,0.99167,1,0.99167
2.26,0.96667,0.91667,1,1,0.99167
2.4,0.99167,0.93333,1,1,0.99167
)csv";

constexpr const char* kTable4 = R"csv(offset,LR,BLR,CLR,AR,LM
0.16,1,1,1,1,1
0.3,0.98333,0.99167,1,0.99167,1
0.44,0.95833,0.96667,0.99167,0.96667,1
0.58,0.875,0.85,0.95,0.9,0.98333
0.72,0.60833,0.55833,0.825,0.8,0.84167
0.86,0.23333,0.26667,0.55833,0.55,0.49167
1,0.033333,0.075,0.21667,0.35,0.175
1.14,0.05,0.0083333,0.18333,0.35,0.16667
1.28,0.18333,0.091667,0.36667,0.525,0.325
1.42,0.375,0.35,0.625,0.68333,0.58333
1.56,0.58333,0.6,0.825,0.81667,0.825
1.7,0.78333,0.75833,0.94167,0.91667,0.925
1.84,0.90833,0.89167,0.975,0.95833,0.96667
1.98,0.94167,0.95833,0.975,0.99167,0.99167
2.12,0.95833,0.98333,1,1,0.99167
2.26,0.98333,0.98333,1,1,0.99167
2.4,0.98333,0.99167,1,1,0.99167
)csv";
void check_id(int id) {
    if (id < 1 || id > kNumReferenceTables) {
        throw ConfigError("reference table id must be between 1 and " + std::to_string(kNumReferenceTables));
    }
}

const char* table_title(int id) {
    switch (id) {
    case 1: return "Gaussian errors";
    case 2: return "Laplace errors";
    case 3: return "Heteroskedastic errors, variance 5i/n";
    default: return "Heteroskedastic errors, variance 2 + 1.5 sin(6 pi i/n)";
    }
}

} // namespace

const char* reference_csv(int id) {
    check_id(id);
    switch (id) {
    case 1: return kTable1;
    case 2: return kTable2;
    case 3: return kTable3;
    default: return kTable4;
    }
}

ReferenceTable reference_table(int id) {
    ReferenceTable t;
    t.id = id;
    t.title = table_title(id);
    std::istringstream in(reference_csv(id));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        t.grid.push_back(std::stod(cell));
        std::array<double, kNumTests> v{};
        for (auto& x : v) {
            std::getline(row, cell, ',');
            x = std::stod(cell);
        }
        t.values.push_back(v);
    }
    return t;
}

SimConfig table_config(int id) {
    const auto ref = reference_table(id);
    SimConfig c;
    c.n = 200;
    c.q = 5;
    c.scale = ConcentrationScale::design_normalized;
    c.beta_star = 1.0;
    c.beta_grid = ref.grid;
    c.reps = 1000;
    c.boot_reps = 1000;
    c.alpha = 0.05;
    c.error.omega = Mat2::Identity();
    switch (id) {
    case 1:
        c.concentration = 4.0;
        c.error.kind = ErrorKind::gauss;
        break;
    case 2:
        c.concentration = 2.56;
        c.error.kind = ErrorKind::laplace;
        // unit variance per component
        c.error.laplace_scale = 1.0 / std::sqrt(2.0);
        break;
    case 3:
        c.concentration = 2.56;
        c.error.kind = ErrorKind::hetero_linear;
        break;
    default:
        c.concentration = 2.56;
        c.error.kind = ErrorKind::hetero_periodic;
        break;
    }
    return c;
}

} // namespace ivboot
