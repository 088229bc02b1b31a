#pragma once

#include <array>
#include <string>
#include <vector>

#include "ivboot/simgen.hpp"
#include "ivboot/types.hpp"

namespace ivboot {

// Published power tables used as regression references.
//   1: Gaussian errors, c = 4
//   2: Laplace errors, c = 2.56
//   3: heteroskedastic errors with variance 5 i / n, c = 2.56
//   4: heteroskedastic errors with variance 2 + 1.5 sin(6 pi i / n), c = 2.56
// All with n = 200, q = 5 and Omega = I inside the statistics.
struct ReferenceTable {
    int id = 0;
    std::string title;
    std::vector<double> grid;
    std::vector<std::array<double, kNumTests>> values;
};

inline constexpr int kNumReferenceTables = 4;

// Verbatim CSV text with header offset,LR,BLR,CLR,AR,LM.
const char* reference_csv(int id);
ReferenceTable reference_table(int id);

// Simulation settings matching a reference table; reps and boot_reps at the
// acceptance defaults of 1000.
SimConfig table_config(int id);

} // namespace ivboot
