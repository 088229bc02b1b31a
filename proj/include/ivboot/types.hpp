#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ivboot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

enum class BasisKind { cosine };

struct BasisSpec {
    int n_basis = 1;
    BasisKind kind = BasisKind::cosine;
};

struct StructuralTruth {
    double beta_star = 0.0;
    Vec pi_star;
};

// One realized dataset of the two-equation IV model
//   y1 = z' pi beta + e1,  y2 = z' pi + e2.
struct IvSample {
    Vec y1;
    Vec y2;
    Mat z;          // J x n
    Mat2 omega = Mat2::Identity();
    std::optional<StructuralTruth> truth;

    int n() const { return static_cast<int>(y1.size()); }
    int n_instruments() const { return static_cast<int>(z.rows()); }
    void validate() const;
};

// Penalized linear quasi-likelihood data. eta[k] is n x J, row i holding
// W^k_i psi_j(X_i); zk is K x n.
struct GeneralDesign {
    std::vector<Mat> eta;
    Mat zk;
    double penalty = 0.0;

    int n_moments() const { return static_cast<int>(eta.size()); }
    int n_obs() const { return static_cast<int>(zk.cols()); }
    int dim() const { return eta.empty() ? 0 : static_cast<int>(eta.front().cols()); }
    void validate() const;
};

// Column order of power tables.
enum class TestId { lr = 0, blr = 1, clr = 2, ar = 3, lm = 4 };
inline constexpr int kNumTests = 5;
inline constexpr std::array<const char*, kNumTests> kTestNames{"LR", "BLR", "CLR", "AR", "LM"};

struct TestOutcome {
    std::string name;
    double statistic = 0.0;
    double critical_value = 0.0;
    bool reject = false;
};

} // namespace ivboot
