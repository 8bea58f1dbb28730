#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace netcomp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Nominal obligations between n banks plus a societal sink.
///
/// Stored as an n x (n+1) matrix: row i is bank i (0-based), column 0 is the
/// societal node and column j+1 is bank j. Every instance is validated on
/// construction and immutable afterwards.
class LiabilityNetwork {
 public:
  LiabilityNetwork() = default;
  explicit LiabilityNetwork(Matrix liabilities);

  /// n x n interbank block plus a societal vector.
  static LiabilityNetwork from_blocks(const Matrix& interbank, const Vector& societal);

  std::size_t size() const noexcept { return static_cast<std::size_t>(liabilities_.rows()); }

  /// Obligation of bank i to bank j (both 0-based).
  double interbank(std::size_t i, std::size_t j) const { return liabilities_(i, j + 1); }
  /// Obligation of bank i to society.
  double societal(std::size_t i) const { return liabilities_(i, 0); }

  const Matrix& matrix() const noexcept { return liabilities_; }
  Matrix interbank_block() const;
  Vector societal_column() const { return liabilities_.col(0); }

  /// p̄ = L·1, the total obligations of each bank (society included).
  Vector total_obligations() const { return liabilities_.rowwise().sum(); }

  bool operator==(const LiabilityNetwork& other) const {
    return liabilities_.rows() == other.liabilities_.rows() && liabilities_ == other.liabilities_;
  }

 private:
  Matrix liabilities_ = Matrix::Zero(0, 1);
};

/// p̄ and the relative liabilities π_ij = L_ij / p̄_i (zero rows when p̄_i = 0).
struct RelativeLiabilities {
  Vector pbar;
  Matrix pi;  // n x (n+1), same column layout as LiabilityNetwork

  /// Interbank block of π (n x n), π_ij for banks i, j.
  Matrix interbank() const { return pi.rightCols(pi.cols() - 1); }
};

RelativeLiabilities relative_liabilities(const LiabilityNetwork& network);

/// Σ_j (L_ij − L_ji) + L_i0 for every bank.
Vector net_positions(const LiabilityNetwork& network);

/// Parameters of the three-bank family used by the case studies.
struct ThreeBankParams {
  std::array<double, 3> x{1.0, 2.0, 3.0};  // endowment multipliers, x1 <= x2 <= x3
  double y = 1.0;                          // societal obligation per bank
  double lambda = 0.5;                     // weight of cycle 1->2->3->1
  double xi = 0.5;                         // weight of cycle 1->3->2->1

  void validate() const;
};

// Generators. `y` is the societal obligation of every bank.
LiabilityNetwork complete_regular_network(std::size_t n, double y);
/// `cycle` lists 1-based bank ids in visiting order; each consecutive pair
/// (and last -> first) gets an obligation of 1.
LiabilityNetwork ring_network(const std::vector<std::size_t>& cycle, double y);
LiabilityNetwork fully_compressed_network(std::size_t n, double y);
LiabilityNetwork three_bank_network(const ThreeBankParams& params);

enum class NetworkFormat { kAuto, kCsv, kJson };

NetworkFormat parse_network_format(const std::string& name);

/// Edge-list CSV (`from,to,amount`, node 0 = society) or dense JSON.
/// kAuto picks JSON for a `.json` extension and CSV otherwise.
LiabilityNetwork load_network(const std::filesystem::path& path,
                              NetworkFormat format = NetworkFormat::kAuto);
void save_network(const LiabilityNetwork& network, const std::filesystem::path& path,
                  NetworkFormat format = NetworkFormat::kAuto);

LiabilityNetwork parse_network_csv(const std::string& text);
LiabilityNetwork parse_network_json(const std::string& text);
std::string network_to_csv(const LiabilityNetwork& network);
std::string network_to_json(const LiabilityNetwork& network);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace netcomp
