#pragma once

#include "netcomp/clearing.hpp"
#include "netcomp/compression.hpp"
#include "netcomp/network.hpp"
#include "netcomp/optimizer.hpp"
#include "netcomp/risk.hpp"
#include "netcomp/thresholds.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace netcomp {

// ---------------------------------------------------------------------------
// Three-bank system

/// Shock model of the three-bank family: endowment x_i·q, no riskless part.
ShockModel three_bank_shock(const ThreeBankParams& params, double volatility = 0.2);

/// Sign test selecting which of banks 2 and 3 defaults second (true: bank 2).
bool three_bank_condition(const ThreeBankParams& params, const ClearingParams& clearing);

/// Closed-form thresholds (q*_1, q*_2, q*_3) of the netted three-bank network.
/// Requires μ = 0.
std::array<double, 3> three_bank_thresholds(const ThreeBankParams& params, const ClearingParams& clearing);

enum class SpecialNetwork { kCompletelyConnected, kRing123, kRing132, kCompressed };

inline constexpr std::array<SpecialNetwork, 4> kSpecialNetworks{
    SpecialNetwork::kCompletelyConnected, SpecialNetwork::kRing123, SpecialNetwork::kRing132,
    SpecialNetwork::kCompressed};

std::string to_string(SpecialNetwork kind);
SpecialNetwork parse_special_network(const std::string& name);

/// x = (1, 2, 3) with the (λ, ξ) weights of the named network.
ThreeBankParams special_network_params(SpecialNetwork kind, double y);

/// y = 0.1, 0.2, ..., 3.0.
std::vector<double> default_y_grid();

struct FragilityRow {
  double y = 0.0;
  std::array<std::array<double, 3>, 4> q{};  // indexed like kSpecialNetworks
  bool cc_below_ring123 = false;             // q2^CC <= q2^123
  bool cc_above_ring132 = false;             // q2^CC >= max{q2^132, q3^132}
  bool compressed_lowest = false;            // compressed has the smallest 2nd and 3rd thresholds
};

struct FragilityReport {
  ClearingParams clearing;
  std::vector<FragilityRow> rows;

  bool all_cc_below_ring123() const;
  bool all_cc_above_ring132() const;
  bool all_compressed_lowest() const;
  std::string to_csv() const;
};

FragilityReport robust_fragility_report(const std::vector<double>& y_grid, const ClearingParams& clearing);

// ---------------------------------------------------------------------------
// EBA-style calibration

struct EbaBalanceSheet {
  std::string name;
  double total_assets = 0.0;           // A_i
  double capital = 0.0;                // C_i
  double interbank_liabilities = 0.0;  // Σ_j L_ij

  void validate() const;
};

/// Reproducible synthetic sheets with EBA-like proportions.
std::vector<EbaBalanceSheet> synthetic_eba_sheets(std::size_t n, std::uint64_t seed);

/// CSV with header `name,total_assets,capital,interbank_liabilities`.
std::vector<EbaBalanceSheet> parse_eba_sheets(const std::string& text);
std::vector<EbaBalanceSheet> load_eba_sheets(const std::filesystem::path& path);
std::string eba_sheets_to_csv(const std::vector<EbaBalanceSheet>& sheets);

struct EbaCalibrationOptions {
  double sparsity = 0.3;  // target density of off-diagonal interbank entries
  std::uint64_t seed = 7;
  std::size_t max_redraws = 50;  // each redraw raises the density; the last pattern is full
  std::size_t max_sweeps = 20000;
  double margin_tolerance = 1e-10;  // relative
  double volatility = 0.2;
};

struct EbaCalibration {
  LiabilityNetwork network;
  ShockModel shock;             // b^μ, s^μ, r = 0
  std::size_t redraws = 0;      // sparsity patterns rejected before success
  double margin_error = 0.0;    // max relative row/column sum error
};

/// Interbank matrix with row and column sums equal to the reported interbank
/// totals (seeded sparsity pattern + iterative proportional fitting), societal
/// column A − Σ_j L_ij − C and exposures b^μ, s^μ.
EbaCalibration eba_calibrate(const std::vector<EbaBalanceSheet>& sheets, double mu,
                             const EbaCalibrationOptions& options = {});

/// The four compression scenarios of the EBA tables.
struct CompressionScenario {
  std::string label;
  CompressionKind kind;
  bool fix_society;
};

const std::vector<CompressionScenario>& eba_scenarios();

struct EbaTableOptions {
  std::vector<double> mus{0.0, 0.2, 0.4};
  AggregationKind aggregation = AggregationKind::kExternalWealth;
  double gamma = 0.8;
  double alpha_x = 1.0;
  double alpha_L = 1.0;
  EbaCalibrationOptions calibration;
  GAConfig ga;
};

struct EbaTableCell {
  CompressionScenario scenario;
  double maximal = 0.0;  // risk of the maximal compression
  double optimal = 0.0;  // risk of the GA optimum
  std::size_t generations = 0;
};

struct EbaTableRow {
  double mu = 0.0;
  double original = 0.0;
  std::vector<EbaTableCell> cells;  // one per eba_scenarios() entry
};

/// Risk of the original, maximally and optimally compressed networks for each
/// collateral level and scenario, with collateral reinvestment stress.
std::vector<EbaTableRow> eba_compression_table(const std::vector<EbaBalanceSheet>& sheets,
                                               const EbaTableOptions& options);

/// Rows "Maximal"/"Optimal" per μ, columns per scenario, values relative to the original.
std::string eba_table_csv(const std::vector<EbaTableRow>& rows);

// ---------------------------------------------------------------------------
// Subset-sum reduction instances

struct SubsetSumInstance {
  std::vector<long long> S;  // positive integers k_1..k_n
  long long theta = 0;

  long long K() const;
  double alpha() const { return static_cast<double>(theta) / static_cast<double>(K()); }
  void validate() const;  // 0 < θ < K, every k_i > 0
};

enum class SubsetSumModel { kRerouting, kConservative };

SubsetSumModel parse_subset_sum_model(const std::string& name);
std::string to_string(SubsetSumModel model);

/// Rerouting: banks C1, C2, P1..Pn with L_{Pi,C1} = αk_i, L_{Pi,C2} = (1−α)k_i.
/// Conservative: banks C0, C1, C2, P1..Pn with L_{C0,Pi} = k_i,
/// L_{Pi,C1} = L_{Pi,C2} = k_i, L_{C1,C0} = K − θ, L_{C2,C0} = θ.
LiabilityNetwork subset_sum_network(const SubsetSumInstance& instance, SubsetSumModel model);

/// Constraint set the reduction optimizes over.
ConstraintSpec subset_sum_spec(const SubsetSumInstance& instance, SubsetSumModel model);

/// Member of the constraint set given by shares x_i ∈ [0,1] routed to C1.
LiabilityNetwork subset_sum_assignment(const SubsetSumInstance& instance, SubsetSumModel model,
                                       const std::vector<double>& x);

/// Bank index of P_i in the generated network.
std::size_t subset_sum_periphery_index(SubsetSumModel model, std::size_t i);

struct SubsetSumAnswer {
  bool solvable = false;
  std::vector<std::size_t> witness;  // 0-based indices into S
};

/// Exhaustive enumeration; n <= 24.
SubsetSumAnswer subset_sum_oracle(const SubsetSumInstance& instance);

SubsetSumInstance random_subset_sum_instance(std::mt19937_64& rng, std::size_t n, long long max_value);

}  // namespace netcomp
