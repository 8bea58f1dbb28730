#pragma once

#include "netcomp/lp.hpp"
#include "netcomp/network.hpp"

#include <string>
#include <vector>

namespace netcomp {

enum class CompressionKind { kBilateral, kConservative, kRerouting, kNonconservative };

CompressionKind parse_compression_kind(const std::string& name);
std::string to_string(CompressionKind kind);

/// A compression set relative to a base network L̃. `fix_society` intersects
/// it with {L : L_i0 = L̃_i0}.
struct ConstraintSpec {
  LiabilityNetwork base;
  CompressionKind kind = CompressionKind::kConservative;
  bool fix_society = false;
};

struct FeasibilityReport {
  bool feasible = true;
  double max_violation = 0.0;
  std::vector<std::string> violations;
};

inline constexpr double kFeasibilityTolerance = 1e-6;

FeasibilityReport is_feasible(const LiabilityNetwork& network, const ConstraintSpec& spec,
                              double tolerance = kFeasibilityTolerance);
FeasibilityReport is_feasible(const Matrix& liabilities, const ConstraintSpec& spec,
                              double tolerance = kFeasibilityTolerance);

/// One entry L_{row, col} in the n x (n+1) layout (col 0 = society).
struct Coordinate {
  std::size_t row;
  std::size_t col;
};

/// The constraint set written over its free coordinates y:
///   0 <= y <= upper, N y = net_target, per-row sums (= or <=) of y,
/// with every non-free entry pinned to its base value (or to zero).
class FeasibleRegion {
 public:
  explicit FeasibleRegion(ConstraintSpec spec);

  const ConstraintSpec& spec() const noexcept { return spec_; }
  std::size_t dimension() const noexcept { return coords_.size(); }
  const std::vector<Coordinate>& coordinates() const noexcept { return coords_; }
  const Vector& upper() const noexcept { return upper_; }

  Vector gather(const Matrix& liabilities) const;
  Matrix scatter(const Vector& y) const;
  LiabilityNetwork to_network(const Vector& y) const;

  /// LP over the region with the given cost on the free coordinates.
  LinearProgram linear_program(const Vector& cost) const;

  /// Euclidean projection of y onto the region. Throws ConvergenceError when
  /// no point passing is_feasible at 1e-6 is found.
  Vector project(const Vector& y) const;
  /// Dykstra's alternating projections between the row-separable set and
  /// the net-position subspace; slower reference implementation.
  Vector project_dykstra(const Vector& y, int max_iterations = 200000, double tolerance = 1e-10) const;

  /// Projection onto the row-separable part only (box and row sums).
  Vector project_rows(const Vector& y) const;
  /// Net-position residual N y − target.
  Vector net_residual(const Vector& y) const;

 private:
  enum class RowMode { kNone, kEqual, kAtMost };
  struct RowGroup {
    std::vector<Eigen::Index> members;
    RowMode mode = RowMode::kNone;
    double target = 0.0;
  };

  Vector project_bilateral(const Vector& y) const;
  Vector project_newton(const Vector& y, bool& converged) const;
  Vector polish(const Vector& x, const Vector& y) const;

  ConstraintSpec spec_;
  std::vector<Coordinate> coords_;
  Vector upper_;
  Matrix fixed_;  // base entries outside the free coordinates (zero where the entry is forced to 0)
  std::vector<RowGroup> rows_;
  Matrix net_;  // n x dimension
  Vector net_target_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;  // bilateral coordinate pairs (i->j, j->i)
};

/// Minimum total notional over the constraint set. Bilateral uses the closed
/// form L_ij = max(0, L̃_ij − L̃_ji); the other kinds solve an LP.
LiabilityNetwork maximal_compression(const ConstraintSpec& spec);
LiabilityNetwork maximal_compression_lp(const ConstraintSpec& spec);

/// Nearest feasible network to `candidate` in Frobenius norm. A candidate
/// that is already feasible at 1e-9 is returned unchanged.
LiabilityNetwork repair(const Matrix& candidate, const ConstraintSpec& spec);

}  // namespace netcomp
