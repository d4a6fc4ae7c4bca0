// Exact correlation criteria on a density matrix: partial-transpose
// positivity, Horodecki's CHSH bound, CHSH at fixed settings, the
// two-setting steering radius, and the combined four-class labeler.

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qcorr/linalg.hpp"
#include "qcorr/state_family.hpp"

namespace qcorr {

/// Tolerance for declaring a partial-transpose eigenvalue negative.
inline constexpr double kPptTolerance = 1e-9;

double ppt_min_eigenvalue(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b);
inline double ppt_min_eigenvalue(const DensityMatrix& rho) { return ppt_min_eigenvalue(rho, 2, 2); }

/// T_ij = Tr[rho sigma_i (x) sigma_j] for i, j in {x, y, z}.
std::array<std::array<double, 3>, 3> correlation_matrix(const DensityMatrix& rho);

/// Sum of the two largest eigenvalues of T^T T; the maximal CHSH value is 2 sqrt(M).
double horodecki_M(const DensityMatrix& rho);

/// S = <a0 b0> + <a0 b0'> + <a0' b0'> - <a0' b0> with a0 = sz, a0' = sx,
/// b0 = (sz - sx)/sqrt2, b0' = (sz + sx)/sqrt2.
double chsh_fixed_settings(const DensityMatrix& rho);

enum class Side { A, B };

/// Measurement settings used by the steering party.
enum class Setting : int { X = 0, Z = 1 };

/// Unnormalized conditional states sigma_{k|n} on the steered side,
/// indexed [setting][outcome].
struct Assemblage {
  std::array<std::array<ComplexMatrix, 2>, 2> members;
  const ComplexMatrix& operator()(Setting n, int outcome) const {
    return members[static_cast<int>(n)][outcome];
  }
  /// The steered party's reduced state (sum over outcomes of either setting).
  ComplexMatrix marginal(Setting n = Setting::X) const;
};

/// `steering_party` measures sigma_x and sigma_z with projectors (I +- n.sigma)/2.
Assemblage conditional_assemblage(const DensityMatrix& rho, Side steering_party);

/// tau[i] for i = 2 * (answer to x) + (answer to z).
struct LhsDecomposition {
  std::array<ComplexMatrix, 4> tau;
  /// Largest violation of the four marginal constraints.
  double constraint_residual(const Assemblage& a) const;
};

/// Builds the decomposition from the free member tau_00 = (t0 I + r.sigma)/2,
/// parameters {t0, rx, ry, rz}; the other members follow from the constraints.
LhsDecomposition lhs_from_free_member(const Assemblage& a, const std::array<double, 4>& free);

/// Members whose trace is below this carry no hidden state.
inline constexpr double kNegligibleTrace = 1e-12;

/// Largest Bloch length among members with non-negligible weight. Members with
/// negative trace return +infinity, as do zero-weight members with a nonzero
/// traceless part.
double max_hidden_bloch_length(const LhsDecomposition& lhs);

struct SteeringOptions {
  int restarts = 16;
  std::uint64_t seed = 0x5eed;
  double f_tolerance = 1e-6;
  /// Declared accuracy of the returned radius.
  double answer_tolerance = 1e-3;
};

struct SteeringRadius {
  double radius = 0.0;
  LhsDecomposition decomposition;
  /// Final simplex spread of the winning restart plus the decomposition's
  /// constraint residual; above answer_tolerance means the search did not settle.
  double optimizer_residual = 0.0;
  std::size_t evaluations = 0;
};

/// min over hidden-state decompositions of the max Bloch length; > 1 means
/// `steering_party` demonstrably steers the other side with settings {x, z}.
SteeringRadius steering_radius_detail(const DensityMatrix& rho, Side steering_party,
                                      const SteeringOptions& options = {});
inline double steering_radius(const DensityMatrix& rho, Side steering_party,
                              const SteeringOptions& options = {}) {
  return steering_radius_detail(rho, steering_party, options).radius;
}

struct SteeringResult {
  double radius_a_to_b = 0.0;
  double radius_b_to_a = 0.0;
  double optimizer_residual = 0.0;
};

SteeringResult steering_radii(const DensityMatrix& rho, const SteeringOptions& options = {});

struct LabelReport {
  CorrelationLabel label = CorrelationLabel::Separable;
  double ppt_min_eig = 0.0;
  double horodecki_m = 0.0;
  /// Present only when the label needed them (entangled, not CHSH-nonlocal).
  std::optional<SteeringResult> steering;
  /// Steerable both ways without CHSH violation; labeled entangled.
  bool two_way_steerable = false;
  /// For one-way steerable states, which party steers.
  std::optional<Side> steering_direction;
};

/// Precedence: IV (M > 1), III (exactly one radius > 1), II (PT eigenvalue
/// below -kPptTolerance), else I.
LabelReport label_state_report(const DensityMatrix& rho, const SteeringOptions& options = {});
inline CorrelationLabel label_state(const DensityMatrix& rho,
                                    const SteeringOptions& options = {}) {
  return label_state_report(rho, options).label;
}

}  // namespace qcorr
