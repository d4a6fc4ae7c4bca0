// The two-parameter family p|psi_theta><psi_theta| + (1-p) I/2 (x) rho_B^theta
// with |psi_theta> = cos(theta)|00> + sin(theta)|11>, its closed-form class
// boundaries, and a least-squares fit of (p, theta) to a measured state.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qcorr/linalg.hpp"

namespace qcorr {

struct StateParams {
  double p = 0.0;
  double theta = 0.0;
};

/// Four correlation classes, ordered by increasing non-classicality.
enum class CorrelationLabel : int {
  Separable = 0,        // I
  Entangled = 1,        // II
  OneWaySteerable = 2,  // III
  BellNonlocal = 3,     // IV
};

inline constexpr int kNumClasses = 4;

std::string_view label_name(CorrelationLabel label);
std::string_view label_roman(CorrelationLabel label);
/// Accepts the names produced by label_name and the roman numerals.
CorrelationLabel parse_label(std::string_view text);

/// Throws std::invalid_argument for p outside [0, 1] or non-finite input.
void validate(const StateParams& params);

DensityMatrix make_state(const StateParams& params);

/// Default half-width of the excluded theta windows around multiples of pi/2.
inline constexpr double kDefaultExclusionHalfWidth = 0.1;

/// Distance from theta to the nearest multiple of pi/2.
double distance_to_degenerate(double theta);

/// Class boundaries in p for a given theta.
struct FamilyBoundaries {
  double separable;  // 1/3
  double steering;   // 1/sqrt(2)
  double nonlocal;   // 1/sqrt(1 + sin^2 2theta)
};
FamilyBoundaries family_boundaries(double theta);

/// Closed-form label. Boundaries belong to the less non-classical class.
/// Throws std::invalid_argument when theta lies inside an exclusion window.
CorrelationLabel theoretical_label(const StateParams& params,
                                   double exclusion_half_width = kDefaultExclusionHalfWidth);

struct FitResult {
  StateParams params;       // theta reported in (0, pi)
  double residual = 0.0;    // Frobenius distance at the optimum
  bool outside_family = false;
  /// True when the fitted p is too small for theta (its coherence sign) to be identified.
  bool theta_ambiguous = false;
};

inline constexpr double kOutsideFamilyResidual = 0.2;

/// Least-squares fit over a 400x400 (p, theta) grid on theta in (0, pi/2),
/// both coherence signs, followed by simplex refinement.
FitResult fit_parameters(const DensityMatrix& rho);

}  // namespace qcorr
