#include "qcorr/state_family.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qcorr/nelder_mead.hpp"

namespace qcorr {

std::string_view label_name(CorrelationLabel label) {
  switch (label) {
    case CorrelationLabel::Separable: return "separable";
    case CorrelationLabel::Entangled: return "entangled";
    case CorrelationLabel::OneWaySteerable: return "one-way-steerable";
    case CorrelationLabel::BellNonlocal: return "bell-nonlocal";
  }
  return "unknown";
}

std::string_view label_roman(CorrelationLabel label) {
  static constexpr std::array<std::string_view, 4> kRoman{"I", "II", "III", "IV"};
  return kRoman[static_cast<int>(label)];
}

CorrelationLabel parse_label(std::string_view text) {
  for (int k = 0; k < kNumClasses; ++k) {
    const auto label = static_cast<CorrelationLabel>(k);
    if (text == label_name(label) || text == label_roman(label)) return label;
  }
  throw std::invalid_argument("unknown correlation label: " + std::string(text));
}

void validate(const StateParams& params) {
  if (!std::isfinite(params.p) || !std::isfinite(params.theta))
    throw std::invalid_argument("StateParams: non-finite value");
  if (params.p < 0.0 || params.p > 1.0)
    throw std::invalid_argument("StateParams: p must lie in [0, 1]");
}

namespace {

// Entries of the family matrix; everything else is zero.
struct FamilyEntries {
  double d00, d11, d22, d33, coherence;
};

FamilyEntries family_entries(double p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double c2 = c * c, s2 = s * s;
  return {p * c2 + 0.5 * (1.0 - p) * c2, 0.5 * (1.0 - p) * s2, 0.5 * (1.0 - p) * c2,
          p * s2 + 0.5 * (1.0 - p) * s2, p * c * s};
}

double squared_distance(const FamilyEntries& f, const ComplexMatrix& rho) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Complex target = 0.0;
      if (i == j) target = std::array{f.d00, f.d11, f.d22, f.d33}[i];
      if ((i == 0 && j == 3) || (i == 3 && j == 0)) target = f.coherence;
      d += std::norm(rho(i, j) - target);
    }
  return d;
}

}  // namespace

DensityMatrix make_state(const StateParams& params) {
  validate(params);
  const FamilyEntries f = family_entries(params.p, params.theta);
  ComplexMatrix m(4, 4);
  m(0, 0) = f.d00;
  m(1, 1) = f.d11;
  m(2, 2) = f.d22;
  m(3, 3) = f.d33;
  m(0, 3) = f.coherence;
  m(3, 0) = f.coherence;
  return DensityMatrix::from_matrix(std::move(m));
}

double distance_to_degenerate(double theta) {
  constexpr double quarter = std::numbers::pi / 2.0;
  const double r = std::fmod(std::abs(theta), quarter);
  return std::min(r, quarter - r);
}

FamilyBoundaries family_boundaries(double theta) {
  const double s = std::sin(2.0 * theta);
  return {1.0 / 3.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(1.0 + s * s)};
}

CorrelationLabel theoretical_label(const StateParams& params, double exclusion_half_width) {
  validate(params);
  if (distance_to_degenerate(params.theta) <= exclusion_half_width ||
      std::abs(std::sin(2.0 * params.theta)) < 1e-12) {
    throw std::invalid_argument("theoretical_label: theta inside a degenerate exclusion window");
  }
  const FamilyBoundaries b = family_boundaries(params.theta);
  if (params.p > b.nonlocal) return CorrelationLabel::BellNonlocal;
  if (params.p > b.steering) return CorrelationLabel::OneWaySteerable;
  if (params.p > b.separable) return CorrelationLabel::Entangled;
  return CorrelationLabel::Separable;
}

FitResult fit_parameters(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("fit_parameters: expected a two-qubit state");
  const ComplexMatrix& m = rho.matrix();
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr int kGrid = 400;

  // theta' in (0, pi/2) covers the family up to the sign of the coherence;
  // the negative-sign branch is theta = pi - theta'.
  auto objective = [&](double p, double theta) {
    return squared_distance(family_entries(p, theta), m);
  };

  double best = std::numeric_limits<double>::infinity();
  double best_p = 0.0, best_theta = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double p = static_cast<double>(i) / (kGrid - 1);
    for (int j = 0; j < kGrid; ++j) {
      const double t = half_pi * (j + 0.5) / kGrid;
      for (double theta : {t, std::numbers::pi - t}) {
        const double v = objective(p, theta);
        if (v < best) {
          best = v;
          best_p = p;
          best_theta = theta;
        }
      }
    }
  }

  auto penalized = [&](const std::vector<double>& x) {
    const double p = std::clamp(x[0], 0.0, 1.0);
    return objective(p, x[1]) + std::abs(x[0] - p);
  };
  NelderMeadOptions options;
  options.initial_step = 1.0 / kGrid;
  options.f_tolerance = 1e-16;
  options.x_tolerance = 1e-10;
  const auto refined = nelder_mead(penalized, {best_p, best_theta}, options);

  FitResult out;
  out.params.p = std::clamp(refined.x[0], 0.0, 1.0);
  double theta = std::fmod(refined.x[1], std::numbers::pi);
  if (theta <= 0.0) theta += std::numbers::pi;
  out.params.theta = theta;
  out.residual = std::sqrt(objective(out.params.p, out.params.theta));
  out.outside_family = out.residual > kOutsideFamilyResidual;
  out.theta_ambiguous = out.params.p < 1e-2;
  return out;
}

}  // namespace qcorr
