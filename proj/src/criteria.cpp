#include "qcorr/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qcorr/nelder_mead.hpp"
#include "qcorr/seeding.hpp"

namespace qcorr {

namespace {

void require_two_qubits(const DensityMatrix& rho, const char* what) {
  if (rho.dim() != 4) throw std::invalid_argument(std::string(what) + ": expected a two-qubit state");
}

const std::array<ComplexMatrix, 3>& paulis() {
  static const std::array<ComplexMatrix, 3> p{pauli_x(), pauli_y(), pauli_z()};
  return p;
}

// A 2x2 Hermitian operator as (t I + r.sigma)/2: t is its trace, r its
// unnormalized Bloch part.
struct QubitCoords {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;

  QubitCoords operator+(const QubitCoords& o) const { return {t + o.t, x + o.x, y + o.y, z + o.z}; }
  QubitCoords operator-(const QubitCoords& o) const { return {t - o.t, x - o.x, y - o.y, z - o.z}; }
  double bloch_norm() const { return std::sqrt(x * x + y * y + z * z); }
};

QubitCoords coords_of(const ComplexMatrix& m) {
  return {m.trace().real(), trace_of_product(m, pauli_x()).real(),
          trace_of_product(m, pauli_y()).real(), trace_of_product(m, pauli_z()).real()};
}

ComplexMatrix matrix_of(const QubitCoords& c) {
  return ComplexMatrix::from_rows({{0.5 * (c.t + c.z), 0.5 * Complex(c.x, -c.y)},
                                   {0.5 * Complex(c.x, c.y), 0.5 * (c.t - c.z)}});
}

struct AssemblageCoords {
  QubitCoords x0, x1, z0, z1;
};

AssemblageCoords coords_of(const Assemblage& a) {
  return {coords_of(a(Setting::X, 0)), coords_of(a(Setting::X, 1)), coords_of(a(Setting::Z, 0)),
          coords_of(a(Setting::Z, 1))};
}

std::array<QubitCoords, 4> members_from_free(const AssemblageCoords& a, const QubitCoords& tau00) {
  const QubitCoords tau01 = a.x0 - tau00;
  const QubitCoords tau10 = a.z0 - tau00;
  const QubitCoords tau11 = a.x1 - tau10;
  return {tau00, tau01, tau10, tau11};
}

// Max Bloch length over weighted members plus an exact penalty on members
// that cannot be hidden states (negative weight, or a traceless remainder).
double penalized_objective(const std::array<QubitCoords, 4>& members) {
  double worst = 0.0;
  double penalty = 0.0;
  for (const auto& m : members) {
    const double r = m.bloch_norm();
    if (m.t > kNegligibleTrace) {
      worst = std::max(worst, r / m.t);
    } else {
      penalty += std::abs(m.t) + (r > kNegligibleTrace ? r : 0.0);
    }
  }
  return worst + 1e3 * penalty;
}

}  // namespace

double ppt_min_eigenvalue(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b) {
  if (rho.dim() != dim_a * dim_b)
    throw std::invalid_argument("ppt_min_eigenvalue: dimension mismatch");
  return min_eigenvalue(partial_transpose(rho.matrix(), dim_a, dim_b, Subsystem::A));
}

std::array<std::array<double, 3>, 3> correlation_matrix(const DensityMatrix& rho) {
  require_two_qubits(rho, "correlation_matrix");
  std::array<std::array<double, 3>, 3> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t[i][j] = trace_of_product(rho.matrix(), tensor_product(paulis()[i], paulis()[j])).real();
  return t;
}

double horodecki_M(const DensityMatrix& rho) {
  const auto t = correlation_matrix(rho);
  ComplexMatrix tt(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += t[k][i] * t[k][j];
      tt(i, j) = s;
    }
  const auto values = hermitian_eigenvalues(tt);
  return values[1] + values[2];
}

double chsh_fixed_settings(const DensityMatrix& rho) {
  const auto t = correlation_matrix(rho);
  constexpr int X = 0, Z = 2;
  const double inv = 1.0 / std::sqrt(2.0);
  const double a0b0 = (t[Z][Z] - t[Z][X]) * inv;
  const double a0b0p = (t[Z][Z] + t[Z][X]) * inv;
  const double a0pb0p = (t[X][Z] + t[X][X]) * inv;
  const double a0pb0 = (t[X][Z] - t[X][X]) * inv;
  return a0b0 + a0b0p + a0pb0p - a0pb0;
}

ComplexMatrix Assemblage::marginal(Setting n) const {
  const int k = static_cast<int>(n);
  return members[k][0] + members[k][1];
}

Assemblage conditional_assemblage(const DensityMatrix& rho, Side steering_party) {
  require_two_qubits(rho, "conditional_assemblage");
  const ComplexMatrix id = ComplexMatrix::identity(2);
  Assemblage out;
  for (Setting n : {Setting::X, Setting::Z}) {
    const ComplexMatrix& dir = n == Setting::X ? pauli_x() : pauli_z();
    for (int outcome = 0; outcome < 2; ++outcome) {
      const ComplexMatrix proj = (id + dir * Complex(outcome == 0 ? 1.0 : -1.0)) * Complex(0.5);
      if (steering_party == Side::A) {
        out.members[static_cast<int>(n)][outcome] =
            partial_trace(rho.matrix() * tensor_product(proj, id), 2, 2, Subsystem::B);
      } else {
        out.members[static_cast<int>(n)][outcome] =
            partial_trace(rho.matrix() * tensor_product(id, proj), 2, 2, Subsystem::A);
      }
    }
  }
  // Drop the rounding-level anti-Hermitian part left by the product.
  for (auto& row : out.members)
    for (auto& m : row) m = (m + m.adjoint()) * Complex(0.5);
  return out;
}

double LhsDecomposition::constraint_residual(const Assemblage& a) const {
  double r = 0.0;
  r = std::max(r, max_abs_diff(tau[0] + tau[1], a(Setting::X, 0)));
  r = std::max(r, max_abs_diff(tau[2] + tau[3], a(Setting::X, 1)));
  r = std::max(r, max_abs_diff(tau[0] + tau[2], a(Setting::Z, 0)));
  r = std::max(r, max_abs_diff(tau[1] + tau[3], a(Setting::Z, 1)));
  return r;
}

LhsDecomposition lhs_from_free_member(const Assemblage& a, const std::array<double, 4>& free) {
  const auto members = members_from_free(coords_of(a), {free[0], free[1], free[2], free[3]});
  LhsDecomposition out;
  for (int i = 0; i < 4; ++i) out.tau[i] = matrix_of(members[i]);
  return out;
}

double max_hidden_bloch_length(const LhsDecomposition& lhs) {
  double worst = 0.0;
  for (const auto& m : lhs.tau) {
    const QubitCoords c = coords_of(m);
    if (c.t > kNegligibleTrace) {
      worst = std::max(worst, c.bloch_norm() / c.t);
    } else if (c.t < -kNegligibleTrace || c.bloch_norm() > kNegligibleTrace) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

SteeringRadius steering_radius_detail(const DensityMatrix& rho, Side steering_party,
                                      const SteeringOptions& options) {
  const Assemblage assemblage = conditional_assemblage(rho, steering_party);
  const AssemblageCoords a = coords_of(assemblage);

  auto objective = [&](const std::vector<double>& v) {
    return penalized_objective(members_from_free(a, {v[0], v[1], v[2], v[3]}));
  };

  // Weights of tau_00 consistent with non-negative weights for all four members.
  const double t_lo = std::max(0.0, a.z0.t - a.x1.t);
  const double t_hi = std::min(a.x0.t, a.z0.t);

  // Deterministic first start: the two outcomes treated as independent.
  const double total = a.x0.t + a.x1.t;
  const double t_ind = total > 0.0 ? a.x0.t * a.z0.t / total : 0.0;
  const double wx = a.x0.t > 0.0 ? t_ind / a.x0.t : 0.0;
  const double wz = a.z0.t > 0.0 ? t_ind / a.z0.t : 0.0;
  const QubitCoords start0{t_ind, 0.5 * (wx * a.x0.x + wz * a.z0.x),
                           0.5 * (wx * a.x0.y + wz * a.z0.y), 0.5 * (wx * a.x0.z + wz * a.z0.z)};

  std::mt19937_64 rng(derive_seed(options.seed, "steering-radius"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  NelderMeadOptions nm;
  nm.initial_step = 0.05 * std::max(total, 1e-6);
  nm.f_tolerance = options.f_tolerance;
  nm.x_tolerance = 1e-7;
  nm.max_evaluations = 3000;

  SteeringRadius best;
  best.radius = std::numeric_limits<double>::infinity();
  double best_spread = 0.0;
  std::vector<double> best_x;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    std::vector<double> x0;
    if (restart == 0) {
      x0 = {start0.t, start0.x, start0.y, start0.z};
    } else {
      const double t = t_lo + (t_hi - t_lo) * unit(rng);
      double gx = gauss(rng), gy = gauss(rng), gz = gauss(rng);
      const double n = std::max(std::sqrt(gx * gx + gy * gy + gz * gz), 1e-12);
      const double len = t * std::cbrt(unit(rng));
      x0 = {t, len * gx / n, len * gy / n, len * gz / n};
    }
    const NelderMeadResult r = nelder_mead(objective, x0, nm);
    best.evaluations += r.evaluations;
    if (r.value < best.radius) {
      best.radius = r.value;
      best_spread = r.spread;
      best_x = r.x;
    }
  }

  best.decomposition = lhs_from_free_member(assemblage, {best_x[0], best_x[1], best_x[2], best_x[3]});
  best.radius = max_hidden_bloch_length(best.decomposition);
  best.optimizer_residual = best_spread + best.decomposition.constraint_residual(assemblage);
  return best;
}

SteeringResult steering_radii(const DensityMatrix& rho, const SteeringOptions& options) {
  const SteeringRadius ab = steering_radius_detail(rho, Side::A, options);
  const SteeringRadius ba = steering_radius_detail(rho, Side::B, options);
  return {ab.radius, ba.radius, std::max(ab.optimizer_residual, ba.optimizer_residual)};
}

LabelReport label_state_report(const DensityMatrix& rho, const SteeringOptions& options) {
  require_two_qubits(rho, "label_state");
  LabelReport report;
  report.ppt_min_eig = ppt_min_eigenvalue(rho);
  report.horodecki_m = horodecki_M(rho);
  if (report.horodecki_m > 1.0) {
    report.label = CorrelationLabel::BellNonlocal;
    return report;
  }
  // Steering requires entanglement, so a PPT state needs no radius search.
  if (report.ppt_min_eig >= -kPptTolerance) {
    report.label = CorrelationLabel::Separable;
    return report;
  }
  report.steering = steering_radii(rho, options);
  const bool a_steers = report.steering->radius_a_to_b > 1.0;
  const bool b_steers = report.steering->radius_b_to_a > 1.0;
  if (a_steers != b_steers) {
    report.label = CorrelationLabel::OneWaySteerable;
    report.steering_direction = a_steers ? Side::A : Side::B;
  } else {
    report.label = CorrelationLabel::Entangled;
    report.two_way_steerable = a_steers && b_steers;
  }
  return report;
}

}  // namespace qcorr
