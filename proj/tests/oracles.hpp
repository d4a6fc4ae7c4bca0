// Independent reference computations used by the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "qcorr/linalg.hpp"
#include "qcorr/sdp.hpp"

namespace oracle {

using qcorr::Complex;
using qcorr::ComplexMatrix;

/// rho(p, theta) written out entry by entry from the defining formula.
inline ComplexMatrix family_state(double p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexMatrix m(4, 4);
  // p |psi><psi| with |psi> = c|00> + s|11>
  m(0, 0) += p * c * c;
  m(0, 3) += p * c * s;
  m(3, 0) += p * c * s;
  m(3, 3) += p * s * s;
  // (1 - p) I/2 (x) diag(c^2, s^2)
  const double w = (1.0 - p) / 2.0;
  m(0, 0) += w * c * c;
  m(1, 1) += w * s * s;
  m(2, 2) += w * c * c;
  m(3, 3) += w * s * s;
  return m;
}

struct QubitCoords {
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;
};

/// m = (t I + x sx + y sy + z sz) / 2
inline QubitCoords coords(const ComplexMatrix& m) {
  return {(m(0, 0) + m(1, 1)).real(), 2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

/// Unnormalized conditional states when one party measures x or z;
/// returns {x outcome 0, x outcome 1, z outcome 0, z outcome 1}.
inline std::array<QubitCoords, 4> assemblage(const ComplexMatrix& rho, bool a_measures) {
  const double h = 1.0 / std::sqrt(2.0);
  const std::array<std::array<double, 2>, 4> kets = {{{h, h}, {h, -h}, {1.0, 0.0}, {0.0, 1.0}}};
  std::array<QubitCoords, 4> out;
  for (int m = 0; m < 4; ++m) {
    ComplexMatrix sigma(2, 2);
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double proj = kets[m][i] * kets[m][j];
            sigma(u, v) += a_measures ? proj * rho(j * 2 + u, i * 2 + v) : proj * rho(u * 2 + j, v * 2 + i);
          }
    out[m] = coords(sigma);
  }
  return out;
}

struct GridOptimum {
  double radius = std::numeric_limits<double>::infinity();
  QubitCoords tau00;
};

/// Exact minimum over a uniform grid of the hidden-state member tau_00
/// (weight t0 and Bloch part r, all multiples of `step`) of the largest
/// |r_i| / t_i among the four hidden states it determines. Grid points that
/// cannot beat the incumbent are skipped by interval bounds, which never
/// discards a better point.
inline GridOptimum brute_force_steering_radius(const ComplexMatrix& rho, bool a_measures, double step = 0.005) {
  const auto a = assemblage(rho, a_measures);
  const QubitCoords& x0 = a[0];
  const QubitCoords& x1 = a[1];
  const QubitCoords& z0 = a[2];

  // Member i has weight base_t[i] + sign[i] t0 and Bloch part base_r[i] + sign[i] r.
  auto members = [&](double t0, double rx, double ry, double rz) {
    std::array<QubitCoords, 4> m;
    m[0] = {t0, rx, ry, rz};
    m[1] = {x0.t - t0, x0.x - rx, x0.y - ry, x0.z - rz};
    m[2] = {z0.t - t0, z0.x - rx, z0.y - ry, z0.z - rz};
    m[3] = {x1.t - z0.t + t0, x1.x - z0.x + rx, x1.y - z0.y + ry, x1.z - z0.z + rz};
    return m;
  };
  auto value = [&](double t0, double rx, double ry, double rz) {
    double worst = 0.0;
    for (const auto& m : members(t0, rx, ry, rz)) {
      const double len = std::sqrt(m.x * m.x + m.y * m.y + m.z * m.z);
      if (m.t > 1e-12) {
        worst = std::max(worst, len / m.t);
      } else if (m.t < -1e-12 || len > 1e-12) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return worst;
  };

  const double t_lo = std::max(0.0, z0.t - x1.t);
  const double t_hi = std::min(x0.t, z0.t);

  GridOptimum best;
  auto consider = [&](double t0, double rx, double ry, double rz) {
    const double v = value(t0, rx, ry, rz);
    if (v < best.radius) best = {v, {t0, rx, ry, rz}};
  };

  // Coarse pass for an incumbent.
  const double coarse = 8.0 * step;
  for (long k = static_cast<long>(std::ceil(t_lo / coarse)); k * coarse <= t_hi + 1e-15; ++k)
    for (long i = -static_cast<long>(1.0 / coarse); i * coarse <= 1.0; ++i)
      for (long j = -static_cast<long>(1.0 / coarse); j * coarse <= 1.0; ++j)
        for (long l = -static_cast<long>(1.0 / coarse); l * coarse <= 1.0; ++l)
          consider(k * coarse, i * coarse, j * coarse, l * coarse);
  if (!std::isfinite(best.radius)) return best;

  for (long k = static_cast<long>(std::ceil(t_lo / step)); k * step <= t_hi + 1e-15; ++k) {
    const double t0 = k * step;
    const double bound = best.radius;
    // |base_r + sign r| <= bound (base_t + sign t0) on every member, per component.
    const std::array<QubitCoords, 4> base = members(t0, 0.0, 0.0, 0.0);
    const std::array<double, 4> sign = {1.0, -1.0, -1.0, 1.0};
    std::array<double, 3> lo = {-1e300, -1e300, -1e300}, hi = {1e300, 1e300, 1e300};
    bool empty = false;
    for (int m = 0; m < 4; ++m) {
      const double t = base[m].t;
      if (t < -1e-12) empty = true;
      const double slack = bound * std::max(t, 0.0) + 1e-12;
      const std::array<double, 3> c = {base[m].x, base[m].y, base[m].z};
      for (int d = 0; d < 3; ++d) {
        // sign r_d in [-c - slack, -c + slack]
        const double u = -c[d] - slack, v = -c[d] + slack;
        lo[d] = std::max(lo[d], sign[m] > 0 ? u : -v);
        hi[d] = std::min(hi[d], sign[m] > 0 ? v : -u);
      }
    }
    if (empty) continue;
    for (long i = static_cast<long>(std::ceil(lo[0] / step)); i * step <= hi[0]; ++i)
      for (long j = static_cast<long>(std::ceil(lo[1] / step)); j * step <= hi[1]; ++j)
        for (long l = static_cast<long>(std::ceil(lo[2] / step)); l * step <= hi[2]; ++l)
          consider(t0, i * step, j * step, l * step);
  }
  return best;
}

/// Orthogonal projection onto {X = swap(X), Tr_third X = rho} carried out on
/// coefficients in a product of orthogonal Hermitian bases.
inline ComplexMatrix coefficient_route_projection(const ComplexMatrix& z, const ComplexMatrix& rho,
                                                  std::size_t da, std::size_t db) {
  const auto A = qcorr::build_hermitian_basis(da);
  const auto B = qcorr::build_hermitian_basis(db);
  const std::size_t na = A.elements.size(), nb = B.elements.size();
  const double norm3 = A.alpha * B.alpha * A.alpha;

  auto element = [&](std::size_t i, std::size_t j, std::size_t k) {
    return qcorr::tensor_product(qcorr::tensor_product(A.elements[i], B.elements[j]), A.elements[k]);
  };
  std::vector<double> c(na * nb * na);
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> double& { return c[(i * nb + j) * na + k]; };
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < na; ++k) at(i, j, k) = qcorr::trace_of_product(z, element(i, j, k)).real() / norm3;

  std::vector<double> r(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      r[i * nb + j] =
          qcorr::trace_of_product(rho, qcorr::tensor_product(A.elements[i], B.elements[j])).real() / (A.alpha * B.alpha);

  std::vector<double> out(c.size());
  auto out_at = [&](std::size_t i, std::size_t j, std::size_t k) -> double& { return out[(i * nb + j) * na + k]; };
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < na; ++k) {
        if (k == 0) {
          out_at(i, j, k) = r[i * nb + j] / A.alpha;
        } else if (i == 0) {
          out_at(i, j, k) = r[k * nb + j] / A.alpha;
        } else {
          out_at(i, j, k) = 0.5 * (at(i, j, k) + at(k, j, i));
        }
      }

  const std::size_t n = da * db * da;
  ComplexMatrix x(n, n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < na; ++k) x += element(i, j, k) * Complex(out_at(i, j, k), 0.0);
  return x;
}

}  // namespace oracle
