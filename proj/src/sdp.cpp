#include "qcorr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "qcorr/criteria.hpp"
#include "qcorr/seeding.hpp"

namespace qcorr {

OperatorBasis build_hermitian_basis(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_hermitian_basis: d must be at least 2");
  OperatorBasis basis;
  basis.dim = d;
  basis.alpha = static_cast<double>(d);
  basis.elements.push_back(ComplexMatrix::identity(d));
  // Gell-Mann matrices have Tr(l^2) = 2.
  const double scale = std::sqrt(static_cast<double>(d) / 2.0);
  const Complex i_unit(0.0, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix m(d, d);
      m(j, k) = scale;
      m(k, j) = scale;
      basis.elements.push_back(m);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix m(d, d);
      m(j, k) = -i_unit * scale;
      m(k, j) = i_unit * scale;
      basis.elements.push_back(m);
    }
  }
  for (std::size_t l = 1; l < d; ++l) {
    ComplexMatrix m(d, d);
    const double norm = scale * std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (std::size_t j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    basis.elements.push_back(m);
  }
  return basis;
}

std::vector<double> basis_coefficients(const ComplexMatrix& rho, const OperatorBasis& a,
                                       const OperatorBasis& b) {
  if (rho.rows() != a.dim * b.dim || !rho.is_square())
    throw std::invalid_argument("basis_coefficients: dimension mismatch");
  std::vector<double> c;
  c.reserve(a.elements.size() * b.elements.size());
  const double norm = 1.0 / (a.alpha * b.alpha);
  for (const auto& sa : a.elements)
    for (const auto& sb : b.elements) c.push_back(norm * trace_of_product(rho, tensor_product(sa, sb)).real());
  return c;
}

ComplexMatrix basis_expand(std::span<const double> c, const OperatorBasis& a, const OperatorBasis& b) {
  if (c.size() != a.elements.size() * b.elements.size())
    throw std::invalid_argument("basis_expand: coefficient count mismatch");
  ComplexMatrix out(a.dim * b.dim, a.dim * b.dim);
  std::size_t k = 0;
  for (const auto& sa : a.elements)
    for (const auto& sb : b.elements) out += tensor_product(sa, sb) * Complex(c[k++]);
  return out;
}

ComplexMatrix partial_transpose3(const ComplexMatrix& x, std::size_t d0, std::size_t d1, std::size_t d2,
                                 int factor) {
  const std::size_t n = d0 * d1 * d2;
  if (!x.is_square() || x.rows() != n) throw std::invalid_argument("partial_transpose3: dimension mismatch");
  if (factor < 0 || factor > 2) throw std::invalid_argument("partial_transpose3: factor must be 0, 1 or 2");
  ComplexMatrix out(n, n);
  std::size_t r[3], c[3];
  for (std::size_t row = 0; row < n; ++row) {
    r[0] = row / (d1 * d2), r[1] = (row / d2) % d1, r[2] = row % d2;
    for (std::size_t col = 0; col < n; ++col) {
      c[0] = col / (d1 * d2), c[1] = (col / d2) % d1, c[2] = col % d2;
      std::size_t rr[3] = {r[0], r[1], r[2]}, cc[3] = {c[0], c[1], c[2]};
      std::swap(rr[factor], cc[factor]);
      out((rr[0] * d1 + rr[1]) * d2 + rr[2], (cc[0] * d1 + cc[1]) * d2 + cc[2]) = x(row, col);
    }
  }
  return out;
}

ComplexMatrix trace_out_copy(const ComplexMatrix& x, std::size_t dim_a, std::size_t dim_b) {
  return partial_trace(x, dim_a * dim_b, dim_a, Subsystem::A);
}

ComplexMatrix swap_copies(const ComplexMatrix& x, std::size_t da, std::size_t db) {
  const std::size_t n = da * db * da;
  if (!x.is_square() || x.rows() != n) throw std::invalid_argument("swap_copies: dimension mismatch");
  std::vector<std::size_t> perm(n);
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t b = 0; b < db; ++b)
      for (std::size_t c = 0; c < da; ++c) perm[(a * db + b) * da + c] = (c * db + b) * da + a;
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(perm[r], perm[c]) = x(r, c);
  return out;
}

ComplexMatrix project_extension_affine(const ComplexMatrix& z, const ComplexMatrix& rho, std::size_t da,
                                       std::size_t db) {
  if (rho.rows() != da * db) throw std::invalid_argument("project_extension_affine: rho dimension mismatch");
  ComplexMatrix h = (z + z.adjoint()) * Complex(0.5);
  ComplexMatrix sym = (h + swap_copies(h, da, db)) * Complex(0.5);
  const ComplexMatrix residual = trace_out_copy(sym, da, db) - rho;
  const double inv_da = 1.0 / static_cast<double>(da);
  const ComplexMatrix yb = partial_trace(residual, da, db, Subsystem::B) * Complex(inv_da);
  const ComplexMatrix y =
      (residual * Complex(2.0) - tensor_product(ComplexMatrix::identity(da), yb)) * Complex(inv_da);
  const ComplexMatrix lifted = tensor_product(y, ComplexMatrix::identity(da));
  sym -= (lifted + swap_copies(lifted, da, db)) * Complex(0.5);
  return sym;
}

ComplexMatrix project_psd(const ComplexMatrix& h, double floor) {
  EigenDecomposition eig = hermitian_eigen((h + h.adjoint()) * Complex(0.5));
  for (double& v : eig.values) v = std::max(v, floor);
  return reconstruct(eig);
}

std::string_view status_name(FeasibilityStatus status) {
  switch (status) {
    case FeasibilityStatus::Feasible: return "feasible";
    case FeasibilityStatus::Infeasible: return "infeasible";
    case FeasibilityStatus::Undecided: return "undecided";
  }
  return "?";
}

std::string_view verdict_name(SdpVerdict verdict) {
  switch (verdict) {
    case SdpVerdict::Entangled: return "entangled";
    case SdpVerdict::SeparableConsistent: return "separable-consistent";
    case SdpVerdict::Undecided: return "undecided";
  }
  return "?";
}

namespace {

double cone_violation(const ComplexMatrix& x, std::size_t da, std::size_t db) {
  double worst = min_eigenvalue(x);
  worst = std::min(worst, min_eigenvalue(partial_transpose3(x, da, db, da, 0)));
  worst = std::min(worst, min_eigenvalue(partial_transpose3(x, da, db, da, 1)));
  return std::max(0.0, -worst);
}

// Iterate of the projection sweep: the affine point, plus one Dykstra
// increment per cone when corrections are on.
using SweepState = std::vector<ComplexMatrix>;

SweepState operator-(const SweepState& a, const SweepState& b) {
  SweepState out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double inner(const SweepState& a, const SweepState& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto ea = a[k].entries(), eb = b[k].entries();
    for (std::size_t i = 0; i < ea.size(); ++i) s += ea[i].real() * eb[i].real() + ea[i].imag() * eb[i].imag();
  }
  return s;
}

class ProjectionSweep {
 public:
  ProjectionSweep(const ComplexMatrix& rho, std::size_t da, std::size_t db, double margin, bool dykstra)
      : rho_(rho), da_(da), db_(db), margin_(margin), dykstra_(dykstra) {}

  // PSD cone, T_A cone, T_B cone, then the affine set.
  SweepState operator()(const SweepState& s) const {
    SweepState out(s.size());
    ComplexMatrix t = s[0];
    for (int cone = 0; cone < 3; ++cone) {
      const ComplexMatrix y = dykstra_ ? t + s[static_cast<std::size_t>(cone) + 1] : t;
      t = project_cone(y, cone);
      if (dykstra_) out[static_cast<std::size_t>(cone) + 1] = y - t;
    }
    out[0] = project_extension_affine(t, rho_, da_, db_);
    return out;
  }

  SweepState initial(const ComplexMatrix& x) const {
    SweepState s(dykstra_ ? 4 : 1, ComplexMatrix(x.rows(), x.cols()));
    s[0] = x;
    return s;
  }

 private:
  ComplexMatrix project_cone(const ComplexMatrix& y, int cone) const {
    if (cone == 0) return project_psd(y, margin_);
    const int factor = cone - 1;
    return partial_transpose3(project_psd(partial_transpose3(y, da_, db_, da_, factor), margin_), da_, db_,
                              da_, factor);
  }

  const ComplexMatrix& rho_;
  std::size_t da_, db_;
  double margin_;
  bool dykstra_;
};

// Least-squares mixing weights for Anderson acceleration, by Cholesky-free
// elimination on the small regularized Gram system.
std::vector<double> mixing_weights(const std::deque<SweepState>& df, const SweepState& f) {
  const std::size_t m = df.size();
  std::vector<double> a(m * m), b(m), g(m);
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    b[i] = inner(df[i], f);
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = inner(df[i], df[j]);
    trace += a[i * m + i];
  }
  for (std::size_t i = 0; i < m; ++i) a[i * m + i] += 1e-10 * trace + std::numeric_limits<double>::min();
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = c + 1; r < m; ++r) {
      const double factor = a[r * m + c] / a[c * m + c];
      for (std::size_t k = c; k < m; ++k) a[r * m + k] -= factor * a[c * m + k];
      b[r] -= factor * b[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    double acc = b[c];
    for (std::size_t k = c + 1; k < m; ++k) acc -= a[c * m + k] * g[k];
    g[c] = acc / a[c * m + c];
  }
  return g;
}

}  // namespace

FeasibilityResult symmetric_extension_feasibility(const DensityMatrix& rho, std::size_t da, std::size_t db,
                                                  const FeasibilityConfig& config) {
  if (da < 1 || db < 1 || da * da * db > kMaxExtensionWeight)
    throw std::invalid_argument("symmetric_extension_feasibility: d_a^2 d_b must be at most 100");
  if (rho.dim() != da * db)
    throw std::invalid_argument("symmetric_extension_feasibility: rho does not match d_a d_b");
  if (config.max_iter < 1 || !(config.tol > 0.0) || config.stall_window < 1 || config.anderson_memory < 0)
    throw std::invalid_argument("symmetric_extension_feasibility: invalid configuration");

  FeasibilityResult result;
  const double ppt = ppt_min_eigenvalue(rho, da, db);
  if (config.ppt_short_circuit && ppt < -config.tol) {
    result.status = FeasibilityStatus::Infeasible;
    result.residual = -ppt;
    return result;
  }

  const ComplexMatrix& r = rho.matrix();
  const double margin =
      config.margin_fraction * std::max(0.0, std::min(min_eigenvalue(r), ppt)) / static_cast<double>(da);
  const ProjectionSweep sweep(r, da, db, margin, config.dykstra);

  // Start from rho (x) rho_A, which already reduces to rho up to symmetrization.
  const ComplexMatrix rho_a = partial_trace(r, da, db, Subsystem::A);
  SweepState x = sweep.initial(project_extension_affine(tensor_product(r, rho_a), r, da, db));
  SweepState g = sweep(x);
  SweepState f = g - x;
  std::deque<SweepState> dx, df;
  std::deque<double> history;
  double best = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= config.max_iter; ++it) {
    result.iterations = it;
    const double violation = cone_violation(g[0], da, db);
    best = std::min(best, violation);
    if (violation < config.tol) {
      result.status = FeasibilityStatus::Feasible;
      result.residual = violation;
      result.extension = g[0];
      return result;
    }
    history.push_back(best);
    if (static_cast<int>(history.size()) > config.stall_window) {
      const double before = history.front();
      history.pop_front();
      if (best > before * (1.0 - config.stall_improvement)) {
        result.status = FeasibilityStatus::Infeasible;
        result.residual = best;
        return result;
      }
    }

    // Anderson step: mix past sweep outputs; affine weights keep x[0] in the affine set.
    SweepState next = g;
    if (!df.empty()) {
      const std::vector<double> gamma = mixing_weights(df, f);
      for (std::size_t i = 0; i < gamma.size(); ++i)
        for (std::size_t k = 0; k < next.size(); ++k) next[k] -= (dx[i][k] + df[i][k]) * Complex(gamma[i]);
    }
    SweepState g_next = sweep(next);
    SweepState f_next = g_next - next;
    if (!df.empty() && inner(f_next, f_next) > 4.0 * inner(f, f)) {
      // The extrapolated point made things worse: fall back to the plain sweep.
      dx.clear();
      df.clear();
      next = g;
      g_next = sweep(next);
      f_next = g_next - next;
    } else if (config.anderson_memory > 0) {
      dx.push_back(next - x);
      df.push_back(f_next - f);
      if (static_cast<int>(dx.size()) > config.anderson_memory) {
        dx.pop_front();
        df.pop_front();
      }
    }
    x = std::move(next);
    g = std::move(g_next);
    f = std::move(f_next);
  }
  result.status = FeasibilityStatus::Undecided;
  result.residual = best;
  return result;
}

SdpClassification classify_sdp(const DensityMatrix& rho, std::size_t da, std::size_t db, int iter_budget) {
  SdpClassification out;
  out.ppt_min_eig = ppt_min_eigenvalue(rho, da, db);
  if (out.ppt_min_eig < -kPptTolerance) {
    out.verdict = SdpVerdict::Entangled;
    out.feasibility.status = FeasibilityStatus::Infeasible;
    out.feasibility.residual = -out.ppt_min_eig;
    return out;
  }
  FeasibilityConfig config;
  config.max_iter = iter_budget;
  out.feasibility = symmetric_extension_feasibility(rho, da, db, config);
  switch (out.feasibility.status) {
    case FeasibilityStatus::Feasible: out.verdict = SdpVerdict::SeparableConsistent; break;
    case FeasibilityStatus::Infeasible: out.verdict = SdpVerdict::Entangled; break;
    case FeasibilityStatus::Undecided: out.verdict = SdpVerdict::Undecided; break;
  }
  return out;
}

DensityMatrix random_density_matrix(std::size_t d, std::size_t rank, std::uint64_t seed) {
  if (d < 1 || rank < 1 || rank > d) throw std::invalid_argument("random_density_matrix: need 1 <= rank <= d");
  std::mt19937_64 rng(derive_seed(seed, "ginibre"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, rank);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < rank; ++k) g(i, k) = Complex(gauss(rng), gauss(rng));
  ComplexMatrix m = g * g.adjoint();
  m *= Complex(1.0 / m.trace().real());
  return DensityMatrix::from_matrix((m + m.adjoint()) * Complex(0.5));
}

}  // namespace qcorr
