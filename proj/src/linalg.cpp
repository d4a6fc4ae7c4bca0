#include "qcorr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcorr {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
  }
  for (const auto& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("ComplexMatrix: non-finite entry");
    }
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("from_rows: ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return {r, c, std::move(entries)};
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v, std::span<const Complex> w) {
  ComplexMatrix m(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix addition: shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix subtraction: shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
  ComplexMatrix m(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
    }
  }
  return m;
}

double hermiticity_residual(const ComplexMatrix& a) {
  if (!a.is_square()) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
  return r;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    r = std::max(r, std::abs(a.entries()[i] - b.entries()[i]));
  return r;
}

Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw std::invalid_argument("trace_of_product: shape mismatch");
  Complex t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

ComplexMatrix pauli_x() { return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
ComplexMatrix pauli_y() {
  return ComplexMatrix::from_rows({{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}});
}
ComplexMatrix pauli_z() { return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tensor_product: empty operand");
  ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return m;
}

namespace {

void require_bipartite(const ComplexMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                       const char* what) {
  if (!rho.is_square() || rho.rows() != dim_a * dim_b || dim_a == 0 || dim_b == 0) {
    throw std::invalid_argument(std::string(what) + ": operator is not (" +
                                std::to_string(dim_a) + "*" + std::to_string(dim_b) +
                                ")-square");
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep) {
  require_bipartite(rho, dim_a, dim_b, "partial_trace");
  if (keep == Subsystem::A) {
    ComplexMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j)
        for (std::size_t k = 0; k < dim_b; ++k) out(i, j) += rho(i * dim_b + k, j * dim_b + k);
    return out;
  }
  ComplexMatrix out(dim_b, dim_b);
  for (std::size_t k = 0; k < dim_b; ++k)
    for (std::size_t l = 0; l < dim_b; ++l)
      for (std::size_t i = 0; i < dim_a; ++i) out(k, l) += rho(i * dim_b + k, i * dim_b + l);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                                Subsystem subsystem) {
  require_bipartite(rho, dim_a, dim_b, "partial_transpose");
  ComplexMatrix out(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t k = 0; k < dim_b; ++k)
      for (std::size_t j = 0; j < dim_a; ++j)
        for (std::size_t l = 0; l < dim_b; ++l) {
          const Complex v = rho(i * dim_b + k, j * dim_b + l);
          if (subsystem == Subsystem::A)
            out(j * dim_b + k, i * dim_b + l) = v;
          else
            out(i * dim_b + l, j * dim_b + k) = v;
        }
  return out;
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& h) {
  if (!h.is_square() || h.empty()) throw std::invalid_argument("hermitian_eigen: not square");
  const double scale = std::max(1.0, h.max_abs());
  if (hermiticity_residual(h) > kStateTolerance * scale)
    throw std::invalid_argument("hermitian_eigen: input is not Hermitian");

  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  const double stop = 1e-15 * std::max(a.frobenius_norm(), 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r < 1e-300) continue;
        // J = [[c, s e], [-s conj(e), c]] with e the phase of a_pq zeroes a_pq in J^dag A J.
        const Complex e = a(p, q) / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex jpp = c, jpq = s * e, jqp = -s * std::conj(e), jqq = c;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  return hermitian_eigen(h).values;
}

double min_eigenvalue(const ComplexMatrix& h) { return hermitian_eigen(h).values.front(); }

ComplexMatrix reconstruct(const EigenDecomposition& eig) {
  const std::size_t n = eig.values.size();
  ComplexMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = lambda * eig.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) m(i, j) += vik * std::conj(eig.vectors(j, k));
    }
  }
  return m;
}

StateCheck check_state(const ComplexMatrix& m) {
  StateCheck check;
  check.hermiticity = hermiticity_residual(m);
  if (!m.is_square() || m.empty()) {
    check.trace_error = std::numeric_limits<double>::infinity();
    check.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return check;
  }
  check.trace_error = std::abs(m.trace() - 1.0);
  if (check.hermiticity > kStateTolerance) {
    check.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return check;
  }
  check.min_eigenvalue = min_eigenvalue(m);
  return check;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  const StateCheck check = check_state(m);
  if (!check.valid()) {
    throw std::invalid_argument(
        "DensityMatrix: invariant violated (hermiticity " + std::to_string(check.hermiticity) +
        ", trace error " + std::to_string(check.trace_error) + ", min eigenvalue " +
        std::to_string(check.min_eigenvalue) + ")");
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> ket) {
  double norm2 = 0.0;
  for (const auto& z : ket) norm2 += std::norm(z);
  if (norm2 <= 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  return from_matrix(ComplexMatrix::projector(ket) * Complex(1.0 / norm2));
}

double DensityMatrix::purity() const { return trace_of_product(matrix_, matrix_).real(); }

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("bloch_vector: state is not a qubit");
  const auto& m = rho.matrix();
  return {trace_of_product(m, pauli_x()).real(), trace_of_product(m, pauli_y()).real(),
          trace_of_product(m, pauli_z()).real()};
}

ComplexMatrix qubit_operator(const BlochVector& r, double trace) {
  const double h = 0.5 * trace;
  return ComplexMatrix::from_rows({{h * (1.0 + r.z), h * Complex(r.x, -r.y)},
                                   {h * Complex(r.x, r.y), h * (1.0 - r.z)}});
}

DensityMatrix nearest_density_matrix(const ComplexMatrix& h) {
  if (!h.is_square() || h.empty()) throw std::invalid_argument("nearest_density_matrix: not square");
  if (h.max_abs() == 0.0) throw std::invalid_argument("nearest_density_matrix: all-zero input");
  const ComplexMatrix herm = (h + h.adjoint()) * Complex(0.5);
  EigenDecomposition eig = hermitian_eigen(herm);

  double positive = 0.0;
  double deficit = 0.0;
  for (double lambda : eig.values) (lambda > 0.0 ? positive : deficit) += lambda;
  if (positive <= 0.0)
    throw std::invalid_argument("nearest_density_matrix: no positive spectrum to keep");
  for (double& lambda : eig.values) {
    lambda = lambda > 0.0 ? lambda + deficit * (lambda / positive) : 0.0;
  }
  const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  for (double& lambda : eig.values) lambda /= total;

  ComplexMatrix rho = reconstruct(eig);
  // Exact Hermiticity after floating-point reconstruction.
  rho = (rho + rho.adjoint()) * Complex(0.5);
  return DensityMatrix::from_matrix(std::move(rho));
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  EigenDecomposition eig = hermitian_eigen(h);
  for (double& lambda : eig.values) lambda = std::sqrt(std::max(lambda, 0.0));
  return reconstruct(eig);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const ComplexMatrix root = psd_sqrt(rho.matrix());
  ComplexMatrix inner = root * sigma.matrix() * root;
  inner = (inner + inner.adjoint()) * Complex(0.5);
  double t = 0.0;
  for (double lambda : hermitian_eigenvalues(inner)) t += std::sqrt(std::max(lambda, 0.0));
  return t * t;
}

}  // namespace qcorr
