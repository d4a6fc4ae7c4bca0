// Dense complex linear algebra for small Hilbert spaces.
//
// Everything here is sized for d <= 27: matrices are row-major
// std::vector<std::complex<double>> and the Hermitian eigensolver is a
// cyclic Jacobi sweep. No routine keeps state between calls.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qcorr {

using Complex = std::complex<double>;

/// Tolerance used for Hermiticity, trace and positivity checks.
inline constexpr double kStateTolerance = 1e-9;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const double> values);
  /// Rows given as nested braces; all rows must have the same length.
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  /// |v><w|
  static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w);
  static ComplexMatrix projector(std::span<const Complex> ket) { return outer(ket, ket); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  /// Largest |entry|.
  double max_abs() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

/// max |A - A^dagger| over entries.
double hermiticity_residual(const ComplexMatrix& a);
/// max |A - B| over entries; shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// Tr(A B) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

enum class Subsystem { A, B };

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced operator on `keep` for an operator on A (x) B.
ComplexMatrix partial_trace(const ComplexMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep);

/// Transposes the indices of `subsystem`: rho^{T_A}_{ik,jl} = rho_{jk,il}.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                                Subsystem subsystem);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]
};

/// Cyclic Jacobi eigensolver. Throws std::invalid_argument when the input is
/// not square or not Hermitian to kStateTolerance (relative to its scale).
EigenDecomposition hermitian_eigen(const ComplexMatrix& h);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);
double min_eigenvalue(const ComplexMatrix& h);

/// V diag(lambda) V^dagger
ComplexMatrix reconstruct(const EigenDecomposition& eig);

class DensityMatrix {
 public:
  /// Validates trace, Hermiticity and positivity; throws std::invalid_argument.
  static DensityMatrix from_matrix(ComplexMatrix m);
  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix pure(std::span<const Complex> ket);

  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double purity() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

/// Residuals measured against the DensityMatrix invariants.
struct StateCheck {
  double hermiticity = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool valid() const {
    return hermiticity < kStateTolerance && trace_error < kStateTolerance &&
           min_eigenvalue >= -kStateTolerance;
  }
};
StateCheck check_state(const ComplexMatrix& m);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double length() const;
};

BlochVector bloch_vector(const DensityMatrix& rho);
/// (I + r.sigma)/2 for any real r (not validated as a state).
ComplexMatrix qubit_operator(const BlochVector& r, double trace = 1.0);

/// Hermitize, clip negative eigenvalues, spread the clipped mass over the
/// remaining positive eigenvalues in proportion to their size, renormalize.
DensityMatrix nearest_density_matrix(const ComplexMatrix& h);

/// Principal square root of a PSD matrix (negative eigenvalues clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix& h);
/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qcorr
