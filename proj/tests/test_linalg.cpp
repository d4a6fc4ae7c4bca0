#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qcorr/linalg.hpp"

using namespace qcorr;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = g(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = Complex(g(rng), g(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

ComplexMatrix bell_phi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> ket = {h, 0.0, 0.0, h};
  return ComplexMatrix::projector(ket);
}

ComplexMatrix random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (auto& e : a.entries()) e = Complex(g(rng), g(rng));
  ComplexMatrix m = a * a.adjoint();
  return m * Complex(1.0 / m.trace().real(), 0.0);
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("constructors validate their input") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<Complex>(3)), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, {Complex(std::nan(""), 0.0)}), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, {Complex(INFINITY, 0.0)}), std::invalid_argument);
    CHECK_THROWS(ComplexMatrix::from_rows({{1.0, 2.0}, {3.0}}));
    CHECK_THROWS_AS(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), std::invalid_argument);
  }

  TEST_CASE("tensor products of simple operators") {
    CHECK(tensor_product(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) == ComplexMatrix::identity(4));
    const std::vector<double> zz = {1, -1, -1, 1};
    CHECK(max_abs_diff(tensor_product(pauli_z(), pauli_z()), ComplexMatrix::diagonal(zz)) == 0.0);
    const std::vector<double> p0 = {1, 0}, p1 = {0, 1}, expect = {0, 1, 0, 0};
    CHECK(max_abs_diff(tensor_product(ComplexMatrix::diagonal(p0), ComplexMatrix::diagonal(p1)),
                       ComplexMatrix::diagonal(expect)) == 0.0);
    // Kronecker index layout: (a (x) b)(i*db + k, j*db + l) = a(i,j) b(k,l)
    const ComplexMatrix a = random_hermitian(2, 1), b = random_hermitian(3, 2);
    const ComplexMatrix ab = tensor_product(a, b);
    REQUIRE(ab.rows() == 6);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 3; ++k)
          for (std::size_t l = 0; l < 3; ++l) CHECK(ab(i * 3 + k, j * 3 + l) == a(i, j) * b(k, l));
  }

  TEST_CASE("partial trace") {
    const ComplexMatrix half = ComplexMatrix::identity(2) * Complex(0.5, 0.0);
    CHECK(max_abs_diff(partial_trace(bell_phi_plus(), 2, 2, Subsystem::B), half) < 1e-15);
    CHECK(max_abs_diff(partial_trace(bell_phi_plus(), 2, 2, Subsystem::A), half) < 1e-15);

    const ComplexMatrix rho = random_state(2, 3), tau = random_state(3, 4) * Complex(2.5, 0.0);
    const ComplexMatrix prod = tensor_product(rho, tau);
    CHECK(max_abs_diff(partial_trace(prod, 2, 3, Subsystem::A), rho * tau.trace()) < 1e-12);
    CHECK(max_abs_diff(partial_trace(prod, 2, 3, Subsystem::B), tau * rho.trace()) < 1e-12);

    CHECK_THROWS_AS(partial_trace(prod, 2, 2, Subsystem::A), std::invalid_argument);
  }

  TEST_CASE("partial trace of the family state keeping A") {
    for (double p : {0.0, 0.3, 0.8, 1.0})
      for (double theta : {0.2, 0.7, 1.3}) {
        const double c = std::cos(theta), s = std::sin(theta);
        const std::vector<Complex> ket = {c, 0.0, 0.0, s};
        const std::vector<double> rb = {c * c, s * s};
        const ComplexMatrix rho = ComplexMatrix::projector(ket) * Complex(p, 0.0) +
                                  tensor_product(ComplexMatrix::identity(2), ComplexMatrix::diagonal(rb)) *
                                      Complex((1.0 - p) / 2.0, 0.0);
        const std::vector<double> expect_diag = {p * c * c + (1 - p) / 2, p * s * s + (1 - p) / 2};
        CHECK(max_abs_diff(partial_trace(rho, 2, 2, Subsystem::A), ComplexMatrix::diagonal(expect_diag)) < 1e-14);
      }
  }

  TEST_CASE("partial transpose") {
    const std::vector<double> d = {0.1, 0.2, 0.3, 0.4};
    const ComplexMatrix diag = ComplexMatrix::diagonal(d);
    CHECK(partial_transpose(diag, 2, 2, Subsystem::A) == diag);
    CHECK(partial_transpose(diag, 2, 2, Subsystem::B) == diag);

    CHECK(min_eigenvalue(partial_transpose(bell_phi_plus(), 2, 2, Subsystem::A)) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(min_eigenvalue(partial_transpose(bell_phi_plus(), 2, 2, Subsystem::B)) == doctest::Approx(-0.5).epsilon(1e-12));

    const ComplexMatrix rho = random_state(6, 9);
    for (auto side : {Subsystem::A, Subsystem::B}) {
      CHECK(partial_transpose(partial_transpose(rho, 2, 3, side), 2, 3, side) == rho);
    }
    // T_A and T_B differ by a full transpose.
    CHECK(max_abs_diff(partial_transpose(rho, 2, 3, Subsystem::A),
                       partial_transpose(rho, 2, 3, Subsystem::B).transpose()) < 1e-15);
  }

  TEST_CASE("hermitian eigensolver") {
    auto z = hermitian_eigenvalues(pauli_z());
    CHECK(z[0] == doctest::Approx(-1.0));
    CHECK(z[1] == doctest::Approx(1.0));
    auto x = hermitian_eigenvalues(pauli_x());
    CHECK(x[0] == doctest::Approx(-1.0));
    CHECK(x[1] == doctest::Approx(1.0));

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ComplexMatrix h = random_hermitian(8, seed);
      const EigenDecomposition e = hermitian_eigen(h);
      CHECK(max_abs_diff(reconstruct(e), h) < 1e-8);
      CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, ComplexMatrix::identity(8)) < 1e-10);
      CHECK(std::is_sorted(e.values.begin(), e.values.end()));
      double sum = 0.0;
      for (double v : e.values) sum += v;
      CHECK(sum == doctest::Approx(h.trace().real()).epsilon(1e-10));
    }
    // Degenerate spectrum
    const std::vector<double> deg = {2.0, 2.0, -1.0};
    const auto ev = hermitian_eigenvalues(ComplexMatrix::diagonal(deg));
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[2] == doctest::Approx(2.0));

    CHECK_THROWS_AS(hermitian_eigen(ComplexMatrix::from_rows({{1.0, 2.0}, {0.0, 1.0}})), std::invalid_argument);
  }

  TEST_CASE("density matrix validation") {
    CHECK_NOTHROW(DensityMatrix::from_matrix(random_state(4, 11)));
    CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix::identity(2)), std::invalid_argument);
    const std::vector<double> neg = {1.2, -0.2};
    CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix::diagonal(neg)), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix::from_rows({{0.5, 0.1}, {0.2, 0.5}})),
                    std::invalid_argument);
    CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));
    const std::vector<Complex> ket = {std::sqrt(0.5), Complex(0.0, std::sqrt(0.5))};
    CHECK(DensityMatrix::pure(ket).purity() == doctest::Approx(1.0));
    CHECK(check_state(random_state(5, 3)).valid());
  }

  TEST_CASE("bloch vectors") {
    const std::vector<double> zero = {1.0, 0.0};
    auto r = bloch_vector(DensityMatrix::from_matrix(ComplexMatrix::diagonal(zero)));
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.z == doctest::Approx(1.0));
    r = bloch_vector(DensityMatrix::maximally_mixed(2));
    CHECK(r.length() == doctest::Approx(0.0));
    const ComplexMatrix m = (ComplexMatrix::identity(2) + pauli_x() * Complex(0.5, 0.0)) * Complex(0.5, 0.0);
    r = bloch_vector(DensityMatrix::from_matrix(m));
    CHECK(r.x == doctest::Approx(0.5));
    CHECK(r.y == doctest::Approx(0.0));
    CHECK(r.z == doctest::Approx(0.0));
    CHECK(max_abs_diff(qubit_operator({0.5, 0.0, 0.0}), m) < 1e-15);
    for (std::uint64_t seed = 1; seed < 20; ++seed) {
      const auto rho = DensityMatrix::from_matrix(random_state(2, seed));
      const auto b = bloch_vector(rho);
      CHECK(b.length() <= 1.0 + 1e-12);
      CHECK(max_abs_diff(qubit_operator(b), rho.matrix()) < 1e-12);
    }
  }

  TEST_CASE("nearest density matrix") {
    const ComplexMatrix valid = random_state(4, 21);
    CHECK(max_abs_diff(nearest_density_matrix(valid).matrix(), valid) < 1e-9);

    const std::vector<double> d = {1.2, -0.2}, expect = {1.0, 0.0};
    CHECK(max_abs_diff(nearest_density_matrix(ComplexMatrix::diagonal(d)).matrix(), ComplexMatrix::diagonal(expect)) <
          1e-12);

    const ComplexMatrix a = ComplexMatrix::from_rows({{0.7, Complex(0.3, 0.2)}, {Complex(-0.1, 0.4), 0.5}});
    const ComplexMatrix sym = (a + a.adjoint()) * Complex(0.5, 0.0);
    CHECK(max_abs_diff(nearest_density_matrix(a).matrix(), nearest_density_matrix(sym).matrix()) < 1e-14);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const ComplexMatrix h = random_hermitian(4, seed);
      const DensityMatrix rho = nearest_density_matrix(h);
      const StateCheck c = check_state(rho.matrix());
      CHECK(c.valid());
      CHECK(c.trace_error < 1e-12);
    }
  }

  TEST_CASE("psd square root and fidelity") {
    const ComplexMatrix rho = random_state(4, 5);
    const ComplexMatrix s = psd_sqrt(rho);
    CHECK(max_abs_diff(s * s, rho) < 1e-12);

    const auto r = DensityMatrix::from_matrix(rho);
    CHECK(fidelity(r, r) == doctest::Approx(1.0).epsilon(1e-10));
    const std::vector<Complex> k0 = {1.0, 0.0}, k1 = {0.0, 1.0};
    const double h = 1.0 / std::sqrt(2.0);
    const std::vector<Complex> kp = {h, h};
    CHECK(fidelity(DensityMatrix::pure(k0), DensityMatrix::pure(k1)) == doctest::Approx(0.0));
    CHECK(fidelity(DensityMatrix::pure(k0), DensityMatrix::pure(kp)) == doctest::Approx(0.5));
    const auto q = DensityMatrix::from_matrix(random_state(4, 6));
    CHECK(fidelity(r, q) == doctest::Approx(fidelity(q, r)).epsilon(1e-10));
    CHECK(fidelity(r, q) <= 1.0 + 1e-12);
    // Commuting states: F = (sum sqrt(p_i q_i))^2
    const std::vector<double> p = {0.5, 0.3, 0.2}, qd = {0.2, 0.2, 0.6};
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) expect += std::sqrt(p[i] * qd[i]);
    CHECK(fidelity(DensityMatrix::from_matrix(ComplexMatrix::diagonal(p)),
                   DensityMatrix::from_matrix(ComplexMatrix::diagonal(qd))) == doctest::Approx(expect * expect));
  }
}
