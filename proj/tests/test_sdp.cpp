#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcorr/criteria.hpp"
#include "qcorr/sdp.hpp"
#include "qcorr/seeding.hpp"
#include "qcorr/state_family.hpp"

using namespace qcorr;
using std::numbers::pi;

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

bool ppt_separable(const DensityMatrix& rho, std::size_t da, std::size_t db) {
  return ppt_min_eigenvalue(rho, da, db) >= -kPptTolerance;
}

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("Hermitian operator bases") {
    const OperatorBasis b2 = build_hermitian_basis(2);
    REQUIRE(b2.elements.size() == 4);
    CHECK(b2.alpha == 2.0);
    CHECK(b2.elements[0] == ComplexMatrix::identity(2));
    // The three traceless elements are the Pauli matrices up to order.
    for (const auto& pauli : {pauli_x(), pauli_y(), pauli_z()}) {
      int found = 0;
      for (std::size_t k = 1; k < 4; ++k)
        if (max_abs_diff(b2.elements[k], pauli) < 1e-15) ++found;
      CHECK(found == 1);
    }

    for (std::size_t d : {2, 3, 4}) {
      const OperatorBasis b = build_hermitian_basis(d);
      REQUIRE(b.elements.size() == d * d);
      double worst = 0.0;
      for (std::size_t i = 0; i < b.elements.size(); ++i) {
        CHECK(hermiticity_residual(b.elements[i]) == 0.0);
        if (i > 0) CHECK(std::abs(b.elements[i].trace()) < 1e-15);
        for (std::size_t j = 0; j < b.elements.size(); ++j) {
          const Complex g = trace_of_product(b.elements[i], b.elements[j]);
          worst = std::max(worst, std::abs(g - Complex(i == j ? b.alpha : 0.0, 0.0)));
        }
      }
      CHECK(worst < 1e-12);
    }
    CHECK_THROWS_AS(build_hermitian_basis(1), std::invalid_argument);
  }

  TEST_CASE("expansion round trip") {
    for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}, {3, 3}}) {
      const OperatorBasis a = build_hermitian_basis(da), b = build_hermitian_basis(db);
      const DensityMatrix rho = random_density_matrix(da * db, da * db, da * 10 + db);
      const auto c = basis_coefficients(rho.matrix(), a, b);
      CHECK(c[0] == doctest::Approx(1.0 / (a.alpha * b.alpha)));
      CHECK(max_abs_diff(basis_expand(c, a, b), rho.matrix()) < 1e-10);
    }
  }

  TEST_CASE("three-party operators") {
    const ComplexMatrix x = random_hermitian(12, 1);
    // Transposing the first factor equals the bipartite transpose with B(x)A' grouped.
    CHECK(max_abs_diff(partial_transpose3(x, 2, 3, 2, 0), partial_transpose(x, 2, 6, Subsystem::A)) == 0.0);
    CHECK(max_abs_diff(partial_transpose3(partial_transpose3(x, 2, 3, 2, 1), 2, 3, 2, 1), x) == 0.0);

    CHECK(swap_copies(swap_copies(x, 2, 3), 2, 3) == x);
    const ComplexMatrix p = random_density_matrix(2, 2, 1).matrix(), q = random_density_matrix(3, 3, 2).matrix(),
                        r = random_density_matrix(2, 2, 3).matrix();
    CHECK(max_abs_diff(swap_copies(tensor_product(tensor_product(p, q), r), 2, 3),
                       tensor_product(tensor_product(r, q), p)) < 1e-15);
    CHECK(max_abs_diff(trace_out_copy(tensor_product(tensor_product(p, q), r), 2, 3), tensor_product(p, q)) < 1e-15);
  }

  TEST_CASE("affine projection") {
    for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}}) {
      const std::size_t n = da * db * da;
      const DensityMatrix rho = random_density_matrix(da * db, da * db, 77 + db);
      const ComplexMatrix z = random_hermitian(n, 5 + db);
      const ComplexMatrix x = project_extension_affine(z, rho.matrix(), da, db);
      CHECK(max_abs_diff(trace_out_copy(x, da, db), rho.matrix()) < 1e-12);
      CHECK(swap_copies(x, da, db) == x);
      CHECK(max_abs_diff(project_extension_affine(x, rho.matrix(), da, db), x) < 1e-12);
      CHECK(max_abs_diff(x, oracle::coefficient_route_projection(z, rho.matrix(), da, db)) < 1e-10);
      // Orthogonality: z - x is orthogonal to feasible directions.
      const ComplexMatrix other = project_extension_affine(random_hermitian(n, 99), rho.matrix(), da, db);
      CHECK(std::abs(trace_of_product(z - x, other - x)) < 1e-9);
    }
  }

  TEST_CASE("PSD projection") {
    const ComplexMatrix h = random_hermitian(6, 3);
    const ComplexMatrix p = project_psd(h);
    CHECK(min_eigenvalue(p) >= -1e-12);
    CHECK(max_abs_diff(project_psd(p), p) < 1e-10);
    CHECK(min_eigenvalue(project_psd(h, 0.1)) >= 0.1 - 1e-12);
  }

  TEST_CASE("feasibility on known states") {
    const FeasibilityResult mixed = symmetric_extension_feasibility(DensityMatrix::maximally_mixed(4), 2, 2);
    CHECK(mixed.status == FeasibilityStatus::Feasible);
    REQUIRE(mixed.extension.has_value());
    CHECK(max_abs_diff(*mixed.extension, ComplexMatrix::identity(8) * Complex(0.125, 0.0)) < 1e-6);

    const DensityMatrix bell = make_state({1.0, pi / 4});
    CHECK(symmetric_extension_feasibility(bell, 2, 2).status == FeasibilityStatus::Infeasible);
    FeasibilityConfig full;
    full.ppt_short_circuit = false;
    CHECK(symmetric_extension_feasibility(bell, 2, 2, full).status == FeasibilityStatus::Infeasible);

    for (const FeasibilityConfig& cfg : {FeasibilityConfig{}, full}) {
      const FeasibilityResult sep = symmetric_extension_feasibility(make_state({0.2, pi / 4}), 2, 2, cfg);
      CHECK(sep.status == FeasibilityStatus::Feasible);
      REQUIRE(sep.extension.has_value());
      const ComplexMatrix& w = *sep.extension;
      CHECK(max_abs_diff(trace_out_copy(w, 2, 2), make_state({0.2, pi / 4}).matrix()) < 1e-8);
      CHECK(swap_copies(w, 2, 2) == w);
      CHECK(min_eigenvalue(w) >= -1e-7);
      CHECK(min_eigenvalue(partial_transpose3(w, 2, 2, 2, 0)) >= -1e-7);
      CHECK(min_eigenvalue(partial_transpose3(w, 2, 2, 2, 1)) >= -1e-7);
      CHECK(symmetric_extension_feasibility(make_state({0.8, pi / 4}), 2, 2, cfg).status ==
            FeasibilityStatus::Infeasible);
    }

    FeasibilityConfig dykstra;
    dykstra.dykstra = true;
    dykstra.anderson_memory = 0;
    dykstra.max_iter = 3000;
    dykstra.ppt_short_circuit = false;
    CHECK(symmetric_extension_feasibility(make_state({0.2, pi / 4}), 2, 2, dykstra).status ==
          FeasibilityStatus::Feasible);
    CHECK(symmetric_extension_feasibility(make_state({0.8, pi / 4}), 2, 2, dykstra).status !=
          FeasibilityStatus::Feasible);
  }

  TEST_CASE("input guards") {
    CHECK_THROWS_AS(symmetric_extension_feasibility(DensityMatrix::maximally_mixed(4), 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(symmetric_extension_feasibility(DensityMatrix::maximally_mixed(28), 4, 7), std::invalid_argument);
    FeasibilityConfig bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(symmetric_extension_feasibility(DensityMatrix::maximally_mixed(4), 2, 2, bad),
                    std::invalid_argument);
    bad = {};
    bad.tol = -1.0;
    CHECK_THROWS_AS(symmetric_extension_feasibility(DensityMatrix::maximally_mixed(4), 2, 2, bad),
                    std::invalid_argument);
    CHECK(symmetric_extension_feasibility(DensityMatrix::maximally_mixed(9), 3, 3).status == FeasibilityStatus::Feasible);
  }

  TEST_CASE("classification agrees with PPT on random states") {
    int agree = 0, total = 0;
    for (std::uint64_t i = 0; i < 60; ++i) {
      const std::size_t db = i % 2 ? 3 : 2;
      const DensityMatrix rho = random_density_matrix(2 * db, 2 * db, derive_seed(3, "unit-sdp", i));
      const SdpClassification c = classify_sdp(rho, 2, db);
      const bool ppt = ppt_separable(rho, 2, db);
      // Never calls a PPT-violating state separable.
      if (!ppt) CHECK(c.verdict == SdpVerdict::Entangled);
      agree += (c.verdict == SdpVerdict::SeparableConsistent) == ppt;
      ++total;
    }
    CHECK(agree == total);
    CHECK(verdict_name(SdpVerdict::SeparableConsistent) == "separable-consistent");
    CHECK(status_name(FeasibilityStatus::Undecided) == "undecided");
  }

  TEST_CASE("random density matrices") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const DensityMatrix rho = random_density_matrix(4, 1 + seed % 4, seed);
      const StateCheck c = check_state(rho.matrix());
      CHECK(c.valid());
      CHECK(c.trace_error < 1e-12);
    }
    CHECK(random_density_matrix(3, 1, 5).purity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(random_density_matrix(4, 2, 9).matrix() == random_density_matrix(4, 2, 9).matrix());
    CHECK_THROWS_AS(random_density_matrix(2, 0, 1), std::invalid_argument);

    // Ginibre ensemble with k = d: E[Tr rho^2] = (d + k) / (d k + 1).
    const int draws = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double purity = random_density_matrix(2, 2, derive_seed(11, "purity", static_cast<std::uint64_t>(i))).purity();
      sum += purity;
      sum2 += purity * purity;
    }
    const double mean = sum / draws;
    const double sd = std::sqrt((sum2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 0.8) < 3.0 * sd);
  }
}
