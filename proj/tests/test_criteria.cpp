#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcorr/criteria.hpp"
#include "qcorr/sdp.hpp"
#include "qcorr/state_family.hpp"

using namespace qcorr;
using std::numbers::pi;

namespace {

DensityMatrix bell() { return make_state({1.0, pi / 4}); }

// Smallest eigenvalue of the 2x2 block {|01>, |10>} of the partial transpose,
// the only block that can go negative.
double pt_block_min(double p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double a = (1 - p) * s * s / 2, d = (1 - p) * c * c / 2, b = p * c * s;
  return (a + d) / 2 - std::sqrt((a - d) * (a - d) / 4 + b * b);
}

}  // namespace

TEST_SUITE("criteria") {
  TEST_CASE("PPT minimum eigenvalue") {
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0})
      CHECK(ppt_min_eigenvalue(make_state({p, pi / 4})) == doctest::Approx((1 - 3 * p) / 4).epsilon(1e-12));
    CHECK(ppt_min_eigenvalue(bell()) == doctest::Approx(-0.5));
    CHECK(ppt_min_eigenvalue(DensityMatrix::maximally_mixed(4)) == doctest::Approx(0.25));
    for (double p = 0.05; p < 1.0; p += 0.1)
      for (double theta : {0.3, 0.9, 2.2, 4.5}) {
        const double expect = std::min(pt_block_min(p, theta), 0.0);
        CHECK(std::min(ppt_min_eigenvalue(make_state({p, theta})), 0.0) == doctest::Approx(expect).epsilon(1e-12));
      }
    // General dimensions
    CHECK(ppt_min_eigenvalue(DensityMatrix::maximally_mixed(6), 2, 3) == doctest::Approx(1.0 / 6.0));
  }

  TEST_CASE("correlation matrix and Horodecki M") {
    for (double p = 0.0; p <= 1.0; p += 0.125)
      for (double theta : {0.2, pi / 6, 1.1, 3.5}) {
        const double s2 = std::sin(2 * theta);
        const auto t = correlation_matrix(make_state({p, theta}));
        CHECK(t[0][0] == doctest::Approx(p * s2));
        CHECK(t[1][1] == doctest::Approx(-p * s2));
        CHECK(t[2][2] == doctest::Approx(p));
        CHECK(std::abs(t[0][1]) + std::abs(t[0][2]) + std::abs(t[1][2]) < 1e-14);
        CHECK(horodecki_M(make_state({p, theta})) == doctest::Approx(p * p * (1 + s2 * s2)).epsilon(1e-12));
      }
    CHECK(horodecki_M(bell()) == doctest::Approx(2.0));
    CHECK(horodecki_M(DensityMatrix::maximally_mixed(4)) == doctest::Approx(0.0));
  }

  TEST_CASE("CHSH at the fixed settings") {
    for (double p : {0.0, 0.4, 0.8, 1.0})
      for (double theta : {0.3, pi / 4, 1.0}) {
        const DensityMatrix rho = make_state({p, theta});
        const double s2 = std::sin(2 * theta);
        CHECK(chsh_fixed_settings(rho) == doctest::Approx(std::sqrt(2.0) * p * (1 + s2)).epsilon(1e-12));
        // Never exceeds the optimum over settings.
        CHECK(chsh_fixed_settings(rho) <= 2 * std::sqrt(horodecki_M(rho)) + 1e-12);
      }
    CHECK(chsh_fixed_settings(bell()) == doctest::Approx(2 * std::sqrt(2.0)));
  }

  TEST_CASE("conditional assemblage") {
    // A measures z with outcome 0 on rho(p, pi/4): p|0><0|/2 + (1-p) I/4.
    for (double p : {0.2, 0.6, 1.0}) {
      const Assemblage a = conditional_assemblage(make_state({p, pi / 4}), Side::A);
      const std::vector<double> expect = {p / 2 + (1 - p) / 4, (1 - p) / 4};
      CHECK(max_abs_diff(a(Setting::Z, 0), ComplexMatrix::diagonal(expect)) < 1e-14);
    }

    for (auto side : {Side::A, Side::B})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const DensityMatrix rho = random_density_matrix(4, 4, seed);
        const Assemblage a = conditional_assemblage(rho, side);
        const ComplexMatrix reduced =
            partial_trace(rho.matrix(), 2, 2, side == Side::A ? Subsystem::B : Subsystem::A);
        for (auto n : {Setting::X, Setting::Z}) {
          CHECK(max_abs_diff(a(n, 0) + a(n, 1), reduced) < 1e-14);
          CHECK(min_eigenvalue(a(n, 0)) >= -1e-14);
          CHECK(min_eigenvalue(a(n, 1)) >= -1e-14);
        }
        CHECK(max_abs_diff(a.marginal(Setting::X), a.marginal(Setting::Z)) < 1e-14);

        // Members agree with the direct partial-trace oracle.
        const auto o = oracle::assemblage(rho.matrix(), side == Side::A);
        const std::array<ComplexMatrix, 4> members = {a(Setting::X, 0), a(Setting::X, 1), a(Setting::Z, 0),
                                                      a(Setting::Z, 1)};
        for (int m = 0; m < 4; ++m) {
          const auto c = oracle::coords(members[m]);
          CHECK(c.t == doctest::Approx(o[m].t));
          CHECK(std::hypot(c.x, c.y, c.z) == doctest::Approx(std::hypot(o[m].x, o[m].y, o[m].z)));
        }
      }

    // Product state: every member is proportional to rho_B.
    const DensityMatrix ra = random_density_matrix(2, 2, 11), rb = random_density_matrix(2, 2, 12);
    const Assemblage prod = conditional_assemblage(DensityMatrix::from_matrix(tensor_product(ra.matrix(), rb.matrix())),
                                                   Side::A);
    for (auto n : {Setting::X, Setting::Z})
      for (int k = 0; k < 2; ++k) {
        const ComplexMatrix& m = prod(n, k);
        CHECK(max_abs_diff(m, rb.matrix() * m.trace()) < 1e-14);
      }
  }

  TEST_CASE("local hidden state decompositions") {
    const Assemblage a = conditional_assemblage(make_state({0.7, 1.1}), Side::A);
    for (double t0 : {0.1, 0.2})
      for (double r : {-0.05, 0.0, 0.08}) {
        const LhsDecomposition lhs = lhs_from_free_member(a, {t0, r, 0.01, -r});
        CHECK(lhs.constraint_residual(a) < 1e-14);
      }
    // Product state: L <= 1 from the trivial decomposition tau_i = p_i rho_B.
    const DensityMatrix ra = random_density_matrix(2, 2, 3), rb = random_density_matrix(2, 2, 4);
    const DensityMatrix prod = DensityMatrix::from_matrix(tensor_product(ra.matrix(), rb.matrix()));
    CHECK(steering_radius(prod, Side::A) <= 1.0 + 1e-6);
    CHECK(steering_radius(prod, Side::B) <= 1.0 + 1e-6);
  }

  TEST_CASE("steering radius against the brute-force grid") {
    for (double p : {0.5, 0.8, 1.0}) {
      const DensityMatrix rho = make_state({p, pi / 4});
      const auto grid = oracle::brute_force_steering_radius(rho.matrix(), true);
      CHECK(grid.radius == doctest::Approx(std::sqrt(2.0) * p).epsilon(1e-9));
      const double r = steering_radius(rho, Side::A);
      CHECK(std::abs(r - grid.radius) < 1e-3);
    }
    // Off the symmetric point the optimizer must do at least as well as the grid.
    for (auto side : {Side::A, Side::B}) {
      const DensityMatrix rho = make_state({0.74, 0.6});
      const auto grid = oracle::brute_force_steering_radius(rho.matrix(), side == Side::A);
      const double r = steering_radius(rho, side);
      CHECK(r <= grid.radius + 1e-6);
      CHECK(grid.radius - r < 0.02);
    }
    CHECK(steering_radius(make_state({1.0 / std::sqrt(2.0), pi / 4}), Side::A) == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("labels") {
    CHECK(label_state(bell()) == CorrelationLabel::BellNonlocal);
    CHECK(label_state(DensityMatrix::maximally_mixed(4)) == CorrelationLabel::Separable);

    const LabelReport r = label_state_report(make_state({0.74, pi / 6}));
    CHECK(r.label == CorrelationLabel::OneWaySteerable);
    REQUIRE(r.steering.has_value());
    CHECK_FALSE(r.two_way_steerable);
    REQUIRE(r.steering_direction.has_value());
    const double forward = *r.steering_direction == Side::A ? r.steering->radius_a_to_b : r.steering->radius_b_to_a;
    const double backward = *r.steering_direction == Side::A ? r.steering->radius_b_to_a : r.steering->radius_a_to_b;
    CHECK(forward > 1.0);
    CHECK(backward <= 1.0);
  }

  TEST_CASE("labels agree with theory on a 30x30 grid") {
    int checked = 0, mismatched = 0;
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j) {
        const double p = (i + 0.5) / 30.0;
        const double theta = 0.1 + (j + 0.5) * (2 * pi - 0.2) / 30.0;
        if (distance_to_degenerate(theta) <= kDefaultExclusionHalfWidth) continue;
        const FamilyBoundaries b = family_boundaries(theta);
        if (std::abs(p - b.separable) < 0.01 || std::abs(p - b.steering) < 0.01 || std::abs(p - b.nonlocal) < 0.01)
          continue;
        ++checked;
        if (label_state(make_state({p, theta})) != theoretical_label({p, theta})) ++mismatched;
      }
    CHECK(checked > 500);
    CHECK(mismatched == 0);
  }
}
