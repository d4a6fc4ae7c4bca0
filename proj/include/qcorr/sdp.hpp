// Separability test from the first level of the symmetric-extension
// hierarchy: look for a state on A (x) B (x) A, symmetric in the two A
// copies, that reduces to rho and stays PSD under both partial transposes.
// Solved as a feasibility problem by cyclic projections (optionally with
// Dykstra corrections) under Anderson acceleration.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qcorr/linalg.hpp"

namespace qcorr {

/// d^2 Hermitian matrices with Tr(s_i s_j) = alpha delta_ij and element 0 = I.
struct OperatorBasis {
  std::size_t dim = 0;
  double alpha = 0.0;
  std::vector<ComplexMatrix> elements;
};

/// Identity followed by generalized Gell-Mann matrices scaled to Tr(s^2) = d
/// (symmetric, antisymmetric, then diagonal). d = 2 gives {I, X, Y, Z}.
OperatorBasis build_hermitian_basis(std::size_t d);

/// c_ij = alpha^-2 Tr[rho s_i (x) s_j], row-major over (i, j).
std::vector<double> basis_coefficients(const ComplexMatrix& rho, const OperatorBasis& a,
                                       const OperatorBasis& b);
ComplexMatrix basis_expand(std::span<const double> coefficients, const OperatorBasis& a,
                           const OperatorBasis& b);

/// Transpose of one factor of a tripartite operator on d0 (x) d1 (x) d2.
ComplexMatrix partial_transpose3(const ComplexMatrix& x, std::size_t d0, std::size_t d1, std::size_t d2,
                                 int factor);
/// Trace over the last factor of A (x) B (x) A.
ComplexMatrix trace_out_copy(const ComplexMatrix& x, std::size_t dim_a, std::size_t dim_b);
/// Exchange of the two A factors: (W X W).
ComplexMatrix swap_copies(const ComplexMatrix& x, std::size_t dim_a, std::size_t dim_b);

/// Orthogonal (Frobenius) projection of a Hermitian operator on A B A onto the
/// affine set {swap-symmetric, Tr_C X = rho}.
ComplexMatrix project_extension_affine(const ComplexMatrix& z, const ComplexMatrix& rho,
                                       std::size_t dim_a, std::size_t dim_b);
/// Raises every eigenvalue below `floor` to `floor`; floor = 0 is the PSD projection.
ComplexMatrix project_psd(const ComplexMatrix& h, double floor = 0.0);

enum class FeasibilityStatus { Feasible, Infeasible, Undecided };
std::string_view status_name(FeasibilityStatus status);

struct FeasibilityConfig {
  int max_iter = 500;
  double tol = 1e-7;
  int stall_window = 50;
  double stall_improvement = 1e-6;
  /// Return Infeasible straight away when rho itself fails PPT.
  bool ppt_short_circuit = true;
  /// The cones are shifted to {X >= m I} with m = margin_fraction * lambda / d_a,
  /// lambda the smaller of the minimum eigenvalues of rho and its partial
  /// transpose, so iterates are pulled into the interior.
  double margin_fraction = 0.5;
  /// Dykstra increments per cone; off gives plain cyclic projections.
  bool dykstra = false;
  /// Past sweeps mixed by Anderson acceleration; 0 disables it.
  int anderson_memory = 5;
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Undecided;
  /// Largest negative eigenvalue magnitude over the three PSD conditions.
  double residual = 0.0;
  int iterations = 0;
  std::optional<ComplexMatrix> extension;
};

inline constexpr std::size_t kMaxExtensionWeight = 100;

/// Throws std::invalid_argument when d_a^2 d_b exceeds kMaxExtensionWeight
/// or rho does not match the dimensions.
FeasibilityResult symmetric_extension_feasibility(const DensityMatrix& rho, std::size_t dim_a,
                                                  std::size_t dim_b, const FeasibilityConfig& config = {});

enum class SdpVerdict { Entangled, SeparableConsistent, Undecided };
std::string_view verdict_name(SdpVerdict verdict);

struct SdpClassification {
  SdpVerdict verdict = SdpVerdict::Undecided;
  double ppt_min_eig = 0.0;
  FeasibilityResult feasibility;
};

/// PPT first; only PPT states reach the extension search.
SdpClassification classify_sdp(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                               int iter_budget = 500);

/// G G^dag / Tr(G G^dag) with G a d x rank matrix of standard complex Gaussians.
DensityMatrix random_density_matrix(std::size_t d, std::size_t rank, std::uint64_t seed);

}  // namespace qcorr
