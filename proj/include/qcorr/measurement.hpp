// Photonic measurement layer: polarization projectors, simulated
// coincidence counts, the two count-ratio features, and linear-inversion
// tomography from the 16 standard projectors.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcorr/linalg.hpp"

namespace qcorr {

/// Single-photon polarization states. `~` in a name marks the orthogonal
/// complement, `'` the primed setting.
enum class Polarization {
  H, V, D, R,
  A0, A0Perp, A0p, A0pPerp,
  B0, B0Perp, B0p, B0pPerp,
};

std::string_view polarization_name(Polarization pol);
/// Normalized ket in the {H, V} basis.
std::vector<Complex> polarization_ket(Polarization pol);

/// Rank-1 projector |a b><a b| on the photon pair.
ComplexMatrix build_projector(Polarization a, Polarization b);
/// Parses concatenated names such as "HD", "A0B0'" or "A0'~B0~".
ComplexMatrix build_projector(std::string_view pair_name);
std::string projector_name(Polarization a, Polarization b);

struct ProjectorSet {
  std::vector<std::string> names;
  std::vector<ComplexMatrix> projectors;
};

/// The 16 tomography projectors, in table order (HH, HV, HR, HD, ...).
const ProjectorSet& tomography_projectors();
/// The 8 projectors behind the two features.
const ProjectorSet& feature_projectors();

enum class NoiseModel { Poisson, None };
std::string_view noise_name(NoiseModel noise);
NoiseModel parse_noise(std::string_view text);

inline constexpr std::int64_t kDefaultPairsPerSetting = 60000;

struct CountRecord {
  std::vector<std::string> names;
  std::vector<std::int64_t> counts;
  std::int64_t n0 = kDefaultPairsPerSetting;

  /// Throws std::out_of_range for an unknown projector name.
  std::int64_t count(std::string_view name) const;
};

/// {names: [...], counts: [...], n0: int}
nlohmann::json count_record_to_json(const CountRecord& record);
/// Throws std::invalid_argument on misaligned or negative counts.
CountRecord count_record_from_json(const nlohmann::json& j);

/// Counts with mean n0 Tr(rho Pi) per projector: Poisson draws, or the
/// rounded mean for NoiseModel::None. Deterministic for a given seed.
CountRecord simulate_counts(const DensityMatrix& rho, const ProjectorSet& set, std::int64_t n0,
                            std::uint64_t seed, NoiseModel noise);

struct FeatureVector {
  double f1 = 0.0;  // <a0 b0'>
  double f2 = 0.0;  // <a0' b0>
};

/// Raised when every count entering a ratio estimator is zero.
class InsufficientCounts : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FeatureVector features_from_counts(const CountRecord& counts);
FeatureVector features_exact(const DensityMatrix& rho);

/// Smallest pivot met while inverting the tomography design matrix; zero
/// would mean the projectors do not span the Hermitian operators.
double tomography_design_min_pivot();

/// Linear inversion of p_i = N_i / n0, then nearest_density_matrix.
DensityMatrix tomography_reconstruct(const CountRecord& counts);
/// The unprojected linear-inversion estimate (Hermitian, possibly indefinite).
ComplexMatrix tomography_linear_estimate(const CountRecord& counts);

}  // namespace qcorr
