#include "qcorr/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qcorr/seeding.hpp"

namespace qcorr {

namespace {

constexpr std::array<Polarization, 12> kAllPolarizations{
    Polarization::H,  Polarization::V,      Polarization::D,   Polarization::R,
    Polarization::A0, Polarization::A0Perp, Polarization::A0p, Polarization::A0pPerp,
    Polarization::B0, Polarization::B0Perp, Polarization::B0p, Polarization::B0pPerp};

// Linear polarization at angle phi and its orthogonal partner.
std::vector<Complex> linear(double phi) { return {std::cos(phi), std::sin(phi)}; }
std::vector<Complex> linear_perp(double phi) { return {-std::sin(phi), std::cos(phi)}; }

constexpr double kA0pAngle = -std::numbers::pi / 4.0;
constexpr double kB0Angle = -std::numbers::pi / 8.0;
constexpr double kB0pAngle = std::numbers::pi / 8.0;

}  // namespace

std::string_view polarization_name(Polarization pol) {
  switch (pol) {
    case Polarization::H: return "H";
    case Polarization::V: return "V";
    case Polarization::D: return "D";
    case Polarization::R: return "R";
    case Polarization::A0: return "A0";
    case Polarization::A0Perp: return "A0~";
    case Polarization::A0p: return "A0'";
    case Polarization::A0pPerp: return "A0'~";
    case Polarization::B0: return "B0";
    case Polarization::B0Perp: return "B0~";
    case Polarization::B0p: return "B0'";
    case Polarization::B0pPerp: return "B0'~";
  }
  return "?";
}

std::vector<Complex> polarization_ket(Polarization pol) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (pol) {
    case Polarization::H: return {1.0, 0.0};
    case Polarization::V: return {0.0, 1.0};
    case Polarization::D: return {h, h};
    case Polarization::R: return {h, Complex(0.0, -h)};
    case Polarization::A0: return {1.0, 0.0};
    case Polarization::A0Perp: return {0.0, 1.0};
    case Polarization::A0p: return linear(kA0pAngle);
    case Polarization::A0pPerp: return linear_perp(kA0pAngle);
    case Polarization::B0: return linear(kB0Angle);
    case Polarization::B0Perp: return linear_perp(kB0Angle);
    case Polarization::B0p: return linear(kB0pAngle);
    case Polarization::B0pPerp: return linear_perp(kB0pAngle);
  }
  throw std::invalid_argument("unknown polarization");
}

ComplexMatrix build_projector(Polarization a, Polarization b) {
  const auto ka = polarization_ket(a), kb = polarization_ket(b);
  std::vector<Complex> pair;
  for (const auto& x : ka)
    for (const auto& y : kb) pair.push_back(x * y);
  return ComplexMatrix::projector(pair);
}

std::string projector_name(Polarization a, Polarization b) {
  return std::string(polarization_name(a)) + std::string(polarization_name(b));
}

ComplexMatrix build_projector(std::string_view pair_name) {
  // Greedy longest-prefix tokenization into exactly two labels.
  auto take = [](std::string_view& text) -> Polarization {
    Polarization best{};
    std::size_t best_len = 0;
    for (Polarization pol : kAllPolarizations) {
      const auto name = polarization_name(pol);
      if (name.size() > best_len && text.substr(0, name.size()) == name) {
        best = pol;
        best_len = name.size();
      }
    }
    if (best_len == 0) throw std::invalid_argument("unknown polarization label in projector name");
    text.remove_prefix(best_len);
    return best;
  };
  std::string_view rest = pair_name;
  const Polarization a = take(rest);
  const Polarization b = take(rest);
  if (!rest.empty()) throw std::invalid_argument("projector name has trailing characters");
  return build_projector(a, b);
}

namespace {

ProjectorSet make_set(std::initializer_list<std::pair<Polarization, Polarization>> pairs) {
  ProjectorSet set;
  for (const auto& [a, b] : pairs) {
    set.names.push_back(projector_name(a, b));
    set.projectors.push_back(build_projector(a, b));
  }
  return set;
}

}  // namespace

const ProjectorSet& tomography_projectors() {
  using P = Polarization;
  static const ProjectorSet set = make_set({
      {P::H, P::H}, {P::H, P::V}, {P::H, P::R}, {P::H, P::D}, {P::V, P::D}, {P::V, P::R},
      {P::V, P::H}, {P::V, P::V}, {P::R, P::V}, {P::R, P::H}, {P::R, P::R}, {P::R, P::D},
      {P::D, P::D}, {P::D, P::R}, {P::D, P::H}, {P::D, P::V},
  });
  return set;
}

const ProjectorSet& feature_projectors() {
  using P = Polarization;
  static const ProjectorSet set = make_set({
      {P::A0, P::B0p}, {P::A0Perp, P::B0p}, {P::A0, P::B0pPerp}, {P::A0Perp, P::B0pPerp},
      {P::A0p, P::B0}, {P::A0pPerp, P::B0}, {P::A0p, P::B0Perp}, {P::A0pPerp, P::B0Perp},
  });
  return set;
}

std::string_view noise_name(NoiseModel noise) {
  return noise == NoiseModel::Poisson ? "poisson" : "none";
}

NoiseModel parse_noise(std::string_view text) {
  if (text == "poisson") return NoiseModel::Poisson;
  if (text == "none") return NoiseModel::None;
  throw std::invalid_argument("unknown noise model: " + std::string(text));
}

std::int64_t CountRecord::count(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return counts.at(i);
  throw std::invalid_argument("CountRecord: no counts for projector " + std::string(name));
}

nlohmann::json count_record_to_json(const CountRecord& record) {
  return {{"names", record.names}, {"counts", record.counts}, {"n0", record.n0}};
}

CountRecord count_record_from_json(const nlohmann::json& j) {
  CountRecord record{j.at("names").get<std::vector<std::string>>(), j.at("counts").get<std::vector<std::int64_t>>(),
                     j.at("n0").get<std::int64_t>()};
  if (record.names.size() != record.counts.size())
    throw std::invalid_argument("count record: names and counts differ in length");
  if (record.n0 <= 0) throw std::invalid_argument("count record: n0 must be positive");
  for (auto c : record.counts)
    if (c < 0) throw std::invalid_argument("count record: negative count");
  return record;
}

CountRecord simulate_counts(const DensityMatrix& rho, const ProjectorSet& set, std::int64_t n0,
                            std::uint64_t seed, NoiseModel noise) {
  if (n0 <= 0) throw std::invalid_argument("simulate_counts: n0 must be positive");
  std::mt19937_64 rng(derive_seed(seed, "photon-counts"));
  CountRecord record{set.names, {}, n0};
  record.counts.reserve(set.projectors.size());
  for (const auto& proj : set.projectors) {
    const double prob = std::max(0.0, trace_of_product(rho.matrix(), proj).real());
    const double mean = static_cast<double>(n0) * prob;
    std::int64_t n = 0;
    if (noise == NoiseModel::None) {
      n = std::llround(mean);
    } else if (mean > 0.0) {
      n = std::poisson_distribution<std::int64_t>(mean)(rng);
    }
    record.counts.push_back(n);
  }
  return record;
}

namespace {

double ratio_estimator(const CountRecord& c, std::string_view same1, std::string_view same2,
                       std::string_view diff1, std::string_view diff2) {
  const double plus = static_cast<double>(c.count(same1) + c.count(same2));
  const double minus = static_cast<double>(c.count(diff1) + c.count(diff2));
  if (plus + minus <= 0.0) throw InsufficientCounts("feature estimator has no counts");
  return (plus - minus) / (plus + minus);
}

}  // namespace

FeatureVector features_from_counts(const CountRecord& counts) {
  return {ratio_estimator(counts, "A0B0'", "A0~B0'~", "A0~B0'", "A0B0'~"),
          ratio_estimator(counts, "A0'B0", "A0'~B0~", "A0'~B0", "A0'B0~")};
}

FeatureVector features_exact(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("features_exact: expected a two-qubit state");
  const ComplexMatrix id = ComplexMatrix::identity(2);
  auto observable = [&](Polarization pol) {
    return ComplexMatrix::projector(polarization_ket(pol)) * Complex(2.0) - id;
  };
  const ComplexMatrix o1 = tensor_product(observable(Polarization::A0), observable(Polarization::B0p));
  const ComplexMatrix o2 = tensor_product(observable(Polarization::A0p), observable(Polarization::B0));
  return {trace_of_product(rho.matrix(), o1).real(), trace_of_product(rho.matrix(), o2).real()};
}

namespace {

// Two-qubit Pauli products sigma_i (x) sigma_j, i, j in {I, x, y, z}.
const std::array<ComplexMatrix, 16>& pauli_products() {
  static const std::array<ComplexMatrix, 16> basis = [] {
    const std::array<ComplexMatrix, 4> single{ComplexMatrix::identity(2), pauli_x(), pauli_y(),
                                              pauli_z()};
    std::array<ComplexMatrix, 16> out;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[4 * i + j] = tensor_product(single[i], single[j]);
    return out;
  }();
  return basis;
}

struct DesignInverse {
  std::array<std::array<double, 16>, 16> inverse{};
  double min_pivot = 0.0;
};

// rho = sum_k x_k P_k / 4, so Tr(rho Pi_i) = sum_k A_ik x_k with A_ik = Tr(P_k Pi_i) / 4.
const DesignInverse& design_inverse() {
  static const DesignInverse inv = [] {
    constexpr int n = 16;
    const auto& set = tomography_projectors();
    std::array<std::array<double, 2 * n>, n> aug{};
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k)
        aug[i][k] = 0.25 * trace_of_product(pauli_products()[k], set.projectors[i]).real();
      aug[i][n + i] = 1.0;
    }
    DesignInverse out;
    out.min_pivot = std::numeric_limits<double>::infinity();
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
      std::swap(aug[piv], aug[col]);
      const double pivot = aug[col][col];
      out.min_pivot = std::min(out.min_pivot, std::abs(pivot));
      if (std::abs(pivot) < 1e-12) throw std::logic_error("tomography design matrix is singular");
      for (auto& v : aug[col]) v /= pivot;
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = aug[r][col];
        if (f == 0.0) continue;
        for (int c = 0; c < 2 * n; ++c) aug[r][c] -= f * aug[col][c];
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.inverse[i][j] = aug[i][n + j];
    return out;
  }();
  return inv;
}

}  // namespace

double tomography_design_min_pivot() { return design_inverse().min_pivot; }

ComplexMatrix tomography_linear_estimate(const CountRecord& counts) {
  if (counts.n0 <= 0) throw std::invalid_argument("tomography: n0 must be positive");
  const auto& set = tomography_projectors();
  std::array<double, 16> probs{};
  for (int i = 0; i < 16; ++i)
    probs[i] = static_cast<double>(counts.count(set.names[i])) / static_cast<double>(counts.n0);
  const auto& inv = design_inverse().inverse;
  ComplexMatrix rho(4, 4);
  for (int k = 0; k < 16; ++k) {
    double x = 0.0;
    for (int i = 0; i < 16; ++i) x += inv[k][i] * probs[i];
    rho += pauli_products()[k] * Complex(0.25 * x);
  }
  return rho;
}

DensityMatrix tomography_reconstruct(const CountRecord& counts) {
  return nearest_density_matrix(tomography_linear_estimate(counts));
}

}  // namespace qcorr
