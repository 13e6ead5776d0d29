#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psdpath/ensemble.hpp"
#include "psdpath/majorisation.hpp"
#include "psdpath/matrix.hpp"

namespace psdpath {

/// One property campaign per inequality or identity that the verifier checks.
enum class PropertyId {
  MainTheorem,           // det(Q1 + U^T Q2) <= det(Q1 + Q2)
  MainTheoremRealness,   // det(Q1 + U^T Q2) >= 0 and det(Q1^2 + |Q2 Q1|) >= 0
  DetGeoMean,            // det(I + A#B) <= det(I + A^{1/2} B^{1/2})
  LogMajoLemma,          // lambda(A#B) log-majorised by lambda(sqrt(A) sqrt(B))
  LargestEigLemma,       // lambda_1(A#B) <= lambda_1(sqrt(A) sqrt(B))
  HiaiLemma,             // A#B <= 1 implies A^r # B^r <= 1, r = 2, 3
  Monotonicity,          // B1 <= B2 implies A#B1 <= A#B2
  BlockMaximality,       // A#B is the largest X with [[A, X], [X, B]] >= 0
  ScalingIdentity,       // (aA)#(bB) = sqrt(ab) (A#B)
  CauchyBinetDet,        // det(A#B) = sqrt(det A det B) = det(sqrt(A) sqrt(B))
  SwellOrdering,         // det D_S(p) <= det D_H(p) on [0, 1]
  ExtrapolationSearch,   // both signs of det D_S(p) - det D_H(p) outside [0, 1]
  PhiIsotone,            // Schur isotony of Phi(x) = sum log(1 + exp(x_i))
  WeylCompound,          // compound-matrix eigenvalue and mean identities
  MeanSymmetry,          // A#B = B#A
  ProcrustesMinimality,  // d_S <= ||Q1 - R Q2|| for all orthogonal R, d_S <= d_C, d_H
};

std::span<const PropertyId> all_properties() noexcept;
std::string_view to_string(PropertyId id) noexcept;
std::optional<PropertyId> parse_property(std::string_view name) noexcept;

struct NamedMatrix {
  std::string name;
  Matrix value;
};

struct NamedScalar {
  std::string name;
  double value = 0.0;
};

struct NamedVector {
  std::string name;
  RealVector value;
};

/// The complete input of one trial plus the value it produced, so that
/// replay_witness can re-evaluate it from scratch.
struct Witness {
  std::string label;
  std::uint64_t trial = 0;
  std::uint64_t stream_seed = 0;  // seeds auxiliary randomness (random rotations)
  std::vector<NamedMatrix> matrices;
  std::vector<NamedScalar> scalars;
  std::vector<NamedVector> vectors;
  double value = 0.0;
  /// The sub-check that set the margin, or the error text when the trial
  /// raised instead of producing one.
  std::string note;

  const Matrix& matrix(std::string_view name) const;
  double scalar(std::string_view name) const;
  const RealVector& vector(std::string_view name) const;
};

struct VerificationReport {
  PropertyId property = PropertyId::MainTheorem;
  std::size_t dim = 0;
  RankMode rank_mode = RankMode::Full;
  std::uint64_t seed = 0;
  std::uint64_t trials_run = 0;
  std::uint64_t failures = 0;
  /// Trials whose margin fell in [-tolerance, 0): rounding noise, counted as passes.
  std::uint64_t near_misses = 0;
  double tolerance = 0.0;
  /// Minimum normalised slack over all trials; failures == 0 iff >= -tolerance.
  double worst_margin = 0.0;
  /// Extrapolation search only: differences strictly above / below zero.
  std::uint64_t positive_differences = 0;
  std::uint64_t negative_differences = 0;
  std::vector<Witness> witnesses;
  double elapsed_seconds = 0.0;

  bool passed() const noexcept { return failures == 0; }
};

struct VerifyOptions {
  unsigned threads = 1;
  std::vector<double> extrapolation_p{-1.0, -0.5, 1.5, 2.0};
  /// Test hook: checks the reversed main inequality so the failure path
  /// (non-zero failures, recorded witness, exit status 1) can be exercised.
  bool invert_main_theorem = false;
};

/// Tolerance each property is judged against.
double property_tolerance(PropertyId id) noexcept;

VerificationReport run_property(PropertyId id, const EnsembleSpec& spec,
                                const VerifyOptions& options = {});

VerificationReport verify_main_theorem(const EnsembleSpec& spec, const VerifyOptions& options = {});
VerificationReport verify_det_geomean(const EnsembleSpec& spec, const VerifyOptions& options = {});
VerificationReport verify_log_majo_lemma(const EnsembleSpec& spec,
                                         const VerifyOptions& options = {});
/// Every p must lie outside [0, 1]. Passes iff witnesses of both signs with
/// magnitude above 1e-6 are found.
VerificationReport search_extrapolation_counterexamples(const EnsembleSpec& spec,
                                                        std::span<const double> p_values,
                                                        const VerifyOptions& options = {});

std::vector<VerificationReport> run_all(const EnsembleSpec& spec,
                                        std::span<const PropertyId> properties,
                                        const VerifyOptions& options = {});

/// Re-evaluates a stored witness and returns the value it records.
double replay_witness(PropertyId id, const Witness& witness, const VerifyOptions& options = {});

/// Builds the inputs of one trial exactly as a campaign would.
Witness draw_witness(PropertyId id, const EnsembleSpec& spec, std::uint64_t trial);

bool all_passed(std::span<const VerificationReport> reports) noexcept;

}  // namespace psdpath
