#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "psdpath/matrix.hpp"

namespace psdpath {

enum class RankMode { Full, Deficient, Mixed };

std::string_view to_string(RankMode mode) noexcept;
std::optional<RankMode> parse_rank_mode(std::string_view name) noexcept;

/// Random PSD instance family. Every draw is a pure function of
/// (seed, index, slot), so campaigns are reproducible and order-independent.
struct EnsembleSpec {
  std::size_t dim = 3;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 42;
  RankMode rank_mode = RankMode::Full;
  double scale_lo = 0.1;
  double scale_hi = 10.0;

  /// Throws std::invalid_argument: dim must lie in [2, 8], trials > 0, 0 < lo < hi.
  void validate() const;
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, index, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// Mixed mode cycles through (full, full), (deficient, full), (full,
/// deficient), (deficient, deficient) for slots 0 and 1 as index runs 0..3.
bool is_rank_deficient(RankMode mode, std::uint64_t index, unsigned slot) noexcept;

/// s G G^T / dim with G standard normal and s log-uniform in the scale range.
/// Rank-deficient draws zero the last ceil(dim/2) columns of G first.
SymMatrix draw_psd(const EnsembleSpec& spec, std::uint64_t index, unsigned slot);

/// The single-matrix view of the ensemble: draw_psd(spec, index, 0).
SymMatrix generate_psd(const EnsembleSpec& spec, std::uint64_t index);

Matrix gaussian_matrix(Rng& rng, std::size_t dim);

/// Haar-distributed orthogonal matrix (Gram-Schmidt QR of a Gaussian matrix
/// with the sign of R's diagonal absorbed).
Matrix random_orthogonal(Rng& rng, std::size_t dim);

double log_uniform(Rng& rng, double lo, double hi);

}  // namespace psdpath
