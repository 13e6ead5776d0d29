#include "psdpath/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace psdpath {

std::string_view to_string(RankMode mode) noexcept {
  switch (mode) {
    case RankMode::Full: return "full";
    case RankMode::Deficient: return "deficient";
    case RankMode::Mixed: return "mixed";
  }
  return "unknown";
}

std::optional<RankMode> parse_rank_mode(std::string_view name) noexcept {
  for (auto mode : {RankMode::Full, RankMode::Deficient, RankMode::Mixed})
    if (to_string(mode) == name) return mode;
  return std::nullopt;
}

void EnsembleSpec::validate() const {
  if (dim < 2 || dim > 8) throw std::invalid_argument("EnsembleSpec: dim must lie in [2, 8]");
  if (trials == 0) throw std::invalid_argument("EnsembleSpec: trials must be positive");
  if (!(scale_lo > 0.0) || !(scale_lo < scale_hi) || !std::isfinite(scale_hi))
    throw std::invalid_argument("EnsembleSpec: scale range must satisfy 0 < lo < hi");
}

Rng make_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

bool is_rank_deficient(RankMode mode, std::uint64_t index, unsigned slot) noexcept {
  switch (mode) {
    case RankMode::Full: return false;
    case RankMode::Deficient: return true;
    case RankMode::Mixed: return slot < 2 && (((index % 4) >> slot) & 1u) != 0;
  }
  return false;
}

Matrix gaussian_matrix(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim);
  for (double& v : g.entries()) v = normal(rng);
  return g;
}

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

SymMatrix draw_psd(const EnsembleSpec& spec, std::uint64_t index, unsigned slot) {
  Rng rng = make_rng(spec.seed, index, slot);
  const std::size_t n = spec.dim;
  Matrix g = gaussian_matrix(rng, n);
  const double s = log_uniform(rng, spec.scale_lo, spec.scale_hi);
  if (is_rank_deficient(spec.rank_mode, index, slot)) {
    const std::size_t zeroed = (n + 1) / 2;
    for (std::size_t c = n - zeroed; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) g(r, c) = 0.0;
  }
  SymMatrix d = gram(g.transpose());  // G G^T
  d *= s / static_cast<double>(n);
  return d;
}

SymMatrix generate_psd(const EnsembleSpec& spec, std::uint64_t index) {
  return draw_psd(spec, index, 0);
}

Matrix random_orthogonal(Rng& rng, std::size_t dim) {
  Matrix q = gaussian_matrix(rng, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t prev = 0; prev < c; ++prev) {
        double dot = 0.0;
        for (std::size_t r = 0; r < dim; ++r) dot += q(r, prev) * q(r, c);
        for (std::size_t r = 0; r < dim; ++r) q(r, c) -= dot * q(r, prev);
      }
    double norm = 0.0;
    for (std::size_t r = 0; r < dim; ++r) norm += q(r, c) * q(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < dim; ++r) q(r, c) /= norm;
  }
  return q;
}

}  // namespace psdpath
