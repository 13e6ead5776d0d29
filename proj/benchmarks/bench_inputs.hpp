#pragma once

#include <cstddef>
#include <cstdint>

#include "psdpath/ensemble.hpp"
#include "psdpath/matrix.hpp"

namespace psdpath::bench {

// Deterministic full-rank draw of the given dimension.
inline SymMatrix input(std::size_t dim, std::uint64_t slot) {
  EnsembleSpec spec;
  spec.dim = dim;
  spec.rank_mode = RankMode::Full;
  return draw_psd(spec, 0, slot);
}

inline SymMatrix singular_input(std::size_t dim, std::uint64_t slot) {
  EnsembleSpec spec;
  spec.dim = dim;
  spec.rank_mode = RankMode::Deficient;
  return draw_psd(spec, 0, slot);
}

}  // namespace psdpath::bench
