#include "psdpath/means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"

namespace psdpath {

void GeoMeanConfig::validate() const {
  if (!(regularisation_eps > 0.0)) throw std::invalid_argument("GeoMeanConfig: regularisation_eps must be positive");
  if (eps_ladder.empty()) throw std::invalid_argument("GeoMeanConfig: empty eps_ladder");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw std::invalid_argument("GeoMeanConfig: eps_ladder entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument("GeoMeanConfig: eps_ladder must be strictly decreasing");
  }
}

namespace {

void require_psd(const EigenDecomposition& eig, const char* which) {
  if (eig.lambda_min() < -psd_tolerance(eig.lambda_max())) {
    throw NotPsd(std::string("geometric_mean: argument ") + which + " is not PSD");
  }
}

// A#B = W W^T for A = V L V^T and B = F F^T: with C = L^{-1/2} V^T F = P S Q^T,
// (A^{-1/2} B A^{-1/2})^{1/2} = V P S P^T V^T, so W = V L^{1/2} P S^{1/2}. The
// SVD runs on C^T, whose columns carry the scaling L^{-1/2}; one-sided Jacobi
// resolves column-graded matrices to high relative accuracy, so the small
// eigenvalues of A never meet a rounded inverse.
SymMatrix mean_from_eig(const EigenDecomposition& ea, const EigenDecomposition& eb) {
  const std::size_t n = ea.eigenvectors.dim();
  const Matrix& va = ea.eigenvectors;
  const Matrix& vb = eb.eigenvectors;
  Matrix ct(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = std::sqrt(std::max(eb.eigenvalues[i], 0.0));
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += vb(k, i) * va(k, j);
      ct(i, j) = mu * s / std::sqrt(ea.eigenvalues[j]);
    }
  }
  const SingularValueDecomposition d = svd(ct);
  Matrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      g(i, k) = std::sqrt(ea.eigenvalues[i]) * d.right(i, k) * std::sqrt(d.singular_values[k]);
  return gram((va * g).transpose());
}

EigenDecomposition shifted(EigenDecomposition eig, double e) {
  for (double& v : eig.eigenvalues) v += e;
  return eig;
}

// Sets eigenvalues at or below the singularity threshold to exactly zero.
void drop_null_noise(EigenDecomposition& eig, const GeoMeanConfig& cfg) {
  const double floor = cfg.regularisation_eps * std::max(eig.lambda_max(), 0.0);
  for (double& v : eig.eigenvalues)
    if (v <= floor) v = 0.0;
}

// Projects negative eigenvalues left over from extrapolation back to zero.
SymMatrix clamp_to_cone(const SymMatrix& m) {
  const auto eig = eig_sym(m);
  if (eig.lambda_min() >= 0.0) return m;
  return matrix_function(
      eig, [](double x) { return std::max(x, 0.0); }, -std::numeric_limits<double>::infinity());
}

}  // namespace

SymMatrix geometric_mean_direct(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("geometric_mean_direct: dimensions differ");
  const auto ea = eig_sym(a);
  if (ea.lambda_min() <= psd_tolerance(ea.lambda_max()))
    throw SingularInput("geometric_mean_direct: first argument is singular");
  return mean_from_eig(ea, eig_sym(b));
}

namespace {

bool numerically_regular(const EigenDecomposition& e, const GeoMeanConfig& cfg) {
  return e.lambda_max() > 0.0 && e.lambda_min() > cfg.regularisation_eps * e.lambda_max();
}

double condition_ratio(const EigenDecomposition& e) {
  return e.lambda_max() > 0.0 ? e.lambda_min() / e.lambda_max() : 0.0;
}

// Mean of two PSD matrices given by their eigendecompositions; the regularity
// flags say which arguments may be inverted.
GeoMeanResult mean_of_decompositions(EigenDecomposition ea, EigenDecomposition eb, bool a_regular,
                                     bool b_regular, const GeoMeanConfig& cfg) {
  // A#B = B#A: invert a regular argument, the better conditioned one if both are.
  if (!a_regular || (b_regular && condition_ratio(eb) > condition_ratio(ea))) {
    std::swap(ea, eb);
    std::swap(a_regular, b_regular);
  }

  // A singular argument is treated as exactly rank-deficient, which keeps the
  // mean stable under rounding-level changes of its null eigenvalues.
  if (!a_regular) drop_null_noise(ea, cfg);
  if (!b_regular) drop_null_noise(eb, cfg);

  GeoMeanResult out;
  if (a_regular) {
    out.value = mean_from_eig(ea, eb);
    return out;
  }

  // Both arguments singular. Evaluate the ladder and extrapolate in
  // h = sqrt(e): singular means pick up odd powers of sqrt(e).
  const std::size_t n = ea.eigenvectors.dim();
  if (!(ea.lambda_max() > 0.0) || !(eb.lambda_max() > 0.0)) {
    out.value = SymMatrix(n);
    return out;
  }
  // (cA)#(B/c) = A#B: balance the arguments so one shift suits both.
  const double scale = std::sqrt(ea.lambda_max() * eb.lambda_max());
  const double balance = std::sqrt(eb.lambda_max() / ea.lambda_max());
  for (double& v : ea.eigenvalues) v *= balance;
  for (double& v : eb.eigenvalues) v /= balance;
  const std::size_t m = cfg.eps_ladder.size();
  std::vector<double> h(m);
  std::vector<SymMatrix> rungs;
  rungs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double e = cfg.eps_ladder[k] * scale;
    h[k] = std::sqrt(e);
    rungs.push_back(mean_from_eig(shifted(ea, e), shifted(eb, e)));
  }

  // Neville's scheme evaluated at h = 0, entrywise.
  std::vector<Matrix> table(rungs.begin(), rungs.end());
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t k = m - 1; k >= level; --k) {
      const double denom = h[k - level] - h[k];
      table[k] = (h[k - level] * table[k] - h[k] * table[k - 1]) * (1.0 / denom);
      if (k == level) break;
    }

  out.regularised = true;
  out.value = clamp_to_cone(SymMatrix(table[m - 1]));
  out.rung_gap = m > 1 ? frobenius_norm(rungs[m - 1] - rungs[m - 2]) : 0.0;
  out.accuracy_estimate = frobenius_norm(rungs[m - 1] - out.value);
  return out;
}

}  // namespace

GeoMeanResult geometric_mean_detailed(const SymMatrix& a, const SymMatrix& b,
                                      const GeoMeanConfig& cfg) {
  if (a.dim() != b.dim()) throw DimensionMismatch("geometric_mean: dimensions differ");
  cfg.validate();
  auto ea = eig_sym(a);
  auto eb = eig_sym(b);
  require_psd(ea, "A");
  require_psd(eb, "B");
  const bool a_regular = numerically_regular(ea, cfg);
  const bool b_regular = numerically_regular(eb, cfg);
  return mean_of_decompositions(std::move(ea), std::move(eb), a_regular, b_regular, cfg);
}

SymMatrix geometric_mean_of_powers(const SymMatrix& a, const SymMatrix& b, double r,
                                   const GeoMeanConfig& cfg) {
  if (a.dim() != b.dim()) throw DimensionMismatch("geometric_mean_of_powers: dimensions differ");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("geometric_mean_of_powers: r must be positive");
  cfg.validate();
  auto ea = eig_sym(a);
  auto eb = eig_sym(b);
  require_psd(ea, "A");
  require_psd(eb, "B");
  const bool a_regular = numerically_regular(ea, cfg);
  const bool b_regular = numerically_regular(eb, cfg);
  for (auto* e : {&ea, &eb})
    for (double& v : e->eigenvalues) v = std::pow(std::max(v, 0.0), r);
  return mean_of_decompositions(std::move(ea), std::move(eb), a_regular, b_regular, cfg).value;
}

SymMatrix geometric_mean(const SymMatrix& a, const SymMatrix& b, const GeoMeanConfig& cfg) {
  return geometric_mean_detailed(a, b, cfg).value;
}

Matrix naive_geometric_mean(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("naive_geometric_mean: dimensions differ");
  try {
    return sqrt_psd(a) * sqrt_psd(b);
  } catch (const DomainViolation& e) {
    throw NotPsd(std::string("naive_geometric_mean: ") + e.what());
  }
}

namespace {

SymMatrix block_matrix(const SymMatrix& a, const SymMatrix& b, const SymMatrix& x) {
  const std::size_t n = a.dim();
  if (b.dim() != n || x.dim() != n) throw DimensionMismatch("block matrix: dimensions differ");
  Matrix block(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      block(i, j) = a(i, j);
      block(i, n + j) = x(i, j);
      block(n + i, j) = x(i, j);
      block(n + i, n + j) = b(i, j);
    }
  return SymMatrix(block);
}

}  // namespace

double block_min_eigenvalue(const SymMatrix& a, const SymMatrix& b, const SymMatrix& x) {
  return eig_sym(block_matrix(a, b, x)).lambda_min();
}

bool check_block_maximality(const SymMatrix& a, const SymMatrix& b, const SymMatrix& x,
                            double tol) {
  return is_psd(block_matrix(a, b, x), tol);
}

bool check_hiai_power(const SymMatrix& a, const SymMatrix& b, double r, double tol) {
  if (!(r >= 1.0)) throw std::invalid_argument("check_hiai_power: r must be >= 1");
  const double hypothesis = eig_sym(geometric_mean(a, b)).lambda_max();
  if (hypothesis > 1.0 + tol) {
    throw HypothesisViolated("check_hiai_power: lambda_max(A#B) = " + std::to_string(hypothesis) +
                             " exceeds 1");
  }
  return eig_sym(geometric_mean_of_powers(a, b, r)).lambda_max() <= 1.0 + tol;
}

}  // namespace psdpath
