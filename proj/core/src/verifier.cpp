#include "psdpath/verifier.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "psdpath/errors.hpp"
#include "psdpath/geodesic.hpp"
#include "psdpath/linalg.hpp"
#include "psdpath/means.hpp"

namespace psdpath {

namespace {

constexpr std::array kProperties{
    PropertyId::MainTheorem,     PropertyId::MainTheoremRealness, PropertyId::DetGeoMean,
    PropertyId::LogMajoLemma,    PropertyId::LargestEigLemma,     PropertyId::HiaiLemma,
    PropertyId::Monotonicity,    PropertyId::BlockMaximality,     PropertyId::ScalingIdentity,
    PropertyId::CauchyBinetDet,  PropertyId::SwellOrdering,       PropertyId::ExtrapolationSearch,
    PropertyId::PhiIsotone,      PropertyId::WeylCompound,        PropertyId::MeanSymmetry,
    PropertyId::ProcrustesMinimality,
};

constexpr double kTolRel = 1e-9;
constexpr double kTolAbs = 1e-10;
constexpr double kMeanTol = 1e-8;
constexpr double kWitnessMagnitude = 1e-6;
constexpr std::uint64_t kAuxStream = 100;
constexpr int kSwellGridPoints = 21;
constexpr int kProcrustesRotations = 100;
constexpr double kFiniteDifferenceStep = 1e-6;
// Eigenvalues of a singular argument at or below this fraction of its largest
// eigenvalue count as zero, matching GeoMeanConfig::regularisation_eps.
constexpr double kSingularRatio = 1e-13;
// With a singular argument, square roots lift rounding noise of size eps to
// sqrt(eps). Spectral values below this fraction of the natural scale then
// count as zero.
constexpr double kNoiseFraction = 1e-6;
// Determinant comparisons are relative to max(|target|, this * natural scale).
constexpr double kDetFloor = 1e-6;

constexpr double kFailedTrial = std::numeric_limits<double>::lowest();

// Margin of one trial: the minimum over its sub-checks, each rescaled so that
// "sub-check passes" is equivalent to "margin >= -main tolerance".
struct Evaluation {
  double margin = std::numeric_limits<double>::infinity();
  bool inequality_bound = true;
  std::string_view binding;  // sub-check that set the margin
};

class Margins {
 public:
  explicit Margins(double main_tol) : main_tol_(main_tol) {}

  // Passes iff slack >= -tol.
  void inequality(std::string_view label, double slack, double tol) {
    add(label, slack * (main_tol_ / tol), true);
  }
  // Passes iff |deviation| <= tol.
  void equality(std::string_view label, double deviation, double tol) {
    add(label, -std::abs(deviation) * (main_tol_ / tol), false);
  }

  Evaluation result() const { return eval_; }

 private:
  void add(std::string_view label, double m, bool inequality) {
    if (std::isnan(m)) m = kFailedTrial;
    if (m < eval_.margin) eval_ = {m, inequality, label};
  }

  double main_tol_;
  Evaluation eval_;
};

SymMatrix sym(const Witness& w, std::string_view name) { return SymMatrix(w.matrix(name)); }

// Largest |det| of an n x n matrix whose Frobenius norm is at most `norm`.
double det_scale(double norm, std::size_t n) {
  return std::pow(norm / std::sqrt(static_cast<double>(n)), static_cast<double>(n));
}

// Relative deviation |a - b| / max(|b|, floor).
double relative_gap(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(b), floor, std::numeric_limits<double>::min()});
}

std::vector<double> clamped_eigenvalues(const SymMatrix& m) {
  auto ev = eigenvalues(m);
  for (double& v : ev) v = std::max(v, 0.0);
  return ev;
}

// Spectrum of sqrt(A) sqrt(B): XY and YX share their characteristic
// polynomial, so with X = B^{1/4} and Y = sqrt(A) B^{1/4} the spectrum equals
// that of the symmetric PSD matrix B^{1/4} sqrt(A) B^{1/4}.
std::vector<double> naive_mean_spectrum(const SymMatrix& a, const SymMatrix& b) {
  const SymMatrix b_quarter = power_psd(b, 0.25);
  return clamped_eigenvalues(SymMatrix(b_quarter * sqrt_psd(a) * b_quarter));
}

double product(const std::vector<double>& v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

bool singular(const SymMatrix& m) {
  const auto ev = eigenvalues(m);
  return ev.back() <= kSingularRatio * std::max(ev.front(), 0.0);
}

// Natural size of A#B: sqrt(lambda_max(A) lambda_max(B)).
double mean_scale(const SymMatrix& a, const SymMatrix& b) {
  return std::sqrt(std::max(eigenvalues(a).front(), 0.0) * std::max(eigenvalues(b).front(), 0.0));
}

// Zeroes the entries at or below `noise`.
std::vector<double> without_noise(std::vector<double> v, double noise) {
  for (double& x : v)
    if (x <= noise) x = 0.0;
  return v;
}

// Deviation of det(M)^2 from det(A) det(B). Squaring keeps the comparison
// smooth where a singular argument drives det(A) det(B) to zero.
double det_product_gap(double det_m, const SymMatrix& a, const SymMatrix& b) {
  const double target = std::max(0.0, determinant(a)) * std::max(0.0, determinant(b));
  const double scale = det_scale(frobenius_norm(a) + frobenius_norm(b), a.dim());
  return relative_gap(det_m * det_m, target, kDetFloor * scale * scale);
}

Witness pair_witness(const EnsembleSpec& spec, std::uint64_t trial, const char* first,
                     const char* second) {
  Witness w;
  w.trial = trial;
  w.matrices.push_back({first, draw_psd(spec, trial, 0)});
  w.matrices.push_back({second, draw_psd(spec, trial, 1)});
  Rng aux = make_rng(spec.seed, trial, kAuxStream);
  w.stream_seed = aux();
  return w;
}

// ---------------------------------------------------------------------------
// Main theorem

struct TheoremTerms {
  double lhs;             // det(Q1 + U^T Q2)
  double rhs;             // det(Q1 + Q2)
  double scale;           // determinant scale of Q1, Q2
  double verbatim;        // det(Q1^2 + |Q2 Q1|)
  double verbatim_scale;
  double identity_gap;    // det(Q1 + U^T Q2) det(Q1) - det(Q1^2 + |Q2 Q1|)
  double identity_scale;
};

TheoremTerms theorem_terms(const SymMatrix& d1, const SymMatrix& d2) {
  const std::size_t n = d1.dim();
  const SymMatrix q1 = sqrt_psd(d1);
  const SymMatrix q2 = sqrt_psd(d2);
  const PolarDecomposition pd = polar_limit(q2 * q1, q1 + q2);
  const Matrix ut = pd.orthogonal.transpose();

  TheoremTerms t{};
  t.lhs = determinant(q1 + ut * q2);
  t.rhs = determinant(q1 + q2);
  t.scale = det_scale(frobenius_norm(q1) + frobenius_norm(q2), n);
  const Matrix q1_sq = q1 * q1;
  t.verbatim = determinant(q1_sq + pd.modulus);
  t.verbatim_scale = det_scale(frobenius_norm(q1_sq) + frobenius_norm(pd.modulus), n);
  t.identity_gap = t.lhs * determinant(q1) - t.verbatim;
  t.identity_scale = t.scale * det_scale(frobenius_norm(q1), n) + t.verbatim_scale;
  return t;
}

Evaluation eval_main_theorem(const Witness& w, const VerifyOptions& options) {
  const auto t = theorem_terms(sym(w, "D1"), sym(w, "D2"));
  Margins m(kTolRel);
  // lhs <= rhs (1 + tol_rel) + tol_abs scale
  const double denom = std::abs(t.rhs) + (kTolAbs / kTolRel) * t.scale;
  const double slack = options.invert_main_theorem ? t.lhs - t.rhs : t.rhs - t.lhs;
  m.inequality("det ordering", slack / denom, kTolRel);
  return m.result();
}

Evaluation eval_main_realness(const Witness& w, const VerifyOptions&) {
  const auto t = theorem_terms(sym(w, "D1"), sym(w, "D2"));
  Margins m(kTolAbs);
  m.inequality("lhs non-negative", t.lhs / t.scale, kTolAbs);
  m.inequality("verbatim det non-negative", t.verbatim / t.verbatim_scale, kTolAbs);
  m.equality("product identity", t.identity_gap / t.identity_scale, kTolRel);
  return m.result();
}

// ---------------------------------------------------------------------------
// Geometric-mean inequalities

Witness draw_det_geomean(const EnsembleSpec& spec, std::uint64_t trial) {
  Witness w = pair_witness(spec, trial, "A", "B");
  // A simultaneously diagonalisable pair sharing the spectra of A and B.
  // Rank-deficient spectra keep exact zeros, so the basis is then a random
  // permutation rather than a rotation that would smear rounding into them.
  Rng aux = make_rng(spec.seed, trial, kAuxStream + 1);
  const bool deficient = is_rank_deficient(spec.rank_mode, trial, 0) ||
                         is_rank_deficient(spec.rank_mode, trial, 1);
  Matrix v = random_orthogonal(aux, spec.dim);
  auto a = clamped_eigenvalues(sym(w, "A"));
  auto b = clamped_eigenvalues(sym(w, "B"));
  if (deficient) {
    std::vector<std::size_t> order(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), aux);
    v = Matrix(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) v(order[i], i) = 1.0;
    a = without_noise(std::move(a), kSingularRatio * a.front());
    b = without_noise(std::move(b), kSingularRatio * b.front());
  }
  w.matrices.push_back({"A_commuting", v * Matrix::diagonal(a) * v.transpose()});
  w.matrices.push_back({"B_commuting", v * Matrix::diagonal(b) * v.transpose()});
  return w;
}

Evaluation eval_det_geomean(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  const std::size_t n = a.dim();
  const Matrix id = Matrix::identity(n);
  Margins m(kTolRel);

  const SymMatrix g = geometric_mean(a, b);
  const double lhs = determinant(id + g);
  const double rhs = determinant(id + naive_geometric_mean(a, b));
  m.inequality("det inequality", (rhs - lhs) / std::abs(rhs), kTolRel);

  // trace log(I + A#B) <= trace log(I + sqrt(A) sqrt(B)), via spectra.
  double tl_lhs = 0.0, tl_rhs = 0.0;
  for (double x : clamped_eigenvalues(g)) tl_lhs += std::log1p(x);
  for (double x : naive_mean_spectrum(a, b)) tl_rhs += std::log1p(x);
  m.inequality("trace-log inequality", tl_rhs - tl_lhs, kMeanTol);
  m.equality("trace-log vs det (mean)", std::log(lhs) - tl_lhs, kMeanTol);
  m.equality("trace-log vs det (product)", std::log(rhs) - tl_rhs, kMeanTol);

  // Commuting inputs: both sides coincide.
  const SymMatrix ac = sym(w, "A_commuting");
  const SymMatrix bc = sym(w, "B_commuting");
  const double c_lhs = determinant(id + geometric_mean(ac, bc));
  const double c_rhs = determinant(id + naive_geometric_mean(ac, bc));
  m.equality("commuting equality", (c_rhs - c_lhs) / std::abs(c_rhs), kTolRel);
  return m.result();
}

Evaluation eval_log_majo(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  auto mean_spectrum = clamped_eigenvalues(geometric_mean(a, b));
  auto naive_spectrum = naive_mean_spectrum(a, b);
  if (singular(a) || singular(b)) {
    const double noise = kNoiseFraction * mean_scale(a, b);
    mean_spectrum = without_noise(std::move(mean_spectrum), noise);
    naive_spectrum = without_noise(std::move(naive_spectrum), noise);
  }
  Margins m(kMeanTol);
  const auto verdict = log_majorises(naive_spectrum, mean_spectrum, kMeanTol, false);
  m.inequality("log-majorisation", verdict.worst_margin, kMeanTol);
  // k = 1 on its own: largest eigenvalues.
  m.inequality("largest eigenvalue", (naive_spectrum.front() - mean_spectrum.front()) /
                   std::max(naive_spectrum.front(), std::numeric_limits<double>::min()),
               kTolRel);

  // Both total products equal sqrt(det A det B).
  m.equality("mean product vs det", det_product_gap(product(mean_spectrum), a, b), kMeanTol);
  m.equality("root product vs det", det_product_gap(product(naive_spectrum), a, b), kMeanTol);
  return m.result();
}

Evaluation eval_largest_eig(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  const double mean_top = eig_sym(geometric_mean(a, b)).lambda_max();
  const double naive_top = naive_mean_spectrum(a, b).front();
  Margins m(kTolRel);
  m.inequality("largest eigenvalue", (naive_top - mean_top) / std::max(naive_top, std::numeric_limits<double>::min()),
               kTolRel);
  return m.result();
}

Evaluation eval_hiai(const Witness& w, const VerifyOptions&) {
  SymMatrix a = sym(w, "A");
  SymMatrix b = sym(w, "B");
  Margins m(kMeanTol);
  const double top = eig_sym(geometric_mean(a, b)).lambda_max();
  const double scale = mean_scale(a, b);
  if (!(top > kNoiseFraction * scale)) {
    // A#B = 0 admits no rescaling; then A^r#B^r = 0 as well.
    for (double r : {2.0, 3.0}) {
      const double powered = eig_sym(geometric_mean_of_powers(a, b, r)).lambda_max();
      m.inequality("null power mean", -powered / std::pow(scale, r), kMeanTol);
    }
    return m.result();
  }
  // (cA)#(cB) = c (A#B): rescale so that A#B <= 1 holds with equality.
  a *= 1.0 / top;
  b *= 1.0 / top;
  m.equality("rescaled hypothesis", eig_sym(geometric_mean(a, b)).lambda_max() - 1.0, kMeanTol);
  for (double r : {2.0, 3.0}) {
    const double powered = eig_sym(geometric_mean_of_powers(a, b, r)).lambda_max();
    m.inequality("power bound", 1.0 - powered, kMeanTol);
  }
  return m.result();
}

Witness draw_monotonicity(const EnsembleSpec& spec, std::uint64_t trial) {
  Witness w = pair_witness(spec, trial, "A", "B1");
  w.matrices.push_back({"increment", draw_psd(spec, trial, 2)});
  return w;
}

Evaluation eval_monotonicity(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b1 = sym(w, "B1");
  const SymMatrix b2 = b1 + sym(w, "increment");
  const SymMatrix upper = geometric_mean(a, b2);
  const SymMatrix lower = geometric_mean(a, b1);
  Margins m(kMeanTol);
  m.inequality("Loewner order", eig_sym(upper - lower).lambda_min() / (1.0 + frobenius_norm(upper)), kMeanTol);
  return m.result();
}

Evaluation eval_block_maximality(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  const SymMatrix x = geometric_mean(a, b);
  const double scale = std::max({1.0, eig_sym(a).lambda_max(), eig_sym(b).lambda_max()}) * 2.0;
  Margins m(kTolRel);
  // [[A, A#B], [A#B, B]] is PSD ...
  m.inequality("block PSD", block_min_eigenvalue(a, b, x) / scale, kTolRel);
  // ... and pushing X up by delta I breaks it.
  const double bump = 0.01 * std::max(eig_sym(x).lambda_max(), mean_scale(a, b));
  if (bump > 0.0) {
    const SymMatrix bumped = x + bump * SymMatrix::identity(a.dim());
    m.inequality("bumped block rejected", -block_min_eigenvalue(a, b, bumped) / scale - 2.0 * kTolRel, kTolRel);
  }
  return m.result();
}

Witness draw_scaling(const EnsembleSpec& spec, std::uint64_t trial) {
  Witness w = pair_witness(spec, trial, "A", "B");
  Rng aux = make_rng(spec.seed, trial, kAuxStream + 1);
  w.scalars.push_back({"a", log_uniform(aux, 0.1, 10.0)});
  w.scalars.push_back({"b", log_uniform(aux, 0.1, 10.0)});
  return w;
}

Evaluation eval_scaling(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  const double sa = w.scalar("a");
  const double sb = w.scalar("b");
  const SymMatrix scaled = geometric_mean(sa * a, sb * b);
  const SymMatrix expected = std::sqrt(sa * sb) * geometric_mean(a, b);
  Margins m(kMeanTol);
  const double size = std::max({1.0, frobenius_norm(expected), mean_scale(sa * a, sb * b)});
  m.equality("scaling identity", frobenius_norm(scaled - expected) / size, kMeanTol);
  return m.result();
}

Witness draw_cauchy_binet(const EnsembleSpec& spec, std::uint64_t trial) {
  Witness w = pair_witness(spec, trial, "A", "B");
  // Well-conditioned general matrices: orthogonal * diag([0.5, 2]) * orthogonal.
  Rng aux = make_rng(spec.seed, trial, kAuxStream + 1);
  std::uniform_real_distribution<double> sv(0.5, 2.0);
  for (const char* name : {"X", "Y"}) {
    std::vector<double> s(spec.dim);
    for (double& v : s) v = sv(aux);
    const Matrix left = random_orthogonal(aux, spec.dim);
    const Matrix right = random_orthogonal(aux, spec.dim);
    w.matrices.push_back({name, left * Matrix::diagonal(s) * right});
  }
  return w;
}

Evaluation eval_cauchy_binet(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  Margins m(kMeanTol);
  m.equality("det of mean", det_product_gap(determinant(geometric_mean(a, b)), a, b), kMeanTol);
  m.equality("det of root product", det_product_gap(determinant(naive_geometric_mean(a, b)), a, b), kMeanTol);
  const Matrix& x = w.matrix("X");
  const Matrix& y = w.matrix("Y");
  const double dx = determinant(x);
  const double dy = determinant(y);
  m.equality("det multiplicativity", relative_gap(determinant(x * y), dx * dy, 0.0), kTolRel);
  return m.result();
}

Evaluation eval_mean_symmetry(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  SymMatrix ab, ba;
  // The verbatim formula inverts its first argument, so the two orders take
  // genuinely different numerical routes. Singular inputs fall back to the
  // regularised mean.
  try {
    ab = geometric_mean_direct(a, b);
    ba = geometric_mean_direct(b, a);
  } catch (const SingularInput&) {
    ab = geometric_mean(a, b);
    ba = geometric_mean(b, a);
  }
  Margins m(kMeanTol);
  m.equality("symmetry", frobenius_norm(ab - ba) / (1.0 + frobenius_norm(ab)), kMeanTol);
  return m.result();
}

// ---------------------------------------------------------------------------
// Paths and distances

Evaluation eval_swell(const Witness& w, const VerifyOptions&) {
  const SymMatrix d1 = sym(w, "D1");
  const SymMatrix d2 = sym(w, "D2");
  const Geodesic procrustes({MetricKind::Procrustes, d1, d2});
  const Geodesic root({MetricKind::EuclideanRoot, d1, d2});
  const double norm = frobenius_norm(sqrt_psd(d1)) + frobenius_norm(sqrt_psd(d2));
  const double scale = std::pow(det_scale(norm, d1.dim()), 2.0);
  Margins m(kTolRel);
  for (int k = 0; k < kSwellGridPoints; ++k) {
    const double p = static_cast<double>(k) / (kSwellGridPoints - 1);
    const double ds = determinant(procrustes.at(p));
    const double dh = determinant(root.at(p));
    m.inequality("det ordering", (dh - ds) / (std::abs(dh) + (kTolAbs / kTolRel) * scale), kTolRel);
  }
  return m.result();
}

double extrapolation_difference(const SymMatrix& d1, const SymMatrix& d2, double p) {
  const Geodesic procrustes({MetricKind::Procrustes, d1, d2});
  const Geodesic root({MetricKind::EuclideanRoot, d1, d2});
  return determinant(procrustes.at(p)) - determinant(root.at(p));
}

Evaluation eval_procrustes(const Witness& w, const VerifyOptions&) {
  const SymMatrix d1 = sym(w, "D1");
  const SymMatrix d2 = sym(w, "D2");
  const SymMatrix q1 = sqrt_psd(d1);
  const SymMatrix q2 = sqrt_psd(d2);
  const double d_s = distance(MetricKind::Procrustes, d1, d2);
  Margins m(kTolAbs);
  m.inequality("d_S <= d_C", distance(MetricKind::Cholesky, d1, d2) - d_s, kTolAbs);
  m.inequality("d_S <= d_H", distance(MetricKind::EuclideanRoot, d1, d2) - d_s, kTolAbs);

  const Matrix product21 = q2 * q1;
  const double trace_sum = trace(q1 * q1) + trace(q2 * q2);
  Rng rng = make_rng(w.stream_seed, 0, 0);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kProcrustesRotations; ++i) {
    const Matrix r = random_orthogonal(rng, d1.dim());
    const double dist = frobenius_norm(q1 - r * q2);
    best = std::min(best, dist);
    // ||Q1 - R Q2||^2 = tr(Q1^2 + Q2^2) - 2 tr(R Q2 Q1)
    const double expanded = trace_sum - 2.0 * trace(r * product21);
    m.equality("trace expansion", (dist * dist - expanded) / std::max(trace_sum, 1e-300), kTolAbs);
  }
  m.inequality("d_S <= sampled rotations", best - d_s, kTolAbs);
  return m.result();
}

// ---------------------------------------------------------------------------
// Majorisation and compounds

Witness draw_phi(const EnsembleSpec& spec, std::uint64_t trial) {
  Witness w;
  w.trial = trial;
  Rng rng = make_rng(spec.seed, trial, 0);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, spec.dim - 1);
  RealVector x(spec.dim), z(spec.dim);
  for (double& v : x) v = normal(rng);
  for (double& v : z) v = normal(rng);
  // T-transforms (pinches) keep y majorised by x.
  RealVector y = x;
  for (std::size_t step = 0; step < 2 * spec.dim; ++step) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (i == j) j = (j + 1) % spec.dim;
    const double t = unit(rng);
    const double yi = y[i];
    const double yj = y[j];
    y[i] = t * yi + (1.0 - t) * yj;
    y[j] = t * yj + (1.0 - t) * yi;
  }
  w.vectors.push_back({"x", x});
  w.vectors.push_back({"y", y});
  w.vectors.push_back({"z", z});
  w.stream_seed = rng();
  return w;
}

Evaluation eval_phi(const Witness& w, const VerifyOptions&) {
  const RealVector& x = w.vector("x");
  const RealVector& y = w.vector("y");
  const RealVector& z = w.vector("z");
  Margins m(kTolAbs);
  m.inequality("pinch majorisation", majorises(x, y).worst_margin, kMajorisationTolerance);
  const double phi_x = phi_isotone(x);
  m.inequality("Phi isotone", phi_x - phi_isotone(y), kTolAbs);

  // Permutation invariance.
  RealVector reversed(x.rbegin(), x.rend());
  m.equality("permutation invariance", (phi_isotone(reversed) - phi_x) / (1.0 + std::abs(phi_x)), 1e-12);

  // Schur's condition (z_i - z_j)(dPhi_i - dPhi_j) >= 0, and the gradient
  // against a central difference of Phi along e_i (Phi is separable, so the
  // difference only involves the i-th summand).
  const RealVector g = phi_gradient(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j)
      m.inequality("Schur condition", (z[i] - z[j]) * (g[i] - g[j]), kTolAbs);
    const double hi[1] = {z[i] + kFiniteDifferenceStep};
    const double lo[1] = {z[i] - kFiniteDifferenceStep};
    const double fd = (phi_isotone(hi) - phi_isotone(lo)) / (2.0 * kFiniteDifferenceStep);
    m.equality("finite-difference gradient", (g[i] - fd) / g[i], 1e-6);
  }
  return m.result();
}

Evaluation eval_weyl(const Witness& w, const VerifyOptions&) {
  const SymMatrix a = sym(w, "A");
  const SymMatrix b = sym(w, "B");
  const std::size_t n = a.dim();
  const auto spectrum = clamped_eigenvalues(a);
  const SymMatrix mean = geometric_mean(a, b);
  const Matrix ab = a * b;
  constexpr double tol = 1e-7;
  Margins m(tol);
  for (std::size_t k = 1; k <= n; ++k) {
    const SymMatrix ak(compound_matrix(a, k));
    const SymMatrix bk(compound_matrix(b, k));
    double top_k = 1.0;
    for (std::size_t i = 0; i < k; ++i) top_k *= spectrum[i];
    const double lambda1 = eig_sym(ak).lambda_max();
    const double floor = kNoiseFraction * std::pow(std::max(spectrum.front(), 0.0), static_cast<double>(k));
    m.equality("compound top eigenvalue", relative_gap(lambda1, top_k, floor), tol);

    const SymMatrix mean_k(compound_matrix(mean, k));
    const SymMatrix compound_mean = geometric_mean(ak, bk);
    m.equality("compound mean", frobenius_norm(mean_k - compound_mean) / (1.0 + frobenius_norm(mean_k)), tol);

    const Matrix ab_k = compound_matrix(ab, k);
    m.equality("compound functoriality", frobenius_norm(ab_k - ak * bk) / (1.0 + frobenius_norm(ak) * frobenius_norm(bk)),
               kMeanTol);
  }
  return m.result();
}

// ---------------------------------------------------------------------------
// Campaign plumbing

using DrawFn = Witness (*)(const EnsembleSpec&, std::uint64_t);
using EvalFn = Evaluation (*)(const Witness&, const VerifyOptions&);

Witness draw_d_pair(const EnsembleSpec& spec, std::uint64_t trial) {
  return pair_witness(spec, trial, "D1", "D2");
}

Witness draw_ab_pair(const EnsembleSpec& spec, std::uint64_t trial) {
  return pair_witness(spec, trial, "A", "B");
}

struct PropertyTable {
  DrawFn draw;
  EvalFn eval;
  double tolerance;
};

PropertyTable table_for(PropertyId id) {
  switch (id) {
    case PropertyId::MainTheorem: return {draw_d_pair, eval_main_theorem, kTolRel};
    case PropertyId::MainTheoremRealness: return {draw_d_pair, eval_main_realness, kTolAbs};
    case PropertyId::DetGeoMean: return {draw_det_geomean, eval_det_geomean, kTolRel};
    case PropertyId::LogMajoLemma: return {draw_ab_pair, eval_log_majo, kMeanTol};
    case PropertyId::LargestEigLemma: return {draw_ab_pair, eval_largest_eig, kTolRel};
    case PropertyId::HiaiLemma: return {draw_ab_pair, eval_hiai, kMeanTol};
    case PropertyId::Monotonicity: return {draw_monotonicity, eval_monotonicity, kMeanTol};
    case PropertyId::BlockMaximality: return {draw_ab_pair, eval_block_maximality, kTolRel};
    case PropertyId::ScalingIdentity: return {draw_scaling, eval_scaling, kMeanTol};
    case PropertyId::CauchyBinetDet: return {draw_cauchy_binet, eval_cauchy_binet, kMeanTol};
    case PropertyId::SwellOrdering: return {draw_d_pair, eval_swell, kTolRel};
    case PropertyId::ExtrapolationSearch: return {draw_d_pair, nullptr, 0.0};
    case PropertyId::PhiIsotone: return {draw_phi, eval_phi, kTolAbs};
    case PropertyId::WeylCompound: return {draw_ab_pair, eval_weyl, 1e-7};
    case PropertyId::MeanSymmetry: return {draw_ab_pair, eval_mean_symmetry, kMeanTol};
    case PropertyId::ProcrustesMinimality: return {draw_d_pair, eval_procrustes, kTolAbs};
  }
  throw std::invalid_argument("unknown property");
}

Evaluation evaluate_guarded(EvalFn eval, Witness& w, const VerifyOptions& options) {
  try {
    return eval(w, options);
  } catch (const Error& e) {
    w.note = e.what();
    return {kFailedTrial, false, {}};
  }
}

// Splits [0, trials) into contiguous chunks, one per worker, and returns the
// per-chunk results in chunk order so merging is schedule-independent.
template <typename Partial, typename Work>
std::vector<Partial> run_chunked(std::uint64_t trials, unsigned threads, Work work) {
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, trials);
  std::vector<Partial> partials(workers);
  const std::uint64_t chunk = (trials + workers - 1) / workers;
  if (workers == 1) {
    partials[0] = work(0, trials);
    return partials;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::uint64_t t = 0; t < workers; ++t) {
    const std::uint64_t begin = std::min(trials, t * chunk);
    const std::uint64_t end = std::min(trials, begin + chunk);
    pool.emplace_back([&partials, &work, t, begin, end] { partials[t] = work(begin, end); });
  }
  pool.clear();  // joins
  return partials;
}

struct CampaignPartial {
  std::uint64_t failures = 0;
  std::uint64_t near_misses = 0;
  std::optional<Witness> worst;
};

VerificationReport base_report(PropertyId id, const EnsembleSpec& spec, double tolerance) {
  VerificationReport r;
  r.property = id;
  r.dim = spec.dim;
  r.rank_mode = spec.rank_mode;
  r.seed = spec.seed;
  r.trials_run = spec.trials;
  r.tolerance = tolerance;
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

VerificationReport run_campaign(PropertyId id, const EnsembleSpec& spec,
                                const VerifyOptions& options) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const PropertyTable table = table_for(id);
  const double tol = table.tolerance;

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    CampaignPartial part;
    for (std::uint64_t t = begin; t < end; ++t) {
      Witness w = table.draw(spec, t);
      const Evaluation e = evaluate_guarded(table.eval, w, options);
      w.value = e.margin;
      if (!e.binding.empty()) w.note = e.binding;
      if (e.margin < -tol) {
        ++part.failures;
      } else if (e.margin < 0.0 && e.inequality_bound) {
        ++part.near_misses;
      }
      if (!part.worst || e.margin < part.worst->value) part.worst = std::move(w);
    }
    return part;
  };

  VerificationReport report = base_report(id, spec, tol);
  std::optional<Witness> worst;
  for (auto& part : run_chunked<CampaignPartial>(spec.trials, options.threads, work)) {
    report.failures += part.failures;
    report.near_misses += part.near_misses;
    if (part.worst && (!worst || part.worst->value < worst->value)) worst = std::move(part.worst);
  }
  worst->label = "worst";
  report.worst_margin = worst->value;
  report.witnesses.push_back(std::move(*worst));
  report.elapsed_seconds = seconds_since(start);
  return report;
}

struct SearchPartial {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
  std::optional<Witness> most_positive;
  std::optional<Witness> most_negative;
};

}  // namespace

// ---------------------------------------------------------------------------
// Public API

std::span<const PropertyId> all_properties() noexcept { return kProperties; }

std::string_view to_string(PropertyId id) noexcept {
  switch (id) {
    case PropertyId::MainTheorem: return "MainTheorem";
    case PropertyId::MainTheoremRealness: return "MainTheoremRealness";
    case PropertyId::DetGeoMean: return "DetGeoMean";
    case PropertyId::LogMajoLemma: return "LogMajoLemma";
    case PropertyId::LargestEigLemma: return "LargestEigLemma";
    case PropertyId::HiaiLemma: return "HiaiLemma";
    case PropertyId::Monotonicity: return "Monotonicity";
    case PropertyId::BlockMaximality: return "BlockMaximality";
    case PropertyId::ScalingIdentity: return "ScalingIdentity";
    case PropertyId::CauchyBinetDet: return "CauchyBinetDet";
    case PropertyId::SwellOrdering: return "SwellOrdering";
    case PropertyId::ExtrapolationSearch: return "ExtrapolationSearch";
    case PropertyId::PhiIsotone: return "PhiIsotone";
    case PropertyId::WeylCompound: return "WeylCompound";
    case PropertyId::MeanSymmetry: return "MeanSymmetry";
    case PropertyId::ProcrustesMinimality: return "ProcrustesMinimality";
  }
  return "Unknown";
}

std::optional<PropertyId> parse_property(std::string_view name) noexcept {
  for (PropertyId id : kProperties)
    if (to_string(id) == name) return id;
  return std::nullopt;
}

const Matrix& Witness::matrix(std::string_view name) const {
  for (const auto& m : matrices)
    if (m.name == name) return m.value;
  throw std::out_of_range("witness has no matrix named " + std::string(name));
}

double Witness::scalar(std::string_view name) const {
  for (const auto& s : scalars)
    if (s.name == name) return s.value;
  throw std::out_of_range("witness has no scalar named " + std::string(name));
}

const RealVector& Witness::vector(std::string_view name) const {
  for (const auto& v : vectors)
    if (v.name == name) return v.value;
  throw std::out_of_range("witness has no vector named " + std::string(name));
}

double property_tolerance(PropertyId id) noexcept {
  try {
    return table_for(id).tolerance;
  } catch (...) {
    return 0.0;
  }
}

Witness draw_witness(PropertyId id, const EnsembleSpec& spec, std::uint64_t trial) {
  return table_for(id).draw(spec, trial);
}

VerificationReport run_property(PropertyId id, const EnsembleSpec& spec,
                                const VerifyOptions& options) {
  if (id == PropertyId::ExtrapolationSearch)
    return search_extrapolation_counterexamples(spec, options.extrapolation_p, options);
  return run_campaign(id, spec, options);
}

VerificationReport verify_main_theorem(const EnsembleSpec& spec, const VerifyOptions& options) {
  return run_campaign(PropertyId::MainTheorem, spec, options);
}

VerificationReport verify_det_geomean(const EnsembleSpec& spec, const VerifyOptions& options) {
  return run_campaign(PropertyId::DetGeoMean, spec, options);
}

VerificationReport verify_log_majo_lemma(const EnsembleSpec& spec, const VerifyOptions& options) {
  return run_campaign(PropertyId::LogMajoLemma, spec, options);
}

VerificationReport search_extrapolation_counterexamples(const EnsembleSpec& spec,
                                                        std::span<const double> p_values,
                                                        const VerifyOptions& options) {
  spec.validate();
  if (p_values.empty()) throw std::invalid_argument("extrapolation search: no p values");
  for (double p : p_values)
    if (!(p < 0.0 || p > 1.0) || !std::isfinite(p))
      throw std::invalid_argument("extrapolation search: p values must lie outside [0, 1]");
  const auto start = std::chrono::steady_clock::now();

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    SearchPartial part;
    for (std::uint64_t t = begin; t < end; ++t) {
      const Witness base = draw_d_pair(spec, t);
      const SymMatrix d1 = sym(base, "D1");
      const SymMatrix d2 = sym(base, "D2");
      const Geodesic procrustes({MetricKind::Procrustes, d1, d2});
      const Geodesic root({MetricKind::EuclideanRoot, d1, d2});
      for (double p : p_values) {
        const double ds = determinant(procrustes.at(p));
        const double dh = determinant(root.at(p));
        const double diff = ds - dh;
        const double noise = kTolRel * (std::abs(ds) + std::abs(dh));
        if (diff > noise) ++part.positive;
        if (diff < -noise) ++part.negative;
        auto keep = [&](std::optional<Witness>& slot, bool better) {
          if (!better) return;
          Witness w = base;
          w.scalars.push_back({"p", p});
          w.value = diff;
          slot = std::move(w);
        };
        keep(part.most_positive, diff > 0.0 && (!part.most_positive || diff > part.most_positive->value));
        keep(part.most_negative, diff < 0.0 && (!part.most_negative || diff < part.most_negative->value));
      }
    }
    return part;
  };

  VerificationReport report = base_report(PropertyId::ExtrapolationSearch, spec, 0.0);
  std::optional<Witness> pos, neg;
  for (auto& part : run_chunked<SearchPartial>(spec.trials, options.threads, work)) {
    report.positive_differences += part.positive;
    report.negative_differences += part.negative;
    if (part.most_positive && (!pos || part.most_positive->value > pos->value))
      pos = std::move(part.most_positive);
    if (part.most_negative && (!neg || part.most_negative->value < neg->value))
      neg = std::move(part.most_negative);
  }
  const double best_pos = pos ? pos->value : 0.0;
  const double best_neg = neg ? -neg->value : 0.0;
  report.failures = (best_pos > kWitnessMagnitude ? 0 : 1) + (best_neg > kWitnessMagnitude ? 0 : 1);
  report.worst_margin = std::min(best_pos, best_neg) - kWitnessMagnitude;
  if (pos) {
    pos->label = "positive";
    report.witnesses.push_back(std::move(*pos));
  }
  if (neg) {
    neg->label = "negative";
    report.witnesses.push_back(std::move(*neg));
  }
  report.elapsed_seconds = seconds_since(start);
  return report;
}

std::vector<VerificationReport> run_all(const EnsembleSpec& spec,
                                        std::span<const PropertyId> properties,
                                        const VerifyOptions& options) {
  if (properties.empty()) throw std::invalid_argument("run_all: no properties requested");
  std::vector<VerificationReport> reports;
  reports.reserve(properties.size());
  for (PropertyId id : properties) reports.push_back(run_property(id, spec, options));
  return reports;
}

double replay_witness(PropertyId id, const Witness& witness, const VerifyOptions& options) {
  if (id == PropertyId::ExtrapolationSearch) {
    return extrapolation_difference(sym(witness, "D1"), sym(witness, "D2"), witness.scalar("p"));
  }
  Witness copy = witness;
  return evaluate_guarded(table_for(id).eval, copy, options).margin;
}

bool all_passed(std::span<const VerificationReport> reports) noexcept {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.passed(); });
}

}  // namespace psdpath
