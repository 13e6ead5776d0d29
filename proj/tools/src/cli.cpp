#include "psdpath_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "psdpath/errors.hpp"
#include "psdpath/geodesic.hpp"
#include "psdpath/report_io.hpp"
#include "psdpath/tensor_field.hpp"
#include "psdpath/verifier.hpp"

namespace psdpath::cli {

namespace {

// Swelling flags Procrustes above EuclideanRoot only beyond this relative gap.
constexpr double kSwellTolerance = 1e-9;
constexpr double kSwellAbsTolerance = 1e-10;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOutput {
  std::string format = "json";
  std::string out_path;
};

struct CampaignFlags {
  std::size_t dim = 3;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 42;
  std::string rank_mode = "full";
  unsigned threads = 1;
};

OutputFormat output_format(const CommonOutput& o) {
  const auto f = parse_output_format(o.format);
  if (!f) throw UsageError("unknown --format '" + o.format + "' (expected json or csv)");
  return *f;
}

MetricKind metric_kind(const std::string& name) {
  const auto m = parse_metric_kind(name);
  if (!m) {
    throw UsageError("unknown --metric '" + name +
                     "' (expected euclidean, cholesky, euclidean-root, procrustes, riemannian)");
  }
  return *m;
}

EnsembleSpec ensemble(const CampaignFlags& f) {
  const auto mode = parse_rank_mode(f.rank_mode);
  if (!mode) throw UsageError("unknown --rank-mode '" + f.rank_mode + "'");
  EnsembleSpec spec;
  spec.dim = f.dim;
  spec.trials = f.trials;
  spec.seed = f.seed;
  spec.rank_mode = *mode;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

void emit(const std::string& text, const CommonOutput& o, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
  } else {
    write_text_file(o.out_path, text);
  }
}

void add_output_flags(CLI::App* cmd, CommonOutput& o) {
  cmd->add_option("--format", o.format, "Output format: json or csv")->capture_default_str();
  cmd->add_option("--out", o.out_path, "Output file (default: standard output)");
}

void add_campaign_flags(CLI::App* cmd, CampaignFlags& f) {
  cmd->add_option("--dim", f.dim, "Matrix dimension, 2 to 8")->capture_default_str();
  cmd->add_option("--trials", f.trials, "Random trials per property")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Ensemble seed")->capture_default_str();
  cmd->add_option("--rank-mode", f.rank_mode, "full, deficient or mixed")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
}

std::string tensor_csv(const SymMatrix& t) {
  std::string s = "xx,xy,xz,yy,yz,zz\n";
  const auto c = to_components(t);
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format_double(c[i]);
  return s + "\n";
}

std::string report_text(const std::vector<VerificationReport>& reports, OutputFormat format) {
  return format == OutputFormat::Json ? reports_to_json(reports) : reports_to_csv(reports);
}

void summarise(const std::vector<VerificationReport>& reports, std::ostream& err) {
  for (const auto& r : reports) {
    err << to_string(r.property) << ": trials=" << r.trials_run << " failures=" << r.failures
        << " near_misses=" << r.near_misses << " worst_margin=" << format_double(r.worst_margin);
    if (r.property == PropertyId::ExtrapolationSearch) {
      err << " positive=" << r.positive_differences << " negative=" << r.negative_differences;
    }
    err << (r.passed() ? " PASS" : " FAIL") << '\n';
  }
}

int run_swelling(const std::string& a_path, const std::string& b_path,
                 const std::vector<std::string>& metric_names, std::size_t steps,
                 const CommonOutput& o, std::ostream& out, std::ostream& err) {
  if (steps < 2) throw UsageError("--steps must be at least 2");
  std::vector<MetricKind> metrics;
  for (const auto& name : metric_names) metrics.push_back(metric_kind(name));
  if (metrics.empty()) metrics = {MetricKind::EuclideanRoot, MetricKind::Procrustes};
  const OutputFormat format = output_format(o);
  const SymMatrix a = load_tensor(a_path);
  const SymMatrix b = load_tensor(b_path);

  std::vector<std::vector<SwellingSample>> columns;
  for (MetricKind m : metrics) columns.push_back(swelling_profile({m, a, b}, steps));

  // Compare Procrustes against EuclideanRoot when both are present.
  std::vector<double> flagged;
  const auto find = [&](MetricKind m) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < metrics.size(); ++i)
      if (metrics[i] == m) return i;
    return std::nullopt;
  };
  const auto root = find(MetricKind::EuclideanRoot);
  const auto procrustes = find(MetricKind::Procrustes);
  if (root && procrustes) {
    const double n = static_cast<double>(a.dim());
    const double scale = std::pow(std::max(det_root(a), det_root(b)), n);
    for (std::size_t k = 0; k < steps; ++k) {
      const double dh = std::pow(columns[*root][k].det_root, n);
      const double ds = std::pow(columns[*procrustes][k].det_root, n);
      if (ds - dh > kSwellTolerance * dh + kSwellAbsTolerance * scale)
        flagged.push_back(columns[*root][k].p);
    }
  }

  std::ostringstream text;
  if (format == OutputFormat::Csv) {
    text << 'p';
    for (MetricKind m : metrics) text << ',' << to_string(m);
    text << '\n';
    for (std::size_t k = 0; k < steps; ++k) {
      text << format_double(columns[0][k].p);
      for (const auto& col : columns) text << ',' << format_double(col[k].det_root);
      text << '\n';
    }
    if (root && procrustes) {
      if (flagged.empty()) {
        text << "# procrustes <= euclidean-root at every p in [0, 1]\n";
      } else {
        text << "# procrustes exceeds euclidean-root at p =";
        for (double p : flagged) text << ' ' << format_double(p);
        text << '\n';
      }
    }
  } else {
    nlohmann::ordered_json j;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (MetricKind m : metrics) names.push_back(std::string(to_string(m)));
    j["metrics"] = names;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < steps; ++k) {
      nlohmann::ordered_json row;
      row["p"] = columns[0][k].p;
      for (std::size_t i = 0; i < metrics.size(); ++i)
        row[std::string(to_string(metrics[i]))] = columns[i][k].det_root;
      rows.push_back(row);
    }
    j["rows"] = rows;
    if (root && procrustes) j["procrustes_exceeds_root_at"] = flagged;
    text << j.dump(2) << '\n';
  }
  emit(text.str(), o, out);
  if (!flagged.empty()) err << "warning: swelling ordering violated at " << flagged.size()
                            << " sample(s)\n";
  return kSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor interpolation paths, geometric means and their verification."};
  app.name("psdpath");
  app.require_subcommand(1);

  // interp
  std::string interp_a, interp_b, interp_metric = "procrustes";
  double interp_p = 0.5;
  CommonOutput interp_out;
  auto* interp = app.add_subcommand("interp", "Path point between two tensors");
  interp->add_option("a", interp_a, "Tensor file for D1 (the path's value at p = 1)")->required();
  interp->add_option("b", interp_b, "Tensor file for D2 (the path's value at p = 0)")->required();
  interp->add_option("--metric", interp_metric, "Path metric")->capture_default_str();
  interp->add_option("--p", interp_p, "Path parameter (any real)")->capture_default_str();
  add_output_flags(interp, interp_out);

  // upsample
  std::string up_in, up_metric = "procrustes";
  std::size_t up_factor = 2;
  unsigned up_threads = 1;
  CommonOutput up_out;
  auto* upsample = app.add_subcommand("upsample", "Refine a tensor field along x, y and z");
  upsample->add_option("input", up_in, "Field file")->required();
  upsample->add_option("--metric", up_metric, "Path metric")->capture_default_str();
  upsample->add_option("--factor", up_factor, "Upsampling factor, at least 2")
      ->capture_default_str();
  upsample->add_option("--threads", up_threads, "Worker threads")->capture_default_str();
  add_output_flags(upsample, up_out);

  // swelling
  std::string sw_a, sw_b;
  std::vector<std::string> sw_metrics;
  std::size_t sw_steps = 11;
  CommonOutput sw_out;
  sw_out.format = "csv";
  auto* swelling = app.add_subcommand("swelling", "det(D(p))^(1/3) along paths on [0, 1]");
  swelling->add_option("a", sw_a, "Tensor file for D1")->required();
  swelling->add_option("b", sw_b, "Tensor file for D2")->required();
  swelling->add_option("--metric", sw_metrics,
                       "Path metric, repeatable (default: euclidean-root and procrustes)");
  swelling->add_option("--steps", sw_steps, "Number of p samples, at least 2")
      ->capture_default_str();
  add_output_flags(swelling, sw_out);

  // verify
  CampaignFlags v_flags;
  std::vector<std::string> v_properties;
  std::vector<double> v_p;
  bool v_invert = false;
  CommonOutput v_out;
  auto* verify = app.add_subcommand("verify", "Run property campaigns");
  add_campaign_flags(verify, v_flags);
  verify->add_option("--property", v_properties, "Property to run, repeatable (default: all)");
  verify->add_option("--p", v_p, "Extrapolation p values, repeatable");
  verify->add_flag("--self-test-invert", v_invert)->group("");
  add_output_flags(verify, v_out);

  // search-extrapolation
  CampaignFlags s_flags;
  std::vector<double> s_p;
  CommonOutput s_out;
  auto* search = app.add_subcommand(
      "search-extrapolation", "Look for both signs of det D_S(p) - det D_H(p) outside [0, 1]");
  add_campaign_flags(search, s_flags);
  search->add_option("--p", s_p, "p values outside [0, 1], repeatable (default: -1 -0.5 1.5 2)");
  add_output_flags(search, s_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (interp->parsed()) {
      const MetricKind metric = metric_kind(interp_metric);
      const OutputFormat format = output_format(interp_out);
      if (!std::isfinite(interp_p)) throw UsageError("--p must be finite");
      const SymMatrix a = load_tensor(interp_a);
      const SymMatrix b = load_tensor(interp_b);
      const SymMatrix d = path_point({metric, a, b}, interp_p);
      emit(format == OutputFormat::Json ? serialize_tensor(d) : tensor_csv(d), interp_out, out);
      return kSuccess;
    }
    if (upsample->parsed()) {
      const MetricKind metric = metric_kind(up_metric);
      const OutputFormat format = output_format(up_out);
      if (up_factor < 2) throw UsageError("--factor must be at least 2");
      const TensorField field = upsample_field(load_field(up_in), metric, up_factor, up_threads);
      emit(format == OutputFormat::Json ? serialize_field(field) : field_to_csv(field), up_out,
           out);
      return kSuccess;
    }
    if (swelling->parsed()) return run_swelling(sw_a, sw_b, sw_metrics, sw_steps, sw_out, out, err);
    if (verify->parsed()) {
      const EnsembleSpec spec = ensemble(v_flags);
      const OutputFormat format = output_format(v_out);
      std::vector<PropertyId> ids;
      for (const auto& name : v_properties) {
        const auto id = parse_property(name);
        if (!id) throw UsageError("unknown --property '" + name + "'");
        ids.push_back(*id);
      }
      if (ids.empty()) ids.assign(all_properties().begin(), all_properties().end());
      VerifyOptions options;
      options.threads = v_flags.threads;
      options.invert_main_theorem = v_invert;
      if (!v_p.empty()) options.extrapolation_p = v_p;
      const auto reports = run_all(spec, ids, options);
      emit(report_text(reports, format), v_out, out);
      summarise(reports, err);
      return all_passed(reports) ? kSuccess : kPropertyViolation;
    }
    if (search->parsed()) {
      const EnsembleSpec spec = ensemble(s_flags);
      const OutputFormat format = output_format(s_out);
      VerifyOptions options;
      options.threads = s_flags.threads;
      if (!s_p.empty()) options.extrapolation_p = s_p;
      const std::vector<VerificationReport> reports{
          search_extrapolation_counterexamples(spec, options.extrapolation_p, options)};
      emit(report_text(reports, format), s_out, out);
      summarise(reports, err);
      return all_passed(reports) ? kSuccess : kPropertyViolation;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace psdpath::cli
