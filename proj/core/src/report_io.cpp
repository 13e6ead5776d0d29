#include "psdpath/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "psdpath/errors.hpp"

namespace psdpath {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormatName = "psdpath-verification-report";
constexpr int kFormatVersion = 1;

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

Json witness_to_json(const Witness& w) {
  Json j;
  j["label"] = w.label;
  j["trial"] = w.trial;
  j["stream_seed"] = w.stream_seed;
  j["value"] = number(w.value);
  Json matrices = Json::object();
  for (const auto& m : w.matrices) {
    Json entries = Json::array();
    for (double v : m.value.entries()) entries.push_back(v);
    matrices[m.name] = Json{{"dim", m.value.dim()}, {"entries", std::move(entries)}};
  }
  j["matrices"] = std::move(matrices);
  Json scalars = Json::object();
  for (const auto& s : w.scalars) scalars[s.name] = number(s.value);
  j["scalars"] = std::move(scalars);
  Json vectors = Json::object();
  for (const auto& v : w.vectors) {
    Json values = Json::array();
    for (double x : v.value) values.push_back(number(x));
    vectors[v.name] = std::move(values);
  }
  j["vectors"] = std::move(vectors);
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

Witness witness_from_json(const Json& j) {
  Witness w;
  w.label = j.at("label").get<std::string>();
  w.trial = j.at("trial").get<std::uint64_t>();
  w.stream_seed = j.at("stream_seed").get<std::uint64_t>();
  w.value = read_number(j.at("value"));
  for (const auto& [name, m] : j.at("matrices").items()) {
    const auto dim = m.at("dim").get<std::size_t>();
    std::vector<double> entries;
    for (const auto& v : m.at("entries")) entries.push_back(read_number(v));
    try {
      w.matrices.push_back({name, Matrix(dim, std::move(entries))});
    } catch (const std::invalid_argument& e) {
      throw ParseError("witness matrix '" + name + "': " + e.what());
    }
  }
  for (const auto& [name, s] : j.at("scalars").items()) w.scalars.push_back({name, read_number(s)});
  for (const auto& [name, v] : j.at("vectors").items()) {
    RealVector values;
    for (const auto& x : v) values.push_back(read_number(x));
    w.vectors.push_back({name, std::move(values)});
  }
  if (j.contains("note")) w.note = j.at("note").get<std::string>();
  return w;
}

Json report_to_json(const VerificationReport& r, const ReportWriteOptions& options) {
  Json j;
  j["property"] = std::string(to_string(r.property));
  j["dim"] = r.dim;
  j["rank_mode"] = std::string(to_string(r.rank_mode));
  j["seed"] = r.seed;
  j["trials_run"] = r.trials_run;
  j["failures"] = r.failures;
  j["near_misses"] = r.near_misses;
  j["tolerance"] = number(r.tolerance);
  j["worst_margin"] = number(r.worst_margin);
  if (r.property == PropertyId::ExtrapolationSearch) {
    j["positive_differences"] = r.positive_differences;
    j["negative_differences"] = r.negative_differences;
  }
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(witness_to_json(w));
  j["worst_case_inputs"] = std::move(witnesses);
  if (options.include_timing) j["elapsed_seconds"] = r.elapsed_seconds;
  return j;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  const auto property = j.at("property").get<std::string>();
  const auto id = parse_property(property);
  if (!id) throw ParseError("unknown property '" + property + "'");
  r.property = *id;
  r.dim = j.at("dim").get<std::size_t>();
  const auto mode_name = j.at("rank_mode").get<std::string>();
  const auto mode = parse_rank_mode(mode_name);
  if (!mode) throw ParseError("unknown rank mode '" + mode_name + "'");
  r.rank_mode = *mode;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.trials_run = j.at("trials_run").get<std::uint64_t>();
  r.failures = j.at("failures").get<std::uint64_t>();
  r.near_misses = j.at("near_misses").get<std::uint64_t>();
  r.tolerance = read_number(j.at("tolerance"));
  r.worst_margin = read_number(j.at("worst_margin"));
  r.positive_differences = j.value("positive_differences", std::uint64_t{0});
  r.negative_differences = j.value("negative_differences", std::uint64_t{0});
  for (const auto& w : j.at("worst_case_inputs")) r.witnesses.push_back(witness_from_json(w));
  r.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  return r;
}

}  // namespace

std::string_view to_string(OutputFormat format) noexcept {
  return format == OutputFormat::Json ? "json" : "csv";
}

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  return std::nullopt;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string reports_to_json(std::span<const VerificationReport> reports,
                            const ReportWriteOptions& options) {
  Json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(report_to_json(r, options));
  j["reports"] = std::move(list);
  return j.dump(2) + "\n";
}

std::vector<VerificationReport> reports_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format").get<std::string>() != kFormatName)
      throw ParseError("not a psdpath verification report");
    if (j.at("version").get<int>() != kFormatVersion)
      throw ParseError("unsupported report version");
    std::vector<VerificationReport> reports;
    for (const auto& r : j.at("reports")) reports.push_back(report_from_json(r));
    return reports;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string reports_to_csv(std::span<const VerificationReport> reports,
                           const ReportWriteOptions& options) {
  std::ostringstream out;
  out << "property,dim,rank_mode,seed,trials_run,failures,near_misses,tolerance,worst_margin,"
         "positive_differences,negative_differences";
  if (options.include_timing) out << ",elapsed_seconds";
  out << '\n';
  for (const auto& r : reports) {
    out << to_string(r.property) << ',' << r.dim << ',' << to_string(r.rank_mode) << ','
        << r.seed << ',' << r.trials_run << ',' << r.failures << ',' << r.near_misses << ','
        << format_double(r.tolerance) << ',' << format_double(r.worst_margin) << ','
        << r.positive_differences << ',' << r.negative_differences;
    if (options.include_timing) out << ',' << format_double(r.elapsed_seconds);
    out << '\n';
  }
  return out.str();
}

}  // namespace psdpath
