#include "psdpath/tensor_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"
#include "psdpath/report_io.hpp"

namespace psdpath {

namespace {

using Json = nlohmann::json;

constexpr std::size_t kTensorDim = 3;
constexpr std::size_t kMaxListedVoxels = 10;

std::string voxel_name(std::size_t x, std::size_t y, std::size_t z) {
  return "(" + std::to_string(x) + ", " + std::to_string(y) + ", " + std::to_string(z) + ")";
}

std::string voxel_name(const TensorField& field, std::size_t flat) {
  const std::size_t x = flat % field.dims[0];
  const std::size_t y = (flat / field.dims[0]) % field.dims[1];
  const std::size_t z = flat / (field.dims[0] * field.dims[1]);
  return voxel_name(x, y, z);
}

std::array<double, 6> read_components(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 6)
    throw ParseError(where + ": a tensor must be an array of 6 numbers");
  std::array<double, 6> c{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (!j[i].is_number()) throw ParseError(where + ": tensor components must be numbers");
    c[i] = j[i].get<double>();
    if (!std::isfinite(c[i])) throw ValidationError(where + ": non-finite tensor component");
  }
  return c;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::string components_line(const SymMatrix& t) {
  std::string line = "[";
  const auto c = to_components(t);
  for (std::size_t i = 0; i < 6; ++i) {
    if (i) line += ", ";
    line += Json(c[i]).dump();
  }
  return line + "]";
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  if (dynamic_cast<const NotPsd*>(&e)) throw NotPsd(msg);
  if (dynamic_cast<const SingularInput*>(&e)) throw SingularInput(msg);
  if (dynamic_cast<const DomainViolation*>(&e)) throw DomainViolation(msg);
  if (dynamic_cast<const NonConvergence*>(&e)) throw NonConvergence(msg);
  throw Error(msg);
}

// Runs body(i) for i in [0, count), split into contiguous chunks per thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w * chunk; i < std::min(count, (w + 1) * chunk); ++i) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// One upsampling pass along `axis`.
TensorField upsample_axis(const TensorField& in, std::size_t axis, MetricKind metric,
                          std::size_t factor, unsigned threads) {
  TensorField out;
  out.dims = in.dims;
  out.spacing = in.spacing;
  const std::size_t n = in.dims[axis];
  out.dims[axis] = factor * (n - 1) + 1;
  out.spacing[axis] = in.spacing[axis] / static_cast<double>(factor);
  out.tensors.resize(out.voxel_count());

  const std::size_t lines = in.voxel_count() / n;
  auto coords = [&](std::size_t line, std::size_t pos, const TensorField& f) {
    // The two coordinates other than `axis`, in x-fastest order.
    std::array<std::size_t, 3> c{};
    std::size_t rest = line;
    for (std::size_t a = 0; a < 3; ++a) {
      if (a == axis) continue;
      c[a] = rest % f.dims[a];
      rest /= f.dims[a];
    }
    c[axis] = pos;
    return c;
  };

  parallel_for(lines, threads, [&](std::size_t line) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = coords(line, i, in);
      const auto dst = coords(line, i * factor, out);
      const SymMatrix& a = in.at(src[0], src[1], src[2]);
      out.tensors[out.index(dst[0], dst[1], dst[2])] = a;
      if (i + 1 == n) break;
      const auto next = coords(line, i + 1, in);
      const SymMatrix& b = in.at(next[0], next[1], next[2]);
      try {
        const Geodesic path({metric, a, b});
        for (std::size_t k = 1; k < factor; ++k) {
          const double t = static_cast<double>(k) / static_cast<double>(factor);
          const auto d = coords(line, i * factor + k, out);
          out.tensors[out.index(d[0], d[1], d[2])] = path.at(1.0 - t);
        }
      } catch (const Error& e) {
        rethrow_with_context(e, "between voxels " + voxel_name(src[0], src[1], src[2]) + " and " +
                                    voxel_name(next[0], next[1], next[2]));
      }
    }
  });
  return out;
}

}  // namespace

void TensorField::validate() const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw ValidationError("dims must be positive");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw ValidationError("spacing must be positive and finite");
  }
  if (tensors.size() != voxel_count()) {
    throw ValidationError("expected " + std::to_string(voxel_count()) + " tensors for dims [" +
                          std::to_string(dims[0]) + ", " + std::to_string(dims[1]) + ", " +
                          std::to_string(dims[2]) + "], found " + std::to_string(tensors.size()));
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].dim() != kTensorDim)
      throw ValidationError("voxel " + voxel_name(*this, i) + ": tensor is not 3x3");
    if (!tensors[i].matrix().all_finite())
      throw ValidationError("voxel " + voxel_name(*this, i) + ": non-finite tensor component");
    if (!is_psd(tensors[i])) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::string msg = std::to_string(bad.size()) + " tensor(s) not positive semidefinite at voxel";
    for (std::size_t k = 0; k < std::min(bad.size(), kMaxListedVoxels); ++k)
      msg += (k ? ", " : " ") + voxel_name(*this, bad[k]);
    if (bad.size() > kMaxListedVoxels) msg += ", ...";
    throw ValidationError(msg);
  }
}

std::array<double, 6> to_components(const SymMatrix& t) {
  if (t.dim() != kTensorDim) throw DimensionMismatch("tensor components need a 3x3 matrix");
  return {t(0, 0), t(0, 1), t(0, 2), t(1, 1), t(1, 2), t(2, 2)};
}

SymMatrix from_components(const std::array<double, 6>& c) {
  return SymMatrix::from_rows({{c[0], c[1], c[2]}, {c[1], c[3], c[4]}, {c[2], c[4], c[5]}});
}

TensorField parse_field(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw ParseError("field file must hold a JSON object");
  for (const char* key : {"dims", "spacing", "tensors"})
    if (!j.contains(key)) throw ParseError(std::string("field file lacks \"") + key + "\"");
  const Json& dims = j["dims"];
  const Json& spacing = j["spacing"];
  const Json& tensors = j["tensors"];
  if (!dims.is_array() || dims.size() != 3) throw ParseError("\"dims\" must hold 3 integers");
  if (!spacing.is_array() || spacing.size() != 3)
    throw ParseError("\"spacing\" must hold 3 numbers");
  if (!tensors.is_array()) throw ParseError("\"tensors\" must be an array");

  TensorField field;
  for (std::size_t a = 0; a < 3; ++a) {
    if (!dims[a].is_number_integer()) throw ParseError("\"dims\" must hold integers");
    if (dims[a].get<std::int64_t>() <= 0) throw ValidationError("dims must be positive");
    field.dims[a] = dims[a].get<std::size_t>();
    if (!spacing[a].is_number()) throw ParseError("\"spacing\" must hold numbers");
    field.spacing[a] = spacing[a].get<double>();
  }
  field.tensors.reserve(tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i)
    field.tensors.push_back(
        from_components(read_components(tensors[i], "tensor " + std::to_string(i))));
  field.validate();
  return field;
}

std::string serialize_field(const TensorField& field) {
  std::ostringstream out;
  out << "{\n  \"dims\": " << Json(field.dims).dump() << ",\n  \"spacing\": [";
  for (std::size_t a = 0; a < 3; ++a) out << (a ? ", " : "") << Json(field.spacing[a]).dump();
  out << "],\n  \"tensors\": [";
  for (std::size_t i = 0; i < field.tensors.size(); ++i)
    out << (i ? ",\n    " : "\n    ") << components_line(field.tensors[i]);
  out << (field.tensors.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return out.str();
}

TensorField load_field(const std::filesystem::path& path) {
  return parse_field(read_text_file(path));
}

void save_field(const TensorField& field, const std::filesystem::path& path) {
  write_text_file(path, serialize_field(field));
}

SymMatrix parse_tensor(std::string_view text) {
  const SymMatrix t = from_components(read_components(parse_json(text), "tensor"));
  if (!is_psd(t)) throw ValidationError("tensor is not positive semidefinite");
  return t;
}

std::string serialize_tensor(const SymMatrix& t) { return components_line(t) + "\n"; }

SymMatrix load_tensor(const std::filesystem::path& path) {
  return parse_tensor(read_text_file(path));
}

std::string field_to_csv(const TensorField& field) {
  std::ostringstream out;
  out << "x,y,z,xx,xy,xz,yy,yz,zz\n";
  for (std::size_t z = 0; z < field.dims[2]; ++z)
    for (std::size_t y = 0; y < field.dims[1]; ++y)
      for (std::size_t x = 0; x < field.dims[0]; ++x) {
        out << x << ',' << y << ',' << z;
        for (double c : to_components(field.at(x, y, z))) out << ',' << format_double(c);
        out << '\n';
      }
  return out.str();
}

TensorField upsample_field(const TensorField& field, MetricKind metric, std::size_t factor,
                           unsigned threads) {
  if (factor < 2) throw std::invalid_argument("upsampling factor must be at least 2");
  field.validate();
  TensorField current = field;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (current.dims[axis] < 2) continue;
    current = upsample_axis(current, axis, metric, factor, threads);
  }
  return current;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace psdpath
