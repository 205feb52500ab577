// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mpi_forge/parallel.hpp"

namespace mpi_forge {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kGridMagic{"OCCV1\0", 6};
constexpr std::string_view kStackMagic{"MPIT\0", 5};
constexpr std::string_view kWeightMagic{"WMAP", 4};
constexpr std::uint64_t kMaxElements = (std::uint64_t{1} << 31) - 1;

[[noreturn]] void fail(FormatErrorKind kind, const std::string& what) { throw FormatError(kind, what); }

class ByteWriter {
public:
  void bytes(std::string_view b) { out_.append(b); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void u8s(const std::vector<Label>& labels) {
    const std::size_t old = out_.size();
    out_.resize(old + labels.size());
    std::memcpy(out_.data() + old, labels.data(), labels.size());
  }
  std::string take() { return std::move(out_); }

private:
  std::string out_;
};

class ByteReader {
public:
  ByteReader(std::string_view bytes, const char* format) : in_(bytes), format_(format) {}

  void magic(std::string_view m) {
    const std::size_t n = std::min(m.size(), in_.size());
    if (in_.substr(0, n) != m.substr(0, n)) fail(FormatErrorKind::MagicMismatch, std::string(format_) + " magic bytes not found");
    if (n < m.size()) fail(FormatErrorKind::Truncated, std::string(format_) + " file ends inside the magic");
    pos_ = m.size();
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* field) { return std::bit_cast<float>(u32(field)); }
  std::string_view take(std::size_t n, const char* field) {
    need(n, field);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void finish() const {
    if (pos_ != in_.size())
      fail(FormatErrorKind::TrailingBytes, std::string(format_) + " has " + std::to_string(in_.size() - pos_) + " unexpected trailing bytes");
  }

private:
  void need(std::size_t n, const char* field) const {
    if (in_.size() - pos_ < n) fail(FormatErrorKind::Truncated, std::string(format_) + " ends before " + field);
  }

  std::string_view in_;
  const char* format_;
  std::size_t pos_{0};
};

// Product of header dims with zero and overflow diagnostics.
std::uint64_t checked_volume(std::initializer_list<std::uint32_t> dims, const char* format) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d == 0) fail(FormatErrorKind::ZeroDim, std::string(format) + " header has a zero dimension");
    if (n > kMaxElements / d) fail(FormatErrorKind::DimOverflow, std::string(format) + " dimensions exceed the element limit");
    n *= d;
  }
  return n;
}

std::vector<Label> decode_labels(std::string_view raw, const char* format) {
  std::vector<Label> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto id = static_cast<unsigned char>(raw[i]);
    if (!is_valid_label_id(id))
      fail(FormatErrorKind::InvalidValue, std::string(format) + " holds invalid label id " + std::to_string(id));
    labels[i] = static_cast<Label>(id);
  }
  return labels;
}

std::uint32_t to_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

// JSON helpers. Every structural problem surfaces as a FormatError.

json parse_json(std::string_view text, const char* format) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(FormatErrorKind::Json, std::string(format) + ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(FormatErrorKind::InvalidValue, where + " must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(FormatErrorKind::InvalidValue, where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(FormatErrorKind::InvalidValue, where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(FormatErrorKind::InvalidValue, where + " must be finite");
  return v;
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(FormatErrorKind::InvalidValue, where + " must be an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    fail(FormatErrorKind::InvalidValue, where + " is out of range");
  return j.get<std::int64_t>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(FormatErrorKind::InvalidValue, where + " must be a string");
  return j.get<std::string>();
}

const json& array(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || (n != 0 && j.size() != n))
    fail(FormatErrorKind::InvalidValue, where + " must be an array" + (n ? " of " + std::to_string(n) : std::string()));
  return j;
}

Vec3 vec3(const json& j, const std::string& where) {
  array(j, 3, where);
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Converts validation failures inside decoders to format diagnostics.
template <typename Fn>
auto as_format_error(const char* format, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    fail(FormatErrorKind::InvalidValue, std::string(format) + ": " + e.what());
  }
}

json grid_spec_json(const GridSpec& s) {
  return json{{"dims", json::array({s.dims.x(), s.dims.y(), s.dims.z()})},
              {"origin", vec3_json(s.origin)},
              {"resolution", s.resolution}};
}

GridSpec grid_spec_from_json(const json& j) {
  const auto& dims = array(member(j, "dims", "grid"), 3, "grid.dims");
  VoxelIndex d;
  for (int a = 0; a < 3; ++a) {
    const auto v = integer(dims[a], "grid.dims");
    if (v <= 0 || v > INT32_MAX) fail(FormatErrorKind::InvalidValue, "grid.dims must be positive");
    d[a] = static_cast<int>(v);
  }
  const Vec3 origin = vec3(member(j, "origin", "grid"), "grid.origin");
  const double res = number(member(j, "resolution", "grid"), "grid.resolution");
  return as_format_error("grid", [&] { return GridSpec::create(d, origin, res); });
}

json rig_json(const CameraRig& rig) {
  json cams = json::array();
  for (std::size_t i = 0; i < rig.size(); ++i) {
    const auto& c = rig.cameras[i];
    json K = json::array(), T = json::array();
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) K.push_back(c.intrinsics()(r, k));
      for (int k = 0; k < 3; ++k) T.push_back(c.rotation()(r, k));
      T.push_back(c.translation()[r]);
    }
    cams.push_back(json{{"name", rig.names[i]}, {"K", K}, {"T", T}, {"width", c.width()}, {"height", c.height()}});
  }
  return json{{"cameras", cams}};
}

CameraRig rig_from_json(const json& j) {
  const auto& cams = array(member(j, "cameras", "rig"), 0, "rig.cameras");
  std::vector<CameraModel> cameras;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const std::string where = "rig.cameras[" + std::to_string(i) + "]";
    const auto& c = cams[i];
    names.push_back(string(member(c, "name", where), where + ".name"));
    const auto& Kj = array(member(c, "K", where), 9, where + ".K");
    const auto& Tj = array(member(c, "T", where), 12, where + ".T");
    Mat3 K, R;
    Vec3 t;
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) {
        K(r, k) = number(Kj[3 * r + k], where + ".K");
        R(r, k) = number(Tj[4 * r + k], where + ".T");
      }
      t[r] = number(Tj[4 * r + 3], where + ".T");
    }
    const auto w = integer(member(c, "width", where), where + ".width");
    const auto h = integer(member(c, "height", where), where + ".height");
    if (w <= 0 || h <= 0 || w > INT32_MAX || h > INT32_MAX) fail(FormatErrorKind::InvalidValue, where + " image size must be positive");
    cameras.push_back(as_format_error("rig", [&] {
      return CameraModel::create(K, R, t, static_cast<int>(w), static_cast<int>(h));
    }));
  }
  return as_format_error("rig", [&] { return CameraRig::create(std::move(cameras), std::move(names)); });
}

int label_key(const std::string& key, const std::string& where) {
  int id = -1;
  const auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec != std::errc() || p != key.data() + key.size() || !is_valid_label_id(id))
    fail(FormatErrorKind::InvalidValue, where + " key \"" + key + "\" is not a label id");
  return id;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path + "'");
}

double widen_f32(float f) {
  if (!std::isfinite(f)) return static_cast<double>(f);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), f);
  double d = 0.0;
  std::from_chars(buf, res.ptr, d);
  return static_cast<float>(d) == f ? d : static_cast<double>(f);
}

// ---------------------------------------------------------------- OCCV1

std::string encode_grid(const OccupancyGrid& grid) {
  const auto& s = grid.spec();
  ByteWriter w;
  w.bytes(kGridMagic);
  for (int a = 0; a < 3; ++a) w.u32(to_u32(s.dims[a], "grid dim"));
  for (int a = 0; a < 3; ++a) w.f32(s.origin[a]);
  w.f32(s.resolution);
  w.u8s(grid.labels());
  return w.take();
}

OccupancyGrid decode_grid(std::string_view bytes) {
  ByteReader r(bytes, "OCCV1");
  r.magic(kGridMagic);
  const std::uint32_t nx = r.u32("nx"), ny = r.u32("ny"), nz = r.u32("nz");
  const std::uint64_t volume = checked_volume({nx, ny, nz}, "OCCV1");
  Vec3 origin;
  origin.x() = widen_f32(r.f32("origin"));
  origin.y() = widen_f32(r.f32("origin"));
  origin.z() = widen_f32(r.f32("origin"));
  const double res = widen_f32(r.f32("resolution"));
  if (!origin.allFinite()) fail(FormatErrorKind::InvalidValue, "OCCV1 origin is not finite");
  if (!(res > 0) || !std::isfinite(res)) fail(FormatErrorKind::InvalidValue, "OCCV1 resolution must be positive");
  auto labels = decode_labels(r.take(volume, "labels"), "OCCV1");
  r.finish();
  const auto spec = as_format_error("OCCV1", [&] {
    return GridSpec::create(VoxelIndex(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)), origin, res);
  });
  return OccupancyGrid(spec, std::move(labels));
}

// ----------------------------------------------------------------- MPIT

std::string encode_stack(const MpiStack& stack) {
  const auto& c = stack.config();
  ByteWriter w;
  w.bytes(kStackMagic);
  w.u32(to_u32(stack.views(), "view count"));
  w.u32(to_u32(c.planes, "plane count"));
  w.u32(to_u32(c.height, "height"));
  w.u32(to_u32(c.width, "width"));
  w.f32(c.d_min);
  w.f32(c.d_max);
  w.u8s(stack.labels());
  const json sidecar{
      {"format", "MPIT"},
      {"plane_indexing", "d_l = d_min + (d_max - d_min) * l / D for l = 0..D-1"},
      {"pixel_convention",
       "u = column, v = row; output pixel (u, v) samples the ray through native pixel coordinate "
       "(u * native_w / W, v * native_h / H) exactly, with no half-pixel offset"},
      {"grid", stack.grid_spec() ? grid_spec_json(*stack.grid_spec()) : json(nullptr)},
      {"rig", rig_json(stack.rig())},
  };
  const std::string text = sidecar.dump();
  w.u32(to_u32(static_cast<std::int64_t>(text.size()), "sidecar length"));
  w.bytes(text);
  return w.take();
}

MpiStack decode_stack(std::string_view bytes) {
  ByteReader r(bytes, "MPIT");
  r.magic(kStackMagic);
  const std::uint32_t n = r.u32("N"), d = r.u32("D"), h = r.u32("H"), w = r.u32("W");
  const std::uint64_t volume = checked_volume({n, d, h, w}, "MPIT");
  MpiConfig config;
  config.planes = static_cast<int>(d);
  config.height = static_cast<int>(h);
  config.width = static_cast<int>(w);
  config.d_min = widen_f32(r.f32("d_min"));
  config.d_max = widen_f32(r.f32("d_max"));
  as_format_error("MPIT", [&] { config.validate(); });
  auto labels = decode_labels(r.take(volume, "labels"), "MPIT");
  const std::uint32_t len = r.u32("sidecar length");
  const auto text = r.take(len, "sidecar");
  r.finish();

  const json sidecar = parse_json(text, "MPIT sidecar");
  const CameraRig rig = rig_from_json(member(sidecar, "rig", "MPIT sidecar"));
  if (rig.size() != n) fail(FormatErrorKind::InvalidValue, "MPIT sidecar rig size does not match N");
  std::optional<GridSpec> grid;
  if (const auto& g = member(sidecar, "grid", "MPIT sidecar"); !g.is_null()) grid = grid_spec_from_json(g);
  return as_format_error("MPIT", [&] { return MpiStack::create(config, rig, grid, std::move(labels)); });
}

// ----------------------------------------------------------------- WMAP

std::string encode_weight_map(const WeightMap& map) {
  ByteWriter w;
  w.bytes(kWeightMagic);
  w.u32(to_u32(map.values.rows(), "height"));
  w.u32(to_u32(map.values.cols(), "width"));
  w.f32(map.step_fraction);
  for (Eigen::Index v = 0; v < map.values.rows(); ++v)
    for (Eigen::Index u = 0; u < map.values.cols(); ++u) w.f32(map.values(v, u));
  return w.take();
}

WeightMap decode_weight_map(std::string_view bytes) {
  ByteReader r(bytes, "WMAP");
  r.magic(kWeightMagic);
  const std::uint32_t h = r.u32("H"), w = r.u32("W");
  const std::uint64_t volume = checked_volume({h, w}, "WMAP");
  WeightMap map;
  map.step_fraction = widen_f32(r.f32("step fraction"));
  if (!std::isfinite(map.step_fraction)) fail(FormatErrorKind::InvalidValue, "WMAP step fraction is not finite");
  // Bound the allocation by the bytes actually present.
  if (bytes.size() < 16 + volume * 4) fail(FormatErrorKind::Truncated, "WMAP ends before the weights");
  map.values.resize(h, w);
  for (std::uint32_t v = 0; v < h; ++v) {
    for (std::uint32_t u = 0; u < w; ++u) {
      const double x = widen_f32(r.f32("weights"));
      if (!std::isfinite(x) || x < 0) fail(FormatErrorKind::InvalidValue, "WMAP weights must be finite and non-negative");
      map.values(v, u) = x;
    }
  }
  r.finish();
  return map;
}

// -------------------------------------------------------------- palette

std::string encode_palette(const Palette& palette) {
  json j = json::object();
  for (const auto& [id, e] : palette.entries)
    j[std::to_string(id)] = json{{"name", e.name}, {"rgb", json::array({e.rgb[0], e.rgb[1], e.rgb[2]})}};
  return j.dump(2);
}

Palette decode_palette(std::string_view text) {
  const json j = parse_json(text, "palette");
  if (!j.is_object()) fail(FormatErrorKind::InvalidValue, "palette must be an object");
  Palette p;
  for (const auto& [key, val] : j.items()) {
    const std::string where = "palette[" + key + "]";
    const int id = label_key(key, "palette");
    PaletteEntry e;
    e.name = string(member(val, "name", where), where + ".name");
    const auto& rgb = array(member(val, "rgb", where), 3, where + ".rgb");
    for (int c = 0; c < 3; ++c) {
      const auto v = integer(rgb[c], where + ".rgb");
      if (v < 0 || v > 255) fail(FormatErrorKind::InvalidValue, where + ".rgb components must be 0..255");
      e.rgb[c] = static_cast<std::uint8_t>(v);
    }
    p.entries[static_cast<std::uint8_t>(id)] = std::move(e);
  }
  as_format_error("palette", [&] { p.validate(); });
  return p;
}

// ------------------------------------------------------------------ rig

std::string encode_rig(const CameraRig& rig) { return rig_json(rig).dump(2); }

CameraRig decode_rig(std::string_view text) { return rig_from_json(parse_json(text, "rig")); }

// ----------------------------------------------------------------- plan

std::string encode_plan(const SamplingPlan& plan) {
  return json{{"seed", plan.seed}, {"entries", plan.entries}}.dump();
}

SamplingPlan decode_plan(std::string_view text) {
  const json j = parse_json(text, "plan");
  SamplingPlan p;
  const auto& seed = member(j, "seed", "plan");
  if (!seed.is_number_unsigned()) fail(FormatErrorKind::InvalidValue, "plan.seed must be a non-negative integer");
  p.seed = seed.get<std::uint64_t>();
  const auto& entries = array(member(j, "entries", "plan"), 0, "plan.entries");
  for (const auto& e : entries) p.entries.push_back(string(e, "plan.entries[]"));
  return p;
}

// ---------------------------------------------------------- edit script

std::string encode_edit_script(const EditScript& script) {
  json ops = json::array();
  for (const auto& op : script.ops) {
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, FillBox>) {
            ops.push_back(json{{"type", "fill_box"}, {"min", vec3_json(o.min)}, {"max", vec3_json(o.max)}, {"class", o.label}});
          } else if constexpr (std::is_same_v<T, FillCylinder>) {
            ops.push_back(json{{"type", "fill_cylinder"}, {"center", vec3_json(o.center)}, {"radius", o.radius},
                               {"z_min", o.z_min}, {"z_max", o.z_max}, {"class", o.label}});
          } else if constexpr (std::is_same_v<T, EraseRegion>) {
            ops.push_back(json{{"type", "erase_region"}, {"min", vec3_json(o.min)}, {"max", vec3_json(o.max)}});
          } else if constexpr (std::is_same_v<T, Repaint>) {
            ops.push_back(json{{"type", "repaint"}, {"min", vec3_json(o.min)}, {"max", vec3_json(o.max)},
                               {"from_class", o.from_label}, {"to_class", o.to_label}});
          } else {
            ops.push_back(json{{"type", "copy_translate"}, {"src_min", vec3_json(o.src_min)},
                               {"src_max", vec3_json(o.src_max)}, {"offset", vec3_json(o.offset)}});
          }
        },
        op);
  }
  return json{{"ops", ops}}.dump(2);
}

EditScript decode_edit_script(std::string_view text) {
  const json j = parse_json(text, "edit script");
  const auto& ops = array(member(j, "ops", "edit script"), 0, "edit script ops");
  EditScript script;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& o = ops[i];
    const std::string where = "ops[" + std::to_string(i) + "]";
    auto field = [&](const char* key) -> const json& { return member(o, key, where); };
    auto v3 = [&](const char* key) { return vec3(field(key), where + "." + key); };
    auto num = [&](const char* key) { return number(field(key), where + "." + key); };
    auto cls = [&](const char* key) {
      const auto v = integer(field(key), where + "." + key);
      // Out-of-range ids are reported by validate_script, not here.
      return static_cast<int>(std::clamp<std::int64_t>(v, INT32_MIN, INT32_MAX));
    };
    const std::string type = string(field("type"), where + ".type");
    if (type == "fill_box") script.ops.emplace_back(FillBox{v3("min"), v3("max"), cls("class")});
    else if (type == "fill_cylinder")
      script.ops.emplace_back(FillCylinder{v3("center"), num("radius"), num("z_min"), num("z_max"), cls("class")});
    else if (type == "erase_region") script.ops.emplace_back(EraseRegion{v3("min"), v3("max")});
    else if (type == "repaint") script.ops.emplace_back(Repaint{v3("min"), v3("max"), cls("from_class"), cls("to_class")});
    else if (type == "copy_translate") script.ops.emplace_back(CopyTranslate{v3("src_min"), v3("src_max"), v3("offset")});
    else fail(FormatErrorKind::InvalidValue, where + " has unknown type \"" + type + "\"");
  }
  return script;
}

// ---------------------------------------------------------------- index

std::string encode_index(const DatasetIndex& index) {
  json frames = json::array();
  for (const auto& f : index.frames) {
    json counts = json::object();
    for (int c = 1; c < kNumClasses; ++c)
      if (f.voxel_counts[c] > 0) counts[std::to_string(c)] = f.voxel_counts[c];
    frames.push_back(json{{"id", f.id}, {"grid", f.grid_path}, {"counts", counts}});
  }
  return json{{"frames", frames}}.dump(2);
}

DatasetIndex decode_index(std::string_view text, const std::function<OccupancyGrid(const std::string&)>& load_grid,
                          int threads) {
  const json j = parse_json(text, "index");
  const auto& frames = array(member(j, "frames", "index"), 0, "index.frames");
  DatasetIndex index;
  index.frames.resize(frames.size());
  std::vector<std::size_t> to_load;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "index.frames[" + std::to_string(i) + "]";
    const auto& f = frames[i];
    auto& rec = index.frames[i];
    rec.id = string(member(f, "id", where), where + ".id");
    if (f.is_object() && f.contains("grid")) rec.grid_path = string(f["grid"], where + ".grid");
    if (f.is_object() && f.contains("counts")) {
      const auto& counts = f["counts"];
      if (!counts.is_object()) fail(FormatErrorKind::InvalidValue, where + ".counts must be an object");
      for (const auto& [key, val] : counts.items()) {
        const int id = label_key(key, where + ".counts");
        const auto v = integer(val, where + ".counts");
        if (id == 0 || id >= kNumClasses || v < 0) fail(FormatErrorKind::InvalidValue, where + ".counts must map classes 1..16 to counts >= 0");
        rec.voxel_counts[id] = v;
      }
    } else {
      if (rec.grid_path.empty()) fail(FormatErrorKind::InvalidValue, where + " needs \"counts\" or \"grid\"");
      to_load.push_back(i);
    }
  }
  if (!to_load.empty()) {
    if (!load_grid) fail(FormatErrorKind::InvalidValue, "index frames without counts need their grids loaded");
    parallel_for(0, static_cast<std::int64_t>(to_load.size()), threads, [&](std::int64_t k) {
      auto& rec = index.frames[to_load[k]];
      rec = make_frame_record(rec.id, rec.grid_path, load_grid(rec.grid_path));
    });
  }
  as_format_error("index", [&] { index.validate(); });
  return index;
}

// --------------------------------------------------------------- recipe

SceneRecipe decode_recipe(std::string_view text) {
  const json j = parse_json(text, "recipe");
  if (!j.is_object()) fail(FormatErrorKind::InvalidValue, "recipe must be an object");
  SceneRecipe r;
  auto label = [](const json& v, const std::string& where) {
    const auto id = integer(v, where);
    if (!is_valid_label_id(static_cast<int>(std::clamp<std::int64_t>(id, -1, 256))))
      fail(FormatErrorKind::InvalidValue, where + " is not a label id");
    return static_cast<Label>(id);
  };
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(FormatErrorKind::InvalidValue, "recipe.seed must be a non-negative integer");
    r.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("grid")) r.grid = grid_spec_from_json(j["grid"]);
  if (j.contains("ground_class")) r.ground_label = label(j["ground_class"], "recipe.ground_class");
  if (j.contains("ground_height")) r.ground_height = number(j["ground_height"], "recipe.ground_height");
  if (j.contains("placement_radius")) r.placement_radius = number(j["placement_radius"], "recipe.placement_radius");
  if (j.contains("clear_radius")) r.clear_radius = number(j["clear_radius"], "recipe.clear_radius");
  if (j.contains("objects")) {
    r.objects.clear();
    const auto& objs = array(j["objects"], 0, "recipe.objects");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      const std::string where = "recipe.objects[" + std::to_string(i) + "]";
      const auto& o = objs[i];
      ObjectSpec spec;
      spec.label = label(member(o, "class", where), where + ".class");
      const auto count = integer(member(o, "count", where), where + ".count");
      if (count < 0 || count > 1'000'000) fail(FormatErrorKind::InvalidValue, where + ".count is out of range");
      spec.count = static_cast<int>(count);
      const std::string shape = string(member(o, "shape", where), where + ".shape");
      if (shape == "box") spec.shape = Shape::Box;
      else if (shape == "cylinder") spec.shape = Shape::Cylinder;
      else fail(FormatErrorKind::InvalidValue, where + ".shape must be \"box\" or \"cylinder\"");
      spec.min_size = vec3(member(o, "min_size", where), where + ".min_size");
      spec.max_size = vec3(member(o, "max_size", where), where + ".max_size");
      r.objects.push_back(spec);
    }
  }
  if (j.contains("rig")) {
    const auto& rig = j["rig"];
    auto dim = [&](const char* key, int& out) {
      if (!rig.contains(key)) return;
      const auto v = integer(rig[key], std::string("recipe.rig.") + key);
      if (v <= 0 || v > 1'000'000) fail(FormatErrorKind::InvalidValue, std::string("recipe.rig.") + key + " is out of range");
      out = static_cast<int>(v);
    };
    if (!rig.is_object()) fail(FormatErrorKind::InvalidValue, "recipe.rig must be an object");
    dim("width", r.rig.width);
    dim("height", r.rig.height);
    if (rig.contains("focal")) r.rig.focal = number(rig["focal"], "recipe.rig.focal");
    if (rig.contains("mount_height")) r.rig.mount_height = number(rig["mount_height"], "recipe.rig.mount_height");
  }
  as_format_error("recipe", [&] { r.validate(); });
  return r;
}

// -------------------------------------------------------------- reports

std::string encode_diff_report(const GridDiff& diff) {
  json removed = json::object(), added = json::object();
  for (int id = 0; id < 256; ++id) {
    if (diff.removed_by_label[id]) removed[std::to_string(id)] = diff.removed_by_label[id];
    if (diff.added_by_label[id]) added[std::to_string(id)] = diff.added_by_label[id];
  }
  return json{{"changed", diff.changed}, {"removed_by_class", removed}, {"added_by_class", added}}.dump(2);
}

std::string encode_balance_report(const BalanceReport& r) {
  json classes = json::array();
  for (int c = 1; c < kNumClasses; ++c) {
    if (r.exposure_before[c] == 0) continue;
    classes.push_back(json{{"id", c},
                           {"name", kClassNames[c]},
                           {"exposure_before", r.exposure_before[c]},
                           {"exposure_after", r.exposure_after[c]},
                           {"frequency_before", r.frequency_before[c]},
                           {"frequency_after", r.frequency_after[c]}});
  }
  return json{{"ratio_before", r.ratio_before}, {"ratio_after", r.ratio_after}, {"classes", classes}}.dump(2);
}

// -------------------------------------------------------------- netpbm

std::string encode_ppm(const RgbImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.data()), static_cast<std::size_t>(image.size()));
  return out;
}

}  // namespace mpi_forge
