#include "fanforge/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCombFormat = "fanforge-comb/1";
constexpr const char* kSpatialFormat = "fanforge-spatial/1";

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key + ": missing");
  return *it;
}

Rational rational_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path + ": expected a \"p/q\" string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

int int_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path + ": expected an integer");
  return j.get<int>();
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path + ": expected a string");
  return j.get<std::string>();
}

Json parse_doc(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("$: ") + e.what());
  }
}

Json comb_json(const Comb& c) {
  Json j;
  j["format"] = kCombFormat;
  j["source"] = c.meta().source ? Json(to_expr(*c.meta().source)) : Json(nullptr);
  j["depth"] = c.meta().depth;
  j["branch"] = c.meta().branch;
  j["provenance"] = to_string(c.meta().provenance);
  if (c.meta().provenance == Provenance::Product) j["cantor_depth"] = c.meta().cantor_depth;
  Json blades = Json::array();
  for (const auto& b : c.blades()) {
    Json o;
    o["index"] = b.index.path;
    if (!b.index.word.empty()) o["word"] = b.index.word;
    o["x"] = to_string(b.x);
    o["tip"] = to_string(b.tip);
    o["trace_scale"] = b.trace_scale ? Json(to_string(*b.trace_scale)) : Json(nullptr);
    o["kind"] = to_string(b.kind);
    blades.push_back(std::move(o));
  }
  j["blades"] = std::move(blades);
  return j;
}

Comb comb_from(const Json& j, const std::string& path) {
  if (string_at(field(j, "format", path), path + ".format") != kCombFormat)
    throw SchemaError(path + ".format: expected " + kCombFormat);
  CombMeta meta;
  const Json& src = field(j, "source", path);
  if (!src.is_null()) {
    try {
      meta.source = parse_set_expr(string_at(src, path + ".source"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(path + ".source: " + e.what());
    }
  }
  meta.depth = int_at(field(j, "depth", path), path + ".depth");
  meta.branch = int_at(field(j, "branch", path), path + ".branch");
  try {
    meta.provenance = provenance_from(string_at(field(j, "provenance", path), path + ".provenance"));
  } catch (const SchemaError& e) {
    throw SchemaError(path + ".provenance: " + e.what());
  }
  if (j.contains("cantor_depth")) meta.cantor_depth = int_at(j["cantor_depth"], path + ".cantor_depth");
  const Json& arr = field(j, "blades", path);
  if (!arr.is_array()) throw SchemaError(path + ".blades: expected an array");
  std::vector<Blade> blades;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string bp = path + ".blades[" + std::to_string(i) + "]";
    const Json& o = arr[i];
    Blade b;
    const Json& index = field(o, "index", bp);
    if (!index.is_array()) throw SchemaError(bp + ".index: expected an array");
    for (std::size_t k = 0; k < index.size(); ++k)
      b.index.path.push_back(int_at(index[k], bp + ".index[" + std::to_string(k) + "]"));
    if (o.contains("word")) b.index.word = string_at(o["word"], bp + ".word");
    b.x = rational_at(field(o, "x", bp), bp + ".x");
    b.tip = rational_at(field(o, "tip", bp), bp + ".tip");
    const Json& ts = field(o, "trace_scale", bp);
    if (!ts.is_null()) b.trace_scale = rational_at(ts, bp + ".trace_scale");
    try {
      b.kind = blade_kind_from(string_at(field(o, "kind", bp), bp + ".kind"));
    } catch (const SchemaError& e) {
      throw SchemaError(bp + ".kind: " + e.what());
    }
    blades.push_back(std::move(b));
  }
  return Comb(std::move(blades), std::move(meta));
}

Json point_json(const Point3& p) { return Json::array({to_string(p.x), to_string(p.y), to_string(p.z)}); }

Json descriptor_json(const CellMapDescriptor& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case CellMapDescriptor::Kind::SelfSimilar: j["index"] = d.idx1.path; break;
    case CellMapDescriptor::Kind::EndpointSwap:
      j["idx1"] = d.idx1.path;
      j["idx2"] = d.idx2.path;
      j["split"] = d.split ? Json(*d.split) : Json(nullptr);
      break;
    case CellMapDescriptor::Kind::VerticalAdjust:
      j["blade"] = d.idx1.path;
      j["y1"] = to_string(d.y1);
      j["y2"] = to_string(d.y2);
      j["eps"] = to_string(d.eps);
      j["column"] = d.column;
      break;
    case CellMapDescriptor::Kind::BladeShift: {
      j["i"] = d.i;
      j["j"] = d.j;
      j["window"] = d.window;
      Json psi = Json::array();
      for (const auto& [n, m] : d.psi) psi.push_back(Json::array({n, m}));
      j["psi"] = std::move(psi);
      j["unmatched"] = d.unmatched;
      break;
    }
    default: break;
  }
  Json params = Json::object();
  for (const auto& [k, v] : d.params) params[k] = to_string(v);
  j["params"] = std::move(params);
  return j;
}

}  // namespace

std::string encode_comb(const Comb& c) { return comb_json(c).dump(1) + "\n"; }

Comb decode_comb(const std::string& text) { return comb_from(parse_doc(text), "$"); }

bool is_spatial_document(const std::string& text) {
  Json j = parse_doc(text);
  return j.is_object() && j.contains("format") && j["format"] == kSpatialFormat;
}

std::string encode_spatial(const SpatialModel& m) {
  Json j;
  j["format"] = kSpatialFormat;
  j["base"] = comb_json(m.base);
  Json sheets = Json::array();
  for (const auto& s : m.sheets) {
    Json o;
    o["n"] = s.n;
    o["cell"] = s.cell;
    Json blades = Json::array();
    for (const auto& b : s.blades) {
      Json bj;
      bj["x"] = to_string(b.x);
      bj["tip"] = to_string(b.tip);
      Json poly = Json::array();
      for (const auto& p : b.polyline) poly.push_back(point_json(p));
      bj["polyline"] = std::move(poly);
      blades.push_back(std::move(bj));
    }
    o["blades"] = std::move(blades);
    sheets.push_back(std::move(o));
  }
  j["sheets"] = std::move(sheets);
  return j.dump(1) + "\n";
}

SpatialModel decode_spatial(const std::string& text) {
  Json j = parse_doc(text);
  if (string_at(field(j, "format", "$"), "$.format") != kSpatialFormat)
    throw SchemaError(std::string("$.format: expected ") + kSpatialFormat);
  SpatialModel m;
  m.base = comb_from(field(j, "base", "$"), "$.base");
  const Json& sheets = field(j, "sheets", "$");
  if (!sheets.is_array()) throw SchemaError("$.sheets: expected an array");
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    std::string sp = "$.sheets[" + std::to_string(i) + "]";
    Sheet s;
    s.n = int_at(field(sheets[i], "n", sp), sp + ".n");
    s.cell = string_at(field(sheets[i], "cell", sp), sp + ".cell");
    const Json& blades = field(sheets[i], "blades", sp);
    if (!blades.is_array()) throw SchemaError(sp + ".blades: expected an array");
    for (std::size_t k = 0; k < blades.size(); ++k) {
      std::string bp = sp + ".blades[" + std::to_string(k) + "]";
      SheetBlade b;
      b.x = rational_at(field(blades[k], "x", bp), bp + ".x");
      b.tip = rational_at(field(blades[k], "tip", bp), bp + ".tip");
      const Json& poly = field(blades[k], "polyline", bp);
      if (!poly.is_array()) throw SchemaError(bp + ".polyline: expected an array");
      for (std::size_t q = 0; q < poly.size(); ++q) {
        std::string pp = bp + ".polyline[" + std::to_string(q) + "]";
        if (!poly[q].is_array() || poly[q].size() != 3) throw SchemaError(pp + ": expected three coordinates");
        b.polyline.push_back(
            {rational_at(poly[q][0], pp + "[0]"), rational_at(poly[q][1], pp + "[1]"), rational_at(poly[q][2], pp + "[2]")});
      }
      s.blades.push_back(std::move(b));
    }
    m.sheets.push_back(std::move(s));
  }
  return m;
}

std::string encode_verify_report(const VerifyReport& r, const std::string& comb_ref) {
  Json j;
  j["comb"] = comb_ref;
  j["eps"] = to_string(r.eps);
  Json blades = Json::array();
  for (const auto& b : r.blades) {
    Json o;
    o["index"] = b.index.path;
    if (!b.index.word.empty()) o["word"] = b.index.word;
    o["pass"] = b.pass;
    o["gap_upper"] = to_decimal_upper(b.gap);
    blades.push_back(std::move(o));
  }
  j["blades"] = std::move(blades);
  j["summary"] = Json{{"pass", r.pass}};
  return j.dump(1) + "\n";
}

std::string encode_descriptor(const CellMapDescriptor& d) { return descriptor_json(d).dump(1) + "\n"; }

std::string encode_recipe(const Recipe& r) {
  Json j;
  j["describe"] = r.describe();
  Json steps = Json::array();
  for (const auto& d : r.steps) steps.push_back(descriptor_json(d));
  j["steps"] = std::move(steps);
  return j.dump(1) + "\n";
}

std::string encode_smoothness(const SmoothnessReport& r, const std::string& target) {
  Json j;
  j["target"] = target;
  j["converges"] = r.converges;
  j["witness_gap"] = r.witness_gap;
  j["sequence"] = r.sequence;
  Json gaps = Json::array();
  for (const auto& g : r.gaps) gaps.push_back(Json::array({g.lower, g.upper}));
  j["gaps"] = std::move(gaps);
  return j.dump(1) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
  if (!out) throw ArgumentError("write failed for " + path);
}

}  // namespace fanforge
