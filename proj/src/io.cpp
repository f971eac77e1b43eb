#include "metrolabel/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <unistd.h>

namespace metrolabel {

using Json = nlohmann::ordered_json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

namespace {

// JSON text with floats in fixed six-decimal form.
void emit(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short numeric arrays (points) stay on one line
      const bool flat = j.size() <= 2 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fixed6(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, out, 2, 0);
  out += "\n";
  return out;
}

std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

const Json& field(const Json& obj, const std::string& base, const char* key) {
  if (!obj.contains(key)) throw SchemaError(ptr(base, key), "missing required field");
  return obj.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(where, "number must be finite");
  return v;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where, "expected a string");
  return j.get<std::string>();
}

Point point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(where, "expected [x, y]");
  return {number(j[0], ptr(where, 0)), number(j[1], ptr(where, 1))};
}

Json point_json(Point p) { return Json::array({p.x, p.y}); }

}  // namespace

MetroMap parse_map(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "document must be an object");
  const Json& version = field(doc, "", "version");
  if (!version.is_number_integer() || version.get<int>() != kMapVersion)
    throw SchemaError("/version", "unsupported version (expected 1)");

  MetroMap map;
  const std::string style = text(field(doc, "", "style"), "/style");
  if (style == "octilinear")
    map.style = StyleKind::Octilinear;
  else if (style == "curved")
    map.style = StyleKind::Curved;
  else
    throw SchemaError("/style", "expected \"octilinear\" or \"curved\"");

  if (doc.contains("label")) {
    const Json& lab = doc["label"];
    if (!lab.is_object()) throw SchemaError("/label", "expected an object");
    if (lab.contains("height")) map.label.height = number(lab["height"], "/label/height");
    if (lab.contains("char_width")) map.label.char_width = number(lab["char_width"], "/label/char_width");
    if (lab.contains("stop_offset")) map.label.stop_offset = number(lab["stop_offset"], "/label/stop_offset");
    if (map.label.height <= 0) throw SchemaError("/label/height", "must be positive");
    if (map.label.char_width <= 0) throw SchemaError("/label/char_width", "must be positive");
    if (map.label.stop_offset < 0) throw SchemaError("/label/stop_offset", "must be non-negative");
  }

  const Json& lines = field(doc, "", "lines");
  if (!lines.is_array() || lines.empty()) throw SchemaError("/lines", "expected a non-empty array");
  std::unordered_set<std::string> line_ids, stop_ids;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string lp = ptr("/lines", li);
    const Json& lj = lines[li];
    if (!lj.is_object()) throw SchemaError(lp, "expected an object");
    const std::string id = text(field(lj, lp, "id"), ptr(lp, "id"));
    if (!line_ids.insert(id).second) throw SchemaError(ptr(lp, "id"), "duplicate line id " + id);

    const Json& path = field(lj, lp, "path");
    if (!path.is_array() || path.size() < 2) throw SchemaError(ptr(lp, "path"), "expected at least two points");
    std::vector<Point> verts;
    for (std::size_t i = 0; i < path.size(); ++i) verts.push_back(point(path[i], ptr(ptr(lp, "path"), i)));
    std::optional<Polyline> poly;
    try {
      poly.emplace(std::move(verts));
    } catch (const GeometryError& e) {
      throw MapGeometryError(ptr(lp, "path"), e.what());
    }

    const Json& stops = field(lj, lp, "stops");
    if (!stops.is_array() || stops.empty()) throw SchemaError(ptr(lp, "stops"), "expected a non-empty array");
    MetroLine line{id, *poly, {}};
    double last_arc = -std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < stops.size(); ++si) {
      const std::string sp = ptr(ptr(lp, "stops"), si);
      const Json& sj = stops[si];
      if (!sj.is_object()) throw SchemaError(sp, "expected an object");
      Stop s;
      s.id = text(field(sj, sp, "id"), ptr(sp, "id"));
      if (!stop_ids.insert(s.id).second) throw SchemaError(ptr(sp, "id"), "duplicate stop id " + s.id);
      s.name = text(field(sj, sp, "name"), ptr(sp, "name"));
      if (s.name.empty()) throw SchemaError(ptr(sp, "name"), "name must not be empty");
      s.position = point(field(sj, sp, "at"), ptr(sp, "at"));
      s.line_id = id;
      s.index = static_cast<int>(si);
      Polyline::Location loc;
      try {
        loc = line.path.locate(s.position);
      } catch (const GeometryError&) {
        throw MapGeometryError(sp, "stop " + s.id + " is not on its line");
      }
      if (loc.arc_length <= last_arc) throw MapGeometryError(sp, "stop " + s.id + " is out of order along its line");
      last_arc = loc.arc_length;
      line.stops.push_back(std::move(s));
    }
    map.lines.push_back(std::move(line));
  }
  return map;
}

MetroMap load_map(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_map(ss.str());
}

std::string serialize_map(const MetroMap& map) {
  Json doc;
  doc["version"] = kMapVersion;
  doc["style"] = to_string(map.style);
  doc["label"] = {{"height", map.label.height},
                  {"char_width", map.label.char_width},
                  {"stop_offset", map.label.stop_offset}};
  Json lines = Json::array();
  for (const MetroLine& l : map.lines) {
    Json path = Json::array();
    for (Point p : l.path.vertices()) path.push_back(point_json(p));
    Json stops = Json::array();
    for (const Stop& s : l.stops) stops.push_back({{"id", s.id}, {"name", s.name}, {"at", point_json(s.position)}});
    lines.push_back({{"id", l.id}, {"path", path}, {"stops", stops}});
  }
  doc["lines"] = lines;
  return dump(doc);
}

CostWeights parse_weights(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "weights must be an object");
  CostWeights w;
  const std::pair<const char*, double*> fields[] = {
      {"steepness_factor", &w.steepness_factor},
      {"opposite_xdir_penalty", &w.opposite_xdir_penalty},
      {"switchover_gap_factor", &w.switchover_gap_factor},
      {"octi_horizontal_mismatch", &w.octi_horizontal_mismatch},
      {"octi_other_mismatch", &w.octi_other_mismatch},
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const auto& [name, target] : fields)
      if (it.key() == name) {
        *target = number(it.value(), "/" + it.key());
        if (*target < 0) throw SchemaError("/" + it.key(), "must be non-negative");
        known = true;
      }
    if (!known) throw SchemaError("/" + it.key(), "unknown weight");
  }
  return w;
}

MonotoneFormula parse_formula(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "formula must be an object");
  auto integer = [](const Json& j, const std::string& where) {
    if (!j.is_number_integer()) throw SchemaError(where, "expected an integer");
    return j.get<int>();
  };
  auto int_list = [&](const Json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], ptr(where, i)));
    return out;
  };
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "num_vars" && it.key() != "clauses" && it.key() != "order" && it.key() != "levels")
      throw SchemaError("/" + it.key(), "unknown field");

  MonotoneFormula f;
  f.num_vars = integer(field(doc, "", "num_vars"), "/num_vars");
  if (f.num_vars < 1) throw SchemaError("/num_vars", "must be at least 1");
  const Json& clauses = field(doc, "", "clauses");
  if (!clauses.is_array()) throw SchemaError("/clauses", "expected an array");
  std::vector<bool> positive;
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    const std::string where = ptr("/clauses", c);
    const auto lits = int_list(clauses[c], where);
    if (lits.size() != 3) throw SchemaError(where, "expected three literals");
    const std::array<int, 3> clause{lits[0], lits[1], lits[2]};
    for (std::size_t k = 0; k < 3; ++k)
      if (clause[k] == 0 || std::abs(clause[k]) > f.num_vars)
        throw SchemaError(ptr(where, k), "literal out of range");
    const bool pos = clause[0] > 0;
    if (std::any_of(clause.begin(), clause.end(), [&](int l) { return (l > 0) != pos; }))
      throw SchemaError(where, "clause mixes positive and negative literals");
    (pos ? f.positive_clauses : f.negative_clauses).push_back(clause);
    positive.push_back(pos);
  }
  if (doc.contains("order")) f.order = int_list(doc["order"], "/order");
  if (doc.contains("levels")) {
    if (!doc.contains("order")) throw SchemaError("/levels", "levels need an order");
    const auto levels = int_list(doc["levels"], "/levels");
    if (levels.size() != positive.size()) throw SchemaError("/levels", "expected one level per clause");
    for (std::size_t c = 0; c < levels.size(); ++c)
      (positive[c] ? f.positive_levels : f.negative_levels).push_back(levels[c]);
  } else if (doc.contains("order") && !clauses.empty()) {
    throw SchemaError("/levels", "an order needs clause levels");
  }
  try {
    validate(f);
  } catch (const InvalidFormula& e) {
    throw SchemaError("", e.what());
  }
  return f;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// ids may only contain a safe subset in SVG
std::string xml_id(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

const char* kPalette[] = {"#e3342f", "#3490dc", "#38c172", "#f6993f", "#9561e2",
                          "#f66d9b", "#4dc0b5", "#ffed4a", "#6574cd", "#a0522d"};

}  // namespace

std::string render_svg(const MetroMap& map, const Labeling* labeling, const SvgOptions& opts) {
  BBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto grow = [&](Point p) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  };
  for (const auto& l : map.lines)
    for (Point p : l.path.vertices()) grow(p);
  if (labeling)
    for (const auto& ll : labeling->lines)
      for (const auto& c : ll.labels)
        for (Point p : c.polygon.vertices()) grow(p);
  box.min_x -= opts.margin;
  box.min_y -= opts.margin;
  box.max_x += opts.margin;
  box.max_y += opts.margin;
  const double w = box.max_x - box.min_x, h = box.max_y - box.min_y;
  // flip y so that north is up
  auto X = [&](double x) { return fixed6(x - box.min_x); };
  auto Y = [&](double y) { return fixed6(box.max_y - y); };
  auto pts = [&](std::span<const Point> ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) s += ' ';
      s += X(ps[i].x) + "," + Y(ps[i].y);
    }
    return s;
  };
  const double stroke = 0.15 * opts.text_height;

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\""
    << " width=\"" << fixed6(w * opts.units_to_px) << "\" height=\"" << fixed6(h * opts.units_to_px) << "\""
    << " viewBox=\"0.000000 0.000000 " << fixed6(w) << " " << fixed6(h) << "\">\n";
  o << "<rect x=\"0.000000\" y=\"0.000000\" width=\"" << fixed6(w) << "\" height=\"" << fixed6(h)
    << "\" fill=\"#ffffff\"/>\n";

  o << "<g id=\"lines\" fill=\"none\" stroke-linejoin=\"round\" stroke-linecap=\"round\">\n";
  for (std::size_t li = 0; li < map.lines.size(); ++li)
    o << "<polyline id=\"line-" << xml_id(map.lines[li].id) << "\" points=\"" << pts(map.lines[li].path.vertices())
      << "\" stroke=\"" << kPalette[li % std::size(kPalette)] << "\" stroke-width=\"" << fixed6(3 * stroke)
      << "\"/>\n";
  o << "</g>\n";

  o << "<g id=\"stops\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"" << fixed6(stroke) << "\">\n";
  for (const auto& l : map.lines)
    for (const auto& s : l.stops)
      o << "<circle id=\"stop-" << xml_id(s.id) << "\" cx=\"" << X(s.position.x) << "\" cy=\"" << Y(s.position.y)
        << "\" r=\"" << fixed6(2 * stroke) << "\"/>\n";
  o << "</g>\n";

  if (labeling) {
    std::unordered_map<std::string, std::string> names;
    for (const auto& l : map.lines)
      for (const auto& s : l.stops) names[s.id] = s.name;
    o << "<defs>\n";
    for (const auto& ll : labeling->lines)
      for (const auto& c : ll.labels) {
        o << "<path id=\"baseline-" << xml_id(c.stop_id) << "\" d=\"";
        for (std::size_t i = 0; i < c.centerline.size(); ++i)
          o << (i ? " L " : "M ") << X(c.centerline[i].x) << " " << Y(c.centerline[i].y);
        o << "\"/>\n";
      }
    o << "</defs>\n";
    if (opts.draw_polygons) {
      o << "<g id=\"label-shapes\" stroke-width=\"" << fixed6(0.5 * stroke) << "\">\n";
      for (const auto& ll : labeling->lines)
        for (const auto& c : ll.labels)
          o << "<polygon id=\"label-" << xml_id(c.stop_id) << "\" class=\"" << to_string(c.side) << "\" points=\""
            << pts(c.polygon.vertices()) << "\" fill=\"" << (c.side == Side::Left ? "#dbeafe" : "#fde2e2")
            << "\" stroke=\"#6b7280\"/>\n";
      o << "</g>\n";
    }
    o << "<g id=\"label-text\" font-family=\"monospace\" font-size=\"" << fixed6(0.8 * opts.text_height)
      << "\" fill=\"#111111\">\n";
    for (const auto& ll : labeling->lines)
      for (const auto& c : ll.labels)
        o << "<text dominant-baseline=\"central\"><textPath xlink:href=\"#baseline-" << xml_id(c.stop_id) << "\">"
          << xml_escape(names[c.stop_id]) << "</textPath></text>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string stats_json(const RunStats& s, const StatsOptions& opts) {
  Json doc;
  doc["algorithm"] = s.algorithm;
  doc["success"] = s.success;
  doc["failure"] = s.failure.empty() ? Json(nullptr) : Json(s.failure);
  doc["scale"] = s.scale;
  doc["scale_ratio"] = s.scale_ratio;
  doc["attempted_scales"] = s.attempted_scales;
  doc["candidates"] = {{"after_step1", s.candidates_step1}, {"after_step3", s.candidates_step3}};
  doc["removed"] = {{"separation", s.removed_separation},
                    {"transitivity", s.removed_transitivity},
                    {"assumptions", s.removed_separation + s.removed_transitivity},
                    {"line_hits", s.removed_line_hits},
                    {"conflicts", s.removed_conflicts}};
  doc["fallbacks"] = {{"ranking", s.ranking_fallbacks}, {"solve", s.solve_fallbacks}};
  doc["cost"] = {{"w1", s.cost.w1}, {"w2", s.cost.w2}, {"w3", s.cost.w3}, {"total", s.cost.total()}};
  doc["switchovers"] = s.switchovers;
  doc["sequences"] = {{"min", s.sequences.min}, {"max", s.sequences.max}, {"avg", s.sequences.avg},
                      {"runs", s.sequences.runs}};
  Json lines = Json::array();
  for (const auto& l : s.lines)
    lines.push_back({{"id", l.id},
                     {"w1", l.cost.w1},
                     {"w2", l.cost.w2},
                     {"w3", l.cost.w3},
                     {"total", l.cost.total()},
                     {"switchovers", l.switchovers}});
  doc["lines"] = lines;
  if (opts.include_timings)
    doc["timings_ms"] = {{"generate", s.timings.generate_ms},
                         {"scale", s.timings.scale_ms},
                         {"preselect", s.timings.preselect_ms},
                         {"solve", s.timings.solve_ms}};
  return dump(doc);
}

void write_atomic(const std::filesystem::path& p, std::string_view contents) {
  const auto dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + p.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + p.string() + ": " + ec.message());
  }
}

}  // namespace metrolabel
