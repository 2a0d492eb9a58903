#include "periph/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "periph/format.hpp"

namespace periph::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw FormatError(what); }

const Json& field(const Json& obj, const char* name) {
  if (!obj.is_object()) fail(std::string("expected an object holding \"") + name + "\"");
  const auto it = obj.find(name);
  if (it == obj.end()) fail(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const Json& value, const char* name) {
  if (!value.is_number()) fail(std::string("field \"") + name + "\" must be a number");
  return value.get<double>();
}

int integer(const Json& value, const char* name) {
  if (!value.is_number_integer()) fail(std::string("field \"") + name + "\" must be an integer");
  return value.get<int>();
}

const Json& array(const Json& value, const char* name) {
  if (!value.is_array()) fail(std::string("field \"") + name + "\" must be an array");
  return value;
}

Json vector_json(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(v);
  return out;
}

}  // namespace

Json to_json(const PeripheralModel& model) {
  Json components = Json::array();
  for (const auto& c : model.components) {
    Json entry;
    if (c.is_cusp()) {
      entry["kind"] = "cusp";
    } else {
      entry["kind"] = "collar";
      if (c.genus) {
        entry["genus"] = *c.genus;
      } else {
        entry["area"] = c.area;
      }
    }
    components.push_back(std::move(entry));
  }
  Json pairs = Json::array();
  for (const auto& p : model.pairs) pairs.push_back(Json{{"i", p.i}, {"j", p.j}, {"constant", p.constant}});
  Json self = Json::array();
  for (const auto& s : model.self) self.push_back(Json{{"index", s.index}, {"bound", s.bound}});
  return Json{{"components", std::move(components)}, {"pairs", std::move(pairs)}, {"self", std::move(self)}};
}

PeripheralModel model_from_json(const Json& doc) {
  PeripheralModel model;
  for (const auto& entry : array(field(doc, "components"), "components")) {
    const Json& kind = field(entry, "kind");
    if (kind == "cusp") {
      model.components.push_back(Component::cusp());
    } else if (kind == "collar") {
      const bool has_area = entry.contains("area");
      const bool has_genus = entry.contains("genus");
      if (has_area == has_genus) fail("a collar needs exactly one of \"area\" or \"genus\"");
      if (has_area) {
        model.components.push_back(Component::collar_with_area(number(entry["area"], "area")));
      } else {
        const int genus = integer(entry["genus"], "genus");
        // Out-of-range genera are reported by validate().
        Component c{ComponentKind::Collar, 0.0, genus};
        if (genus >= 2) c = Component::collar_of_genus(genus);
        model.components.push_back(c);
      }
    } else {
      fail("component kind must be \"cusp\" or \"collar\"");
    }
  }
  for (const auto& entry : array(field(doc, "pairs"), "pairs")) {
    model.pairs.push_back({integer(field(entry, "i"), "i"), integer(field(entry, "j"), "j"),
                           number(field(entry, "constant"), "constant")});
  }
  for (const auto& entry : array(field(doc, "self"), "self")) {
    model.self.push_back({integer(field(entry, "index"), "index"), number(field(entry, "bound"), "bound")});
  }
  return model;
}

namespace {

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

void emit(std::ostringstream& os, const Json& value, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) os << ',';
        first = false;
        newline(depth + 1);
        os << Json(key).dump() << (indent < 0 ? ":" : ": ");
        emit(os, item, indent, depth + 1);
      }
      newline(depth);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) os << ',';
        first = false;
        newline(depth + 1);
        emit(os, item, indent, depth + 1);
      }
      newline(depth);
      os << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
      } else {
        os << shortest_decimal(v);
      }
      return;
    }
    default:
      os << value.dump();
  }
}

}  // namespace

std::string dump(const Json& value, int indent) {
  std::ostringstream os;
  emit(os, value, indent, 0);
  return os.str();
}

PeripheralModel parse_model(const std::string& text) { return model_from_json(parse_text(text)); }

std::string dump_model(const PeripheralModel& model) { return dump(to_json(model), 2) + "\n"; }

Json to_json(const Configuration& config) { return Json{{"values", vector_json(config.values)}}; }

Configuration config_from_json(const Json& doc) {
  const Json& values = doc.is_array() ? doc : array(field(doc, "values"), "values");
  Configuration config;
  for (const auto& v : values) config.values.push_back(number(v, "values"));
  return config;
}

Configuration parse_config_list(const std::string& text) {
  Configuration config;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) fail("empty entry in configuration list");
    const std::string token = item.substr(begin, end - begin + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("configuration entry \"" + token + "\" is not a number");
    }
    if (used != token.size()) fail("configuration entry \"" + token + "\" is not a number");
    config.values.push_back(value);
  }
  if (config.values.empty()) fail("configuration list is empty");
  return config;
}

Json to_json(const ConstraintOrigin& origin) {
  if (origin.is_pair()) return Json{{"kind", "pair"}, {"i", origin.i}, {"j", origin.j}};
  return Json{{"kind", "self"}, {"index", origin.i}};
}

ConstraintOrigin origin_from_json(const Json& doc) {
  const Json& kind = field(doc, "kind");
  if (kind == "pair") return ConstraintOrigin::of_pair(integer(field(doc, "i"), "i"), integer(field(doc, "j"), "j"));
  if (kind == "self") return ConstraintOrigin::of_self(integer(field(doc, "index"), "index"));
  fail("constraint kind must be \"pair\" or \"self\"");
}

Json to_json(const Solution& solution) {
  Json active = Json::array();
  for (const auto& o : solution.active_set) active.push_back(to_json(o));
  return Json{{"method", to_string(solution.method)},
              {"total", solution.total},
              {"config", vector_json(solution.config.values)},
              {"active_set", std::move(active)}};
}

Solution solution_from_json(const Json& doc) {
  Solution s;
  const Json& method = field(doc, "method");
  if (method == "FrontierEnum") {
    s.method = SolveMethod::FrontierEnum;
  } else if (method == "Greedy") {
    s.method = SolveMethod::Greedy;
  } else if (method == "Probe") {
    s.method = SolveMethod::Probe;
  } else {
    fail("unknown solution method");
  }
  s.total = number(field(doc, "total"), "total");
  s.config = config_from_json(array(field(doc, "config"), "config"));
  for (const auto& o : array(field(doc, "active_set"), "active_set")) s.active_set.push_back(origin_from_json(o));
  return s;
}

Json to_json(const ProbeResult& probe) {
  Json out{{"improved", probe.improved}, {"trials", probe.trials}, {"base_total", probe.base_total}};
  if (probe.witness) {
    out["witness"] = vector_json(probe.witness->values);
    out["witness_total"] = probe.witness_total;
  }
  return out;
}

Json to_json(const Classification& classification) {
  const Evidence& ev = classification.evidence;
  Json evidence{{"rule", ev.rule}, {"maximal", ev.maximal}};
  Json edges = Json::array();
  for (const auto& [a, b] : ev.edges) edges.push_back(Json::array({a, b}));
  evidence["edges"] = std::move(edges);
  Json components = Json::array();
  for (std::size_t c = 0; c < ev.components.size(); ++c) {
    components.push_back(Json{{"vertices", ev.components[c]}, {"tree", static_cast<bool>(ev.component_is_tree[c])}});
  }
  evidence["components"] = std::move(components);
  if (ev.deformation) {
    const auto& d = *ev.deformation;
    evidence["deformation"] = Json{{"component", d.component},
                                   {"root", d.root},
                                   {"t", d.t},
                                   {"config", vector_json(d.deformed.values)},
                                   {"total_before", d.total_before},
                                   {"total_after", d.total_after}};
  }
  if (ev.triangle) {
    const auto& t = *ev.triangle;
    Json derivatives = Json::array();
    for (const auto& d : t.derivatives) derivatives.push_back(Json{{"minus", d.minus}, {"plus", d.plus}});
    evidence["triangle"] = Json{{"indices", t.indices},
                                {"sizes", vector_json({t.sizes.begin(), t.sizes.end()})},
                                {"verdict", to_string(t.verdict)},
                                {"derivatives", std::move(derivatives)}};
  }
  if (ev.ray) {
    Json ray{{"direction", vector_json(ev.ray->direction)}, {"slope", ev.ray->slope}};
    if (ev.ray->witness) {
      ray["witness"] = vector_json(ev.ray->witness->values);
      ray["witness_total"] = ev.ray->witness_total;
    }
    evidence["ray"] = std::move(ray);
  }
  if (ev.probe) evidence["probe"] = to_json(*ev.probe);
  return Json{{"verdict", to_string(classification.verdict)}, {"evidence", std::move(evidence)}};
}

Json to_json(const oracle::VerificationReport& report) {
  Json out;
  if (report.instance_seed) {
    out["instance_seed"] = *report.instance_seed;
  } else {
    out["instance_seed"] = nullptr;
  }
  out["candidate_total"] = report.candidate_total;
  out["oracle_total"] = report.oracle_total;
  out["verdict"] = report.pass ? "PASS" : "FAIL";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace periph::io
