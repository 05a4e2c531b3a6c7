#include "cfp/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfp/error.hpp"
#include "json.hpp"

namespace cfp {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

std::size_t index_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
    parse_fail(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

InstanceFile parse_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("instance must be a JSON object");

  InstanceFile out;
  FlowInstance& inst = out.instance;
  inst.nodes = index_field(doc, "nodes");
  if (!doc.contains("edges") || !doc["edges"].is_array()) parse_fail("'edges' must be an array");
  for (const Json& e : doc["edges"]) {
    if (!e.is_object()) parse_fail("each edge must be an object");
    inst.edges.push_back({index_field(e, "from"), index_field(e, "to"), field<double>(e, "capacity")});
  }
  inst.nodal_capacity = field<std::vector<double>>(doc, "nodal_capacities");
  inst.source = index_field(doc, "source");
  inst.sink = index_field(doc, "sink");
  inst.injection = field<double>(doc, "injection");

  if (doc.contains("metadata")) {
    const Json& m = doc["metadata"];
    if (!m.is_object()) parse_fail("'metadata' must be an object");
    if (m.contains("seed")) out.metadata.seed = field<std::uint64_t>(m, "seed");
    if (m.contains("density")) out.metadata.density = field<double>(m, "density");
    if (m.contains("calibration")) out.metadata.calibration = field<std::string>(m, "calibration");
    if (m.contains("trace")) {
      if (!m["trace"].is_array()) parse_fail("'metadata.trace' must be an array");
      for (const Json& s : m["trace"]) {
        out.metadata.trace.push_back({field<double>(s, "injection"), field<double>(s, "c_bar"),
                                      field<bool>(s, "feasible"), field<double>(s, "throughput")});
      }
    }
  }
  inst.validate();
  return out;
}

InstanceFile read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string format_instance(const InstanceFile& file) {
  const FlowInstance& inst = file.instance;
  Json doc;
  doc["nodes"] = inst.nodes;
  doc["edges"] = Json::array();
  for (const FlowEdge& e : inst.edges) {
    doc["edges"].push_back(Json{{"from", e.from}, {"to", e.to}, {"capacity", e.capacity}});
  }
  doc["nodal_capacities"] = inst.nodal_capacity;
  doc["source"] = inst.source;
  doc["sink"] = inst.sink;
  doc["injection"] = inst.injection;

  const InstanceMetadata& m = file.metadata;
  if (m.seed || m.density || !m.calibration.empty() || !m.trace.empty()) {
    Json meta = Json::object();
    if (m.seed) meta["seed"] = *m.seed;
    if (m.density) meta["density"] = *m.density;
    if (!m.calibration.empty()) meta["calibration"] = m.calibration;
    if (!m.trace.empty()) {
      meta["trace"] = Json::array();
      for (const CalibrationStep& s : m.trace) {
        meta["trace"].push_back(Json{{"injection", s.injection},
                                     {"c_bar", s.c_bar},
                                     {"feasible", s.feasible},
                                     {"throughput", s.throughput}});
      }
    }
    doc["metadata"] = std::move(meta);
  }
  return doc.dump(2) + "\n";
}

void write_instance(const std::string& path, const InstanceFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << format_instance(file);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace cfp
