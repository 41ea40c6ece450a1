#include "graphlaplace/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& source, const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigParse, "metric_graph", source + ": field '" + field + "': " + what);
}

std::string id_string(const json& j, const std::string& source, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  schema_error(source, field, "expected a string or integer id");
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

VertexCondition parse_condition(const json& j, const std::string& source, const std::string& field) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "kirchhoff" || s == "neumann") return VertexCondition::kirchhoff();
    if (s == "dirichlet") return VertexCondition::dirichlet();
    schema_error(source, field, "unknown condition '" + s + "' (expected kirchhoff, dirichlet or {\"robin\": w})");
  }
  if (j.is_object() && j.size() == 1 && j.contains("robin")) {
    const json& w = j.at("robin");
    if (!w.is_number()) schema_error(source, field + ".robin", "expected a number");
    try {
      return VertexCondition::robin(w.get<double>());
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), source + ": field '" + field + ".robin': " + e.what());
    }
  }
  schema_error(source, field, "expected \"kirchhoff\", \"dirichlet\" or {\"robin\": weight}");
}

}  // namespace

GraphFile parse_graph_file(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": syntax error: " << e.what();
    throw Error(ErrorCode::ConfigParse, "metric_graph", os.str());
  }
  if (!doc.is_object()) schema_error(source, "<root>", "expected an object");

  GraphSpec spec;
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    schema_error(source, "vertices", "missing or not an array");
  }
  for (std::size_t k = 0; k < doc["vertices"].size(); ++k) {
    spec.vertices.push_back(id_string(doc["vertices"][k], source, "vertices[" + std::to_string(k) + "]"));
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) schema_error(source, "edges", "missing or not an array");
  for (std::size_t k = 0; k < doc["edges"].size(); ++k) {
    const json& je = doc["edges"][k];
    const std::string field = "edges[" + std::to_string(k) + "]";
    if (!je.is_object()) schema_error(source, field, "expected an object");
    for (const char* key : {"u", "v", "length"}) {
      if (!je.contains(key)) schema_error(source, field + "." + key, "missing");
    }
    EdgeSpec es;
    es.id = je.contains("id") ? id_string(je["id"], source, field + ".id") : "e" + std::to_string(k);
    es.u = id_string(je["u"], source, field + ".u");
    es.v = id_string(je["v"], source, field + ".v");
    if (!je["length"].is_number()) schema_error(source, field + ".length", "expected a number");
    es.length = je["length"].get<double>();
    spec.edges.push_back(std::move(es));
  }

  MetricGraph graph;
  try {
    graph = MetricGraph::build(spec);
  } catch (const Error& e) {
    throw Error(e.code(), e.module(), source + ": " + e.what());
  }

  VertexConditionSet conds = VertexConditionSet::all_kirchhoff(graph);
  if (doc.contains("vertex_conditions")) {
    const json& jc = doc["vertex_conditions"];
    if (!jc.is_object()) schema_error(source, "vertex_conditions", "expected an object keyed by vertex id");
    for (auto it = jc.begin(); it != jc.end(); ++it) {
      const std::string field = "vertex_conditions." + it.key();
      auto v = graph.find_vertex(it.key());
      if (!v) schema_error(source, field, "unknown vertex id");
      conds.set(*v, parse_condition(it.value(), source, field));
    }
  }
  return GraphFile{std::move(spec), std::move(graph), std::move(conds)};
}

GraphFile load_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "metric_graph", "cannot open graph spec '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_file(ss.str(), path.string());
}

std::string to_json(const MetricGraph& g, const VertexConditionSet& conds) {
  json doc;
  doc["vertices"] = json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) doc["vertices"].push_back(g.vertex_name(v));
  doc["edges"] = json::array();
  for (const Edge& e : g.edges()) {
    doc["edges"].push_back(
        {{"id", e.name}, {"u", g.vertex_name(e.tail)}, {"v", g.vertex_name(e.head)}, {"length", e.length}});
  }
  json jc = json::object();
  for (VertexId v = 0; v < conds.size(); ++v) {
    const auto& c = conds.at(v);
    switch (c.kind) {
      case VertexConditionKind::Kirchhoff: jc[g.vertex_name(v)] = "kirchhoff"; break;
      case VertexConditionKind::Dirichlet: jc[g.vertex_name(v)] = "dirichlet"; break;
      case VertexConditionKind::Robin: jc[g.vertex_name(v)] = {{"robin", c.weight}}; break;
    }
  }
  doc["vertex_conditions"] = jc;
  return doc.dump(2);
}

}  // namespace graphlaplace
