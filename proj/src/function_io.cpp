#include "graphlaplace/function_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "graphlaplace/error.hpp"

namespace graphlaplace {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

[[noreturn]] void csv_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ConfigParse, "function_space", source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, const std::string& source, std::size_t line, const char* field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    csv_error(source, line, std::string("field '") + field + "': not a finite number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

PiecewiseFunction parse_function_csv(const MetricGraph& g, std::string_view text, const std::string& source) {
  std::map<EdgeId, std::vector<std::pair<double, double>>> rows;
  std::map<EdgeId, std::size_t> first_line;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    if (!header) {
      if (cols != std::vector<std::string>{"edge_id", "t", "value"}) {
        csv_error(source, line_no, "expected header 'edge_id,t,value'");
      }
      header = true;
      continue;
    }
    if (cols.size() != 3) csv_error(source, line_no, "expected 3 columns, got " + std::to_string(cols.size()));
    const auto e = g.find_edge(cols[0]);
    if (!e) csv_error(source, line_no, "field 'edge_id': unknown edge '" + cols[0] + "'");
    const double t = parse_number(cols[1], source, line_no, "t");
    const double v = parse_number(cols[2], source, line_no, "value");
    auto& r = rows[*e];
    if (r.empty()) first_line[*e] = line_no;
    if (!r.empty() && !(t > r.back().first)) csv_error(source, line_no, "field 't': values must increase within an edge");
    r.emplace_back(t, v);
  }
  if (!header) csv_error(source, line_no, "empty file (expected header 'edge_id,t,value')");
  std::vector<std::vector<double>> values(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto it = rows.find(e);
    if (it == rows.end() || it->second.size() < 2) {
      csv_error(source, line_no, "edge '" + g.edge(e).name + "' needs at least 2 grid rows");
    }
    const auto& r = it->second;
    const double l = g.edge(e).length;
    const double h = l / static_cast<double>(r.size() - 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (std::abs(r[k].first - h * static_cast<double>(k)) > 1e-9 * std::max(1.0, l)) {
        csv_error(source, first_line[e] + k,
                  "field 't': edge '" + g.edge(e).name + "' grid is not uniform on [0, " + format_double(l) + "]");
      }
      values[e].push_back(r[k].second);
    }
  }
  return PiecewiseFunction::sampled(g, std::move(values));
}

PiecewiseFunction load_function_csv(const MetricGraph& g, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "function_space", "cannot open function file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_function_csv(g, ss.str(), path.string());
}

std::string function_csv(const MetricGraph& g, const PiecewiseFunction& f, std::size_t nodes_per_edge) {
  std::string out = "edge_id,t,value\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (const GraphPoint& x : g.edge_grid(e, nodes_per_edge)) {
      out += g.edge(e).name + "," + format_double(x.t) + "," + format_double(f.value(e, x.t)) + "\n";
    }
  }
  return out;
}

}  // namespace graphlaplace
