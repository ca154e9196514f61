#include "symlat/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "symlat/error.hpp"

namespace symlat {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_integer_label(const std::string& s) {
  if (s.empty() || s.size() > 9) return false;
  if (s.size() > 1 && s[0] == '0') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string label_of(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(where, "vertex label must be a string or an integer");
}

}  // namespace

Table parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Table t;
  std::vector<std::vector<double>> rows;
  bool drop_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (t.header.empty()) {
      drop_first = fields.front().empty();
      if (drop_first) fields.erase(fields.begin());
      for (const auto& f : fields)
        if (f.empty()) throw ParseError(where, "empty column name");
      t.header = fields;
      continue;
    }
    if (drop_first && !fields.empty()) fields.erase(fields.begin());
    if (fields.size() != t.header.size()) {
      throw ParseError(where, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    auto& row = rows.emplace_back();
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0;
      const auto& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(where + " field '" + t.header[c] + "'", "not a number: '" + f + "'");
      }
      row.push_back(v);
    }
  }
  if (t.header.empty()) throw ParseError(source, "missing header row");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.values(r, c) = rows[r][c];
  return t;
}

Table read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path), path.string()); }

GaussianData read_observations(const std::filesystem::path& path, Divisor divisor) {
  auto t = read_csv(path);
  if (t.values.rows() < 2) throw ParseError(path.string(), "need at least two observations");
  return data_from_observations(std::move(t.header), t.values, divisor);
}

GaussianData read_covariance(const std::filesystem::path& path, int n, Divisor divisor) {
  auto t = read_csv(path);
  if (t.values.rows() != t.values.cols()) {
    throw ParseError(path.string(), "covariance matrix must be square");
  }
  try {
    return data_from_covariance(std::move(t.header), t.values, n, divisor);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string(), e.what());
  }
}

ColouredGraph graph_from_json(const Json& j, bool normalize) {
  if (!j.is_object()) throw ParseError("graph", "expected a JSON object");
  for (const char* key : {"vertices", "vertex_classes", "edge_classes"}) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw ParseError(std::string("graph.") + key, "missing or not an array");
    }
  }
  Labels labels;
  bool numeric = true;
  for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
    const auto& v = j["vertices"][i];
    labels.push_back(label_of(v, "vertices[" + std::to_string(i) + "]"));
    numeric = numeric && v.is_number_integer();
  }
  if (labels.empty()) throw ParseError("vertices", "graph needs at least one vertex");
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError("vertices", "duplicate vertex label");
    }
  }
  if (numeric) {
    auto ascending = [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); };
    if (!std::is_sorted(labels.begin(), labels.end(), ascending)) {
      if (!normalize) throw ParseError("vertices", "numeric vertex labels must be ascending");
      std::sort(labels.begin(), labels.end(), ascending);
    }
  }
  std::vector<std::vector<std::string>> vc;
  for (std::size_t b = 0; b < j["vertex_classes"].size(); ++b) {
    const auto& cls = j["vertex_classes"][b];
    const std::string where = "vertex_classes[" + std::to_string(b) + "]";
    if (!cls.is_array() || cls.empty()) throw ParseError(where, "must be a nonempty array");
    auto& out = vc.emplace_back();
    for (std::size_t i = 0; i < cls.size(); ++i)
      out.push_back(label_of(cls[i], where + "[" + std::to_string(i) + "]"));
  }
  std::vector<std::vector<std::pair<std::string, std::string>>> ec;
  for (std::size_t b = 0; b < j["edge_classes"].size(); ++b) {
    const auto& cls = j["edge_classes"][b];
    const std::string where = "edge_classes[" + std::to_string(b) + "]";
    if (!cls.is_array() || cls.empty()) throw ParseError(where, "must be a nonempty array");
    auto& out = ec.emplace_back();
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      if (!cls[i].is_array() || cls[i].size() != 2) throw ParseError(w, "edge must be a pair");
      out.emplace_back(label_of(cls[i][0], w + "[0]"), label_of(cls[i][1], w + "[1]"));
    }
  }
  ColouredGraph g;
  try {
    g = ColouredGraph::from_classes(labels, vc, ec);
  } catch (const std::invalid_argument& e) {
    throw ParseError("graph", e.what());
  }
  if (!normalize) {
    Json canonical = graph_to_json(g);
    Json given = j;
    given.erase("vertices");
    canonical.erase("vertices");
    // Compare structure with labels as strings so numeric and string forms agree.
    auto as_text = [](const Json& x) {
      Json y = x;
      for (auto& cls : y["vertex_classes"])
        for (auto& v : cls) v = v.is_string() ? v : Json(v.dump());
      for (auto& cls : y["edge_classes"])
        for (auto& e : cls)
          for (auto& v : e) v = v.is_string() ? v : Json(v.dump());
      return Json{{"v", y["vertex_classes"]}, {"e", y["edge_classes"]}};
    };
    if (as_text(given) != as_text(canonical)) {
      throw ParseError("graph", "input is not in canonical order (use --normalize); canonical form: " +
                                    canonical.dump());
    }
  }
  return g;
}

ColouredGraph read_graph(const std::filesystem::path& path, bool normalize) {
  Json j;
  try {
    j = Json::parse(slurp(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  try {
    return graph_from_json(j, normalize);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e.what());
  }
}

Json graph_to_json(const ColouredGraph& g) {
  const auto& L = g.labels();
  const bool numeric = std::all_of(L.begin(), L.end(), is_integer_label);
  auto label = [&](int v) { return numeric ? Json(std::stoll(L[v])) : Json(L[v]); };
  Json j;
  j["vertices"] = Json::array();
  for (int v = 0; v < g.order(); ++v) j["vertices"].push_back(label(v));
  j["vertex_classes"] = Json::array();
  for (const auto& blk : g.vertex_classes().blocks()) {
    Json cls = Json::array();
    for (int v : blk) cls.push_back(label(v));
    j["vertex_classes"].push_back(cls);
  }
  j["edge_classes"] = Json::array();
  for (const auto& blk : g.edge_classes().blocks()) {
    Json cls = Json::array();
    for (int id : blk) {
      auto [a, b] = g.endpoints(id);
      cls.push_back(Json::array({label(a), label(b)}));
    }
    j["edge_classes"].push_back(cls);
  }
  return j;
}

std::string class_key(const ColouredGraph& g, bool vertex, int block) {
  const auto& L = g.labels();
  std::string key = vertex ? "V:" : "E:";
  const auto blocks = vertex ? g.vertex_classes().blocks() : g.edge_classes().blocks();
  bool first = true;
  for (int x : blocks.at(static_cast<std::size_t>(block))) {
    if (!first) key += ',';
    first = false;
    if (vertex) {
      key += L[x];
    } else {
      auto [a, b] = g.endpoints(x);
      key += L[a] + "-" + L[b];
    }
  }
  return key;
}

Json fit_to_json(const ColouredGraph& g, const FitResult& fit) {
  Json lambda = Json::object();
  const int nv = g.vertex_classes().num_blocks();
  for (Eigen::Index u = 0; u < fit.lambda.size(); ++u) {
    const bool vertex = u < nv;
    lambda[class_key(g, vertex, static_cast<int>(vertex ? u : u - nv))] = fit.lambda[u];
  }
  return Json{{"lambda", lambda},         {"loglik", fit.loglik},     {"p", fit.p},
              {"df", fit.df},             {"deviance", fit.deviance}, {"p_value", fit.p_value},
              {"bic", fit.bic},           {"converged", fit.converged},
              {"iterations", fit.iterations}};
}

namespace {

bool holds_object(const Json& j) {
  if (j.is_object()) return true;
  if (!j.is_array()) return false;
  for (const auto& x : j)
    if (holds_object(x)) return true;
  return false;
}

}  // namespace

std::string pretty_json(const Json& j, int indent) {
  if (!holds_object(j) || j.empty()) return j.dump();
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  std::string out(1, j.is_object() ? '{' : '[');
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out += first ? "\n" : ",\n";
    first = false;
    out += pad;
    if (j.is_object()) out += Json(it.key()).dump() + ": ";
    out += pretty_json(*it, indent + 2);
  }
  out += '\n' + std::string(static_cast<std::size_t>(indent), ' ') + (j.is_object() ? '}' : ']');
  return out;
}

}  // namespace symlat
