#include "symlat/coloured_graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "symlat/error.hpp"

namespace symlat {
namespace {

void require_same_labels(const ColouredGraph& g, const ColouredGraph& h) {
  if (g.shared_labels() != h.shared_labels() && g.labels() != h.labels()) {
    throw GroundMismatch("coloured graphs are over different vertex label lists");
  }
}

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string_view> split_bar(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> UndirectedGraph::adjacency() const {
  std::vector<std::vector<int>> adj(order);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

ColouredGraph::ColouredGraph(Labels labels, SetPartition vertex_classes, SetPartition edge_classes)
    : ColouredGraph(std::make_shared<const Labels>(std::move(labels)), std::move(vertex_classes),
                    std::move(edge_classes)) {}

ColouredGraph::ColouredGraph(std::shared_ptr<const Labels> labels, SetPartition vertex_classes,
                             SetPartition edge_classes)
    : labels_(std::move(labels)),
      vertex_classes_(std::move(vertex_classes)),
      edge_classes_(std::move(edge_classes)) {
  const int d = order();
  if (vertex_classes_.ground() != iota_vector(d)) {
    throw std::invalid_argument("vertex colouring must partition exactly the vertex indices");
  }
  if (d == 0 && !edge_classes_.empty()) throw std::invalid_argument("edges without vertices");
  for (int id : edge_classes_.ground()) {
    const int a = id / d;
    const int b = id % d;
    if (id < 0 || a >= b) throw std::invalid_argument("invalid edge id " + std::to_string(id));
  }
}

ColouredGraph ColouredGraph::from_classes(
    Labels labels, const std::vector<std::vector<std::string>>& vertex_classes,
    const std::vector<std::vector<std::pair<std::string, std::string>>>& edge_classes) {
  auto shared = std::make_shared<const Labels>(std::move(labels));
  const int d = static_cast<int>(shared->size());
  auto index = [&](const std::string& s) {
    auto it = std::find(shared->begin(), shared->end(), s);
    if (it == shared->end()) throw std::invalid_argument("unknown vertex label '" + s + "'");
    return static_cast<int>(it - shared->begin());
  };
  std::vector<std::vector<int>> vblocks;
  for (const auto& cls : vertex_classes) {
    auto& blk = vblocks.emplace_back();
    for (const auto& s : cls) blk.push_back(index(s));
  }
  std::vector<std::vector<int>> eblocks;
  for (const auto& cls : edge_classes) {
    auto& blk = eblocks.emplace_back();
    for (const auto& [x, y] : cls) {
      const int a = index(x);
      const int b = index(y);
      if (a == b) throw std::invalid_argument("self-loop on vertex '" + x + "'");
      blk.push_back(symlat::edge_id(d, a, b));
    }
  }
  SetPartition vp(iota_vector(d), vblocks);
  SetPartition ep = SetPartition::from_blocks(eblocks);
  return ColouredGraph(std::move(shared), std::move(vp), std::move(ep));
}

int ColouredGraph::edge_id(int a, int b) const { return symlat::edge_id(order(), a, b); }

std::pair<int, int> ColouredGraph::endpoints(int id) const {
  return {id / order(), id % order()};
}

bool ColouredGraph::has_edge(int a, int b) const {
  return a != b && edge_classes_.contains(edge_id(a, b));
}

int ColouredGraph::index_of(std::string_view label) const {
  auto it = std::find(labels_->begin(), labels_->end(), label);
  if (it == labels_->end()) throw std::out_of_range("unknown vertex label '" + std::string(label) + "'");
  return static_cast<int>(it - labels_->begin());
}

UndirectedGraph ColouredGraph::skeleton() const {
  UndirectedGraph g{static_cast<std::size_t>(order()), {}};
  for (int id : edges()) g.edges.push_back(endpoints(id));
  return g;
}

ColouredGraph ColouredGraph::recoloured(SetPartition vertex_classes,
                                        SetPartition edge_classes) const {
  return ColouredGraph(labels_, std::move(vertex_classes), std::move(edge_classes));
}

bool ColouredGraph::operator==(const ColouredGraph& other) const {
  return vertex_classes_ == other.vertex_classes_ && edge_classes_ == other.edge_classes_ &&
         (labels_ == other.labels_ || *labels_ == *other.labels_);
}

bool ColouredGraph::operator<(const ColouredGraph& other) const {
  if (vertex_classes_ != other.vertex_classes_) return vertex_classes_ < other.vertex_classes_;
  return edge_classes_ < other.edge_classes_;
}

std::vector<int> complete_edge_ids(int d) {
  std::vector<int> ids;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) ids.push_back(a * d + b);
  return ids;
}

bool cg_leq(const ColouredGraph& g, const ColouredGraph& h) {
  require_same_labels(g, h);
  const auto& ge = g.edge_classes();
  const auto& he = h.edge_classes();
  if (ge.size() > he.size() || ge.num_blocks() > he.num_blocks()) return false;
  if (!is_finer(h.vertex_classes(), g.vertex_classes())) return false;
  // Each h-class meeting E_g must lie inside E_g and inside one g-class;
  // together with E_g ⊆ E_h that makes every g-class a union of h-classes.
  thread_local std::vector<int> target;
  target.assign(static_cast<std::size_t>(he.num_blocks()), -2);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < he.size(); ++i) {
    auto pos = ge.position(he.ground()[i]);
    const int t = pos ? ge.rgs()[*pos] : -1;
    if (pos) ++matched;
    int& slot = target[he.rgs()[i]];
    if (slot == -2) {
      slot = t;
    } else if (slot != t) {
      return false;
    }
  }
  return matched == ge.size();
}

ColouredGraph cg_meet(const ColouredGraph& g, const ColouredGraph& h) {
  require_same_labels(g, h);
  const auto& ge = g.edge_classes();
  const auto& he = h.edge_classes();
  std::vector<int> common;
  std::set_intersection(ge.ground().begin(), ge.ground().end(), he.ground().begin(),
                        he.ground().end(), std::back_inserter(common));

  // Drop whole classes that stick out of the current edge set until stable.
  auto gblocks = ge.blocks();
  auto hblocks = he.blocks();
  auto inside = [&](int e) { return std::binary_search(common.begin(), common.end(), e); };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto* blocks : {&gblocks, &hblocks}) {
      for (const auto& blk : *blocks) {
        const bool any_in = std::any_of(blk.begin(), blk.end(), inside);
        const bool all_in = std::all_of(blk.begin(), blk.end(), inside);
        if (any_in && !all_in) {
          std::vector<int> kept;
          std::set_difference(common.begin(), common.end(), blk.begin(), blk.end(),
                              std::back_inserter(kept));
          common = std::move(kept);
          changed = true;
        }
      }
    }
  }
  SetPartition edges = partition_join(ge.restrict_to(common), he.restrict_to(common));
  return g.recoloured(partition_join(g.vertex_classes(), h.vertex_classes()), std::move(edges));
}

ColouredGraph cg_join(const ColouredGraph& g, const ColouredGraph& h) {
  require_same_labels(g, h);
  const auto& ge = g.edge_classes();
  const auto& he = h.edge_classes();
  std::vector<int> all;
  std::set_union(ge.ground().begin(), ge.ground().end(), he.ground().begin(), he.ground().end(),
                 std::back_inserter(all));
  // The edges missing from one graph form one extra class in its colouring.
  auto extended = [&](const SetPartition& p) {
    std::vector<int> tags;
    tags.reserve(all.size());
    for (int e : all) {
      auto pos = p.position(e);
      tags.push_back(pos ? p.rgs()[*pos] : p.num_blocks());
    }
    return SetPartition::from_labels(all, tags);
  };
  return g.recoloured(partition_meet(g.vertex_classes(), h.vertex_classes()),
                      partition_meet(extended(ge), extended(he)));
}

ColouredGraph zero(std::shared_ptr<const Labels> labels) {
  const int d = static_cast<int>(labels->size());
  if (d == 0) throw std::invalid_argument("zero() needs a nonempty label list");
  return ColouredGraph(std::move(labels), SetPartition::single_block(iota_vector(d)), SetPartition());
}

ColouredGraph unit(std::shared_ptr<const Labels> labels) {
  const int d = static_cast<int>(labels->size());
  if (d == 0) throw std::invalid_argument("unit() needs a nonempty label list");
  return ColouredGraph(std::move(labels), SetPartition::discrete(iota_vector(d)),
                       SetPartition::discrete(complete_edge_ids(d)));
}

ColouredGraph zero(Labels labels) { return zero(std::make_shared<const Labels>(std::move(labels))); }
ColouredGraph unit(Labels labels) { return unit(std::make_shared<const Labels>(std::move(labels))); }

Labels numeric_labels(int n) {
  Labels out;
  for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

ColouredGraphStream::ColouredGraphStream(Labels labels, bool override_guard)
    : labels_(std::make_shared<const Labels>(std::move(labels))),
      complete_(complete_edge_ids(static_cast<int>(labels_->size()))),
      vertex_stream_(iota_vector(static_cast<int>(labels_->size()))) {
  if (static_cast<int>(labels_->size()) > kEnumerationGuard && !override_guard) {
    throw GuardExceeded("enumerating coloured graphs on " + std::to_string(labels_->size()) +
                        " vertices exceeds the limit of " + std::to_string(kEnumerationGuard) +
                        " (override required)");
  }
}

std::optional<ColouredGraph> ColouredGraphStream::next() {
  while (true) {
    if (!vertex_current_) {
      vertex_current_ = vertex_stream_.next();
      if (!vertex_current_) return std::nullopt;
      // Element 0 is the marker; element k >= 1 is complete_[k-1].
      edge_stream_.emplace(iota_vector(static_cast<int>(complete_.size()) + 1));
    }
    auto p = edge_stream_->next();
    if (!p) {
      vertex_current_.reset();
      continue;
    }
    std::vector<int> ground;
    std::vector<int> tags;
    for (std::size_t k = 1; k < p->size(); ++k) {
      if (p->rgs()[k] == 0) continue;
      ground.push_back(complete_[k - 1]);
      tags.push_back(p->rgs()[k]);
    }
    return ColouredGraph(labels_, *vertex_current_, SetPartition::from_labels(ground, tags));
  }
}

void for_each_coloured_graph(Labels labels,
                             const std::function<void(const ColouredGraph&)>& visit,
                             bool override_guard) {
  ColouredGraphStream stream(std::move(labels), override_guard);
  while (auto g = stream.next()) visit(*g);
}

std::vector<ColouredGraph> enumerate_coloured_graphs(Labels labels, bool override_guard) {
  std::vector<ColouredGraph> out;
  for_each_coloured_graph(std::move(labels), [&](const ColouredGraph& g) { out.push_back(g); },
                          override_guard);
  return out;
}

std::vector<IndicatorMatrix> indicator_matrices(const ColouredGraph& g) {
  const int d = g.order();
  std::vector<IndicatorMatrix> out;
  const auto& vc = g.vertex_classes();
  for (int b = 0; b < vc.num_blocks(); ++b) {
    out.push_back({IndicatorMatrix::Kind::vertex, b, Eigen::MatrixXd::Zero(d, d)});
  }
  for (int v = 0; v < d; ++v) out[vc.rgs()[v]].matrix(v, v) = 1.0;
  const auto& ec = g.edge_classes();
  const std::size_t offset = out.size();
  for (int b = 0; b < ec.num_blocks(); ++b) {
    out.push_back({IndicatorMatrix::Kind::edge, b, Eigen::MatrixXd::Zero(d, d)});
  }
  for (std::size_t i = 0; i < ec.size(); ++i) {
    auto [a, b] = g.endpoints(ec.ground()[i]);
    auto& m = out[offset + ec.rgs()[i]].matrix;
    m(a, b) = m(b, a) = 1.0;
  }
  return out;
}

ColouredGraph parse_compact(Labels labels, std::string_view vertex_classes,
                            std::string_view edge_classes) {
  auto split_edge = [&](const std::string& tok) -> std::pair<std::string, std::string> {
    if (auto dash = tok.find('-'); dash != std::string::npos) {
      return {tok.substr(0, dash), tok.substr(dash + 1)};
    }
    // Longest label prefix whose remainder is also a label.
    std::optional<std::pair<std::string, std::string>> best;
    for (const auto& l : labels) {
      if (tok.size() > l.size() && tok.compare(0, l.size(), l) == 0) {
        const std::string rest = tok.substr(l.size());
        if (std::find(labels.begin(), labels.end(), rest) != labels.end() &&
            (!best || l.size() > best->first.size())) {
          best = std::pair{l, rest};
        }
      }
    }
    if (!best) throw std::invalid_argument("cannot split edge token '" + tok + "'");
    return *best;
  };
  std::vector<std::vector<std::string>> vc;
  for (auto part : split_bar(vertex_classes)) {
    auto toks = split_ws(part);
    if (!toks.empty()) vc.push_back(std::move(toks));
  }
  std::vector<std::vector<std::pair<std::string, std::string>>> ec;
  for (auto part : split_bar(edge_classes)) {
    auto toks = split_ws(part);
    if (toks.empty()) continue;
    auto& cls = ec.emplace_back();
    for (const auto& t : toks) cls.push_back(split_edge(t));
  }
  return ColouredGraph::from_classes(std::move(labels), vc, ec);
}

std::string to_compact(const ColouredGraph& g) {
  const auto& L = g.labels();
  const bool single_char = std::all_of(L.begin(), L.end(), [](const auto& s) { return s.size() == 1; });
  std::ostringstream os;
  const auto vb = g.vertex_classes().blocks();
  for (std::size_t b = 0; b < vb.size(); ++b) {
    if (b) os << " | ";
    for (std::size_t i = 0; i < vb[b].size(); ++i) os << (i ? " " : "") << L[vb[b][i]];
  }
  os << " ; ";
  const auto eb = g.edge_classes().blocks();
  for (std::size_t b = 0; b < eb.size(); ++b) {
    if (b) os << " | ";
    for (std::size_t i = 0; i < eb[b].size(); ++i) {
      auto [x, y] = g.endpoints(eb[b][i]);
      os << (i ? " " : "") << L[x] << (single_char ? "" : "-") << L[y];
    }
  }
  return os.str();
}

std::string render_text(const ColouredGraph& g) {
  const auto& L = g.labels();
  std::ostringstream os;
  os << "vertices:";
  const auto vb = g.vertex_classes().blocks();
  std::vector<int> vmark(static_cast<std::size_t>(g.order()), 0);
  int colour = 0;
  for (const auto& blk : vb) {
    if (blk.size() < 2) continue;
    ++colour;
    for (int v : blk) vmark[v] = colour;
  }
  for (int v = 0; v < g.order(); ++v) os << ' ' << L[v] << std::string(vmark[v], '*');
  os << "\nedges:";
  const auto eb = g.edge_classes().blocks();
  colour = 0;
  for (const auto& blk : eb) {
    const int mark = blk.size() < 2 ? 0 : ++colour;
    for (int id : blk) {
      auto [x, y] = g.endpoints(id);
      os << ' ' << L[x] << (mark ? std::string(mark, '-') : std::string("_")) << L[y];
    }
  }
  os << '\n';
  return os.str();
}

}  // namespace symlat

std::size_t std::hash<symlat::ColouredGraph>::operator()(
    const symlat::ColouredGraph& g) const noexcept {
  const std::size_t a = std::hash<symlat::SetPartition>{}(g.vertex_classes());
  const std::size_t b = std::hash<symlat::SetPartition>{}(g.edge_classes());
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}
