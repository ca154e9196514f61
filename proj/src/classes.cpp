#include "symlat/classes.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "symlat/error.hpp"
#include "symlat/parallel.hpp"

namespace symlat {
namespace {

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void check_aut_guard(const ColouredGraph& g, bool override_guard) {
  if (!override_guard && g.order() > kAutomorphismGuard) {
    throw GuardExceeded("automorphism computation limited to " +
                        std::to_string(kAutomorphismGuard) + " vertices, got " +
                        std::to_string(g.order()));
  }
}

// Edge-class index for every ordered vertex pair, -1 for non-edges.
std::vector<int> edge_class_table(const ColouredGraph& g) {
  const int d = g.order();
  std::vector<int> table(static_cast<std::size_t>(d) * d, -1);
  const auto& ec = g.edge_classes();
  for (std::size_t i = 0; i < ec.size(); ++i) {
    auto [a, b] = g.endpoints(ec.ground()[i]);
    table[a * d + b] = table[b * d + a] = ec.rgs()[i];
  }
  return table;
}

std::vector<int> split_label_run(std::string_view run, const Labels& labels) {
  std::vector<int> out;
  auto index = [&](std::string_view s) {
    auto it = std::find(labels.begin(), labels.end(), s);
    if (it == labels.end()) throw ParseError("", "unknown label '" + std::string(s) + "' in cycle");
    return static_cast<int>(it - labels.begin());
  };
  const bool spaced = run.find_first_of(" \t,") != std::string_view::npos;
  if (spaced) {
    std::string token;
    for (char c : std::string(run) + " ") {
      if (c == ' ' || c == '\t' || c == ',') {
        if (!token.empty()) out.push_back(index(token));
        token.clear();
      } else {
        token += c;
      }
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < run.size()) {
    std::size_t best = 0;
    int best_index = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& l = labels[i];
      if (l.size() > best && run.compare(pos, l.size(), l) == 0) {
        best = l.size();
        best_index = static_cast<int>(i);
      }
    }
    if (best_index < 0) {
      throw ParseError("", "cannot match a label at '" + std::string(run.substr(pos)) + "'");
    }
    out.push_back(best_index);
    pos += best;
  }
  return out;
}

}  // namespace

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int x : images_) {
    if (x < 0 || x >= degree() || seen[x]) throw std::invalid_argument("not a permutation");
    seen[x] = 1;
  }
}

Permutation Permutation::identity(int degree) { return Permutation(iota_vector(degree)); }

Permutation Permutation::parse(std::string_view cycles, const Labels& labels) {
  auto images = iota_vector(static_cast<int>(labels.size()));
  std::vector<char> moved(images.size(), 0);
  std::size_t pos = 0;
  while (pos < cycles.size()) {
    const char c = cycles[pos];
    if (c == ' ' || c == '\t') {
      ++pos;
      continue;
    }
    if (c != '(') throw ParseError("position " + std::to_string(pos), "expected '('");
    const auto close = cycles.find(')', pos);
    if (close == std::string_view::npos) {
      throw ParseError("position " + std::to_string(pos), "unterminated cycle");
    }
    const auto cycle = split_label_run(cycles.substr(pos + 1, close - pos - 1), labels);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (moved[cycle[i]]) throw ParseError("", "label repeated across cycles");
      moved[cycle[i]] = 1;
      images[cycle[i]] = cycle[(i + 1) % cycle.size()];
    }
    pos = close + 1;
  }
  return Permutation(std::move(images));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < degree(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (int i = 0; i < degree(); ++i) inv[images_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw GroundMismatch("composing permutations of different degree");
  std::vector<int> out(a.images_.size());
  for (int i = 0; i < a.degree(); ++i) out[i] = a.images_[b.images_[i]];
  Permutation p;
  p.images_ = std::move(out);
  return p;
}

std::string Permutation::to_string(const Labels& labels) const {
  const bool single_char =
      std::all_of(labels.begin(), labels.end(), [](const auto& s) { return s.size() == 1; });
  std::ostringstream os;
  std::vector<char> done(images_.size(), 0);
  for (int start = 0; start < degree(); ++start) {
    if (done[start] || images_[start] == start) continue;
    os << '(';
    for (int x = start, first = 1; !done[x]; x = images_[x], first = 0) {
      done[x] = 1;
      if (!first && !single_char) os << ' ';
      os << labels[x];
    }
    os << ')';
  }
  const auto s = os.str();
  return s.empty() ? "()" : s;
}

PermGroup::PermGroup(std::vector<Permutation> generators, std::vector<Permutation> elements)
    : generators_(std::move(generators)), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  if (elements_.empty() || !elements_.front().is_identity()) {
    throw std::invalid_argument("group element list must contain the identity");
  }
}

bool PermGroup::contains(const Permutation& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

PermGroup group_closure(const std::vector<Permutation>& generators, int degree) {
  for (const auto& g : generators) {
    if (g.degree() != degree) throw GroundMismatch("generator degree differs from group degree");
  }
  std::set<Permutation> seen{Permutation::identity(degree)};
  std::deque<Permutation> queue{Permutation::identity(degree)};
  while (!queue.empty()) {
    const Permutation x = queue.front();
    queue.pop_front();
    for (const auto& s : generators) {
      Permutation y = s * x;
      if (seen.insert(y).second) {
        if (seen.size() > kGroupOrderGuard) {
          throw GuardExceeded("group closure exceeds " + std::to_string(kGroupOrderGuard) +
                              " elements");
        }
        queue.push_back(std::move(y));
      }
    }
  }
  return PermGroup(generators, std::vector<Permutation>(seen.begin(), seen.end()));
}

PermGroup aut_coloured(const ColouredGraph& g, bool override_guard) {
  check_aut_guard(g, override_guard);
  const int d = g.order();
  const auto& vc = g.vertex_classes().rgs();
  const auto table = edge_class_table(g);
  std::vector<int> sigma(static_cast<std::size_t>(d), -1);
  std::vector<char> used(static_cast<std::size_t>(d), 0);
  std::vector<Permutation> found;

  // Extend sigma one vertex at a time; every image must stay in the same
  // vertex class and every pair must keep its edge class.
  auto extend = [&](auto&& self, int k) -> void {
    if (k == d) {
      found.emplace_back(sigma);
      if (found.size() > kGroupOrderGuard) {
        throw GuardExceeded("automorphism group exceeds " + std::to_string(kGroupOrderGuard) +
                            " elements");
      }
      return;
    }
    for (int c = 0; c < d; ++c) {
      if (used[c] || vc[c] != vc[k]) continue;
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) ok = table[j * d + k] == table[sigma[j] * d + c];
      if (!ok) continue;
      sigma[k] = c;
      used[c] = 1;
      self(self, k + 1);
      used[c] = 0;
    }
    sigma[k] = -1;
  };
  extend(extend, 0);
  auto gens = found;
  return PermGroup(std::move(gens), std::move(found));
}

ColouredGraph orbit_colouring(const PermGroup& group, std::shared_ptr<const Labels> labels,
                              const std::vector<int>& edge_ids) {
  const int d = static_cast<int>(labels->size());
  if (group.degree() != d) throw GroundMismatch("group degree differs from vertex count");
  std::vector<int> sorted_edges(edge_ids);
  std::sort(sorted_edges.begin(), sorted_edges.end());
  auto edge_index = [&](int id) {
    auto it = std::lower_bound(sorted_edges.begin(), sorted_edges.end(), id);
    return (it != sorted_edges.end() && *it == id) ? static_cast<int>(it - sorted_edges.begin())
                                                   : -1;
  };
  // Orbit representative = least image under the group.
  std::vector<int> vtag(static_cast<std::size_t>(d));
  for (int v = 0; v < d; ++v) {
    int least = v;
    for (const auto& s : group.elements()) least = std::min(least, s(v));
    vtag[v] = least;
  }
  std::vector<int> etag(sorted_edges.size());
  for (std::size_t i = 0; i < sorted_edges.size(); ++i) {
    const int a = sorted_edges[i] / d;
    const int b = sorted_edges[i] % d;
    int least = sorted_edges[i];
    for (const auto& s : group.elements()) {
      const int img = edge_id(d, s(a), s(b));
      if (edge_index(img) < 0) {
        throw std::invalid_argument("group element " + s.to_string(*labels) +
                                    " does not preserve the edge set");
      }
      least = std::min(least, img);
    }
    etag[i] = least;
  }
  return ColouredGraph(std::move(labels), SetPartition::from_labels(iota_vector(d), vtag),
                       SetPartition::from_labels(sorted_edges, etag));
}

bool is_edge_regular(const ColouredGraph& g) {
  const auto& vc = g.vertex_classes().rgs();
  const auto& ec = g.edge_classes();
  std::vector<std::pair<int, int>> pair_of(static_cast<std::size_t>(ec.num_blocks()), {-1, -1});
  for (std::size_t i = 0; i < ec.size(); ++i) {
    auto [a, b] = g.endpoints(ec.ground()[i]);
    const std::pair<int, int> p = std::minmax(vc[a], vc[b]);
    auto& slot = pair_of[ec.rgs()[i]];
    if (slot.first < 0) {
      slot = p;
    } else if (slot != p) {
      return false;
    }
  }
  return true;
}

bool is_equitable(const SetPartition& p, const UndirectedGraph& g) {
  if (p.ground() != iota_vector(static_cast<int>(g.order))) {
    throw GroundMismatch("partition does not cover the graph's vertices");
  }
  const auto nb = static_cast<std::size_t>(p.num_blocks());
  std::vector<int> counts(g.order * nb, 0);
  for (auto [a, b] : g.edges) {
    ++counts[a * nb + p.rgs()[b]];
    ++counts[b * nb + p.rgs()[a]];
  }
  std::vector<int> rep(nb, -1);
  for (std::size_t v = 0; v < g.order; ++v) {
    int& r = rep[p.rgs()[v]];
    if (r < 0) {
      r = static_cast<int>(v);
      continue;
    }
    if (!std::equal(counts.begin() + v * nb, counts.begin() + (v + 1) * nb,
                    counts.begin() + r * nb)) {
      return false;
    }
  }
  return true;
}

bool is_vertex_regular(const ColouredGraph& g) {
  const auto& ec = g.edge_classes();
  std::vector<UndirectedGraph> layers(static_cast<std::size_t>(ec.num_blocks()),
                                      UndirectedGraph{static_cast<std::size_t>(g.order()), {}});
  for (std::size_t i = 0; i < ec.size(); ++i) {
    layers[ec.rgs()[i]].edges.push_back(g.endpoints(ec.ground()[i]));
  }
  return std::all_of(layers.begin(), layers.end(),
                     [&](const auto& layer) { return is_equitable(g.vertex_classes(), layer); });
}

bool is_regular(const ColouredGraph& g) { return is_edge_regular(g) && is_vertex_regular(g); }

bool is_permutation_generated(const ColouredGraph& g, bool override_guard) {
  return sup_Pi(g, override_guard) == g;
}

SetPartition equitable_refinement(const SetPartition& p, const UndirectedGraph& g) {
  if (p.ground() != iota_vector(static_cast<int>(g.order))) {
    throw GroundMismatch("partition does not cover the graph's vertices");
  }
  const auto adj = g.adjacency();
  SetPartition current = p;
  while (true) {
    const auto nb = static_cast<std::size_t>(current.num_blocks());
    const auto& rgs = current.rgs();
    std::vector<std::vector<int>> sig(g.order, std::vector<int>(nb, 0));
    for (std::size_t v = 0; v < g.order; ++v)
      for (int w : adj[v]) ++sig[v][rgs[w]];
    // Split the first block (in canonical order) whose members disagree.
    int split = -1;
    std::vector<int> first(nb, -1);
    for (std::size_t v = 0; v < g.order && split < 0; ++v) {
      int& f = first[rgs[v]];
      if (f < 0) f = static_cast<int>(v);
      else if (sig[v] != sig[f]) split = rgs[v];
    }
    if (split < 0) return current;
    std::map<std::vector<int>, int> sub;
    std::vector<int> tags(g.order);
    for (std::size_t v = 0; v < g.order; ++v) {
      if (rgs[v] != split) {
        tags[v] = rgs[v];
        continue;
      }
      auto [it, inserted] = sub.emplace(sig[v], static_cast<int>(nb + sub.size()));
      tags[v] = it->second;
    }
    current = SetPartition::from_labels(current.ground(), tags);
  }
}

FactorGraph to_factor_graph(const ColouredGraph& g) {
  FactorGraph f{g.shared_labels(), g.vertex_classes(),
                SetPartition::from_labels(iota_vector(static_cast<int>(g.num_edges())),
                                          g.edge_classes().rgs()),
                {}};
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    auto [a, b] = g.endpoints(g.edges()[k]);
    f.incidences.emplace_back(a, static_cast<int>(k));
    f.incidences.emplace_back(b, static_cast<int>(k));
  }
  return f;
}

ColouredGraph from_factor_graph(const FactorGraph& f) {
  const int d = static_cast<int>(f.labels->size());
  const std::size_t m = f.node_part.size();
  std::vector<std::vector<int>> ends(m);
  for (auto [v, node] : f.incidences) {
    if (v < 0 || v >= d || node < 0 || static_cast<std::size_t>(node) >= m) {
      throw std::invalid_argument("factor graph incidence out of range");
    }
    ends[node].push_back(v);
  }
  std::vector<int> ids(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (ends[k].size() != 2 || ends[k][0] == ends[k][1]) {
      throw std::invalid_argument("factor node " + std::to_string(k) +
                                  " must join exactly two distinct vertices");
    }
    ids[k] = edge_id(d, ends[k][0], ends[k][1]);
  }
  // Sort nodes by edge id so the edge partition is built in ground order.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return ids[x] < ids[y]; });
  std::vector<int> ground, tags;
  for (auto k : order) {
    if (!ground.empty() && ground.back() == ids[k]) {
      throw std::invalid_argument("factor graph has two nodes for one edge");
    }
    ground.push_back(ids[k]);
    tags.push_back(f.node_part.rgs()[k]);
  }
  return ColouredGraph(f.labels, f.vertex_part, SetPartition::from_labels(ground, tags));
}

ColouredGraph sup_B(const ColouredGraph& g) {
  const auto& vc = g.vertex_classes();
  const auto& ec = g.edge_classes();
  const int nb = vc.num_blocks();
  std::vector<int> tags(ec.size());
  for (std::size_t i = 0; i < ec.size(); ++i) {
    auto [a, b] = g.endpoints(ec.ground()[i]);
    auto [x, y] = std::minmax(vc.rgs()[a], vc.rgs()[b]);
    tags[i] = (ec.rgs()[i] * nb + x) * nb + y;
  }
  return g.recoloured(vc, SetPartition::from_labels(ec.ground(), tags));
}

ColouredGraph sup_R(const ColouredGraph& g) {
  const int d = g.order();
  const auto m = g.num_edges();
  const auto& vc = g.vertex_classes();
  // Vertices and factor nodes start in disjoint tag ranges, so refinement
  // never mixes the two sides.
  UndirectedGraph fg{static_cast<std::size_t>(d) + m, {}};
  std::vector<int> tags(fg.order);
  for (int v = 0; v < d; ++v) tags[v] = vc.rgs()[v];
  for (std::size_t k = 0; k < m; ++k) {
    tags[d + k] = vc.num_blocks() + g.edge_classes().rgs()[k];
    auto [a, b] = g.endpoints(g.edges()[k]);
    fg.edges.emplace_back(a, d + static_cast<int>(k));
    fg.edges.emplace_back(b, d + static_cast<int>(k));
  }
  std::sort(fg.edges.begin(), fg.edges.end());
  const auto refined = equitable_refinement(
      SetPartition::from_labels(iota_vector(static_cast<int>(fg.order)), tags), fg);
  const auto& r = refined.rgs();
  return g.recoloured(
      SetPartition::from_labels(iota_vector(d), std::span(r.data(), static_cast<std::size_t>(d))),
      SetPartition::from_labels(g.edges(), std::span(r.data() + d, m)));
}

ColouredGraph sup_P(const ColouredGraph& g) {
  return g.recoloured(sup_R(g).vertex_classes(), g.edge_classes());
}

ColouredGraph sup_Pi(const ColouredGraph& g, bool override_guard) {
  return orbit_colouring(aut_coloured(g, override_guard), g);
}

std::vector<PermGroup> all_subgroups(const Labels& labels) {
  const int d = static_cast<int>(labels.size());
  if (d > kSubgroupGuard) {
    throw GuardExceeded("subgroup enumeration limited to " + std::to_string(kSubgroupGuard) +
                        " labels, got " + std::to_string(d));
  }
  std::map<std::vector<Permutation>, PermGroup> groups;
  auto perm = iota_vector(d);
  do {
    auto g = group_closure({Permutation(perm)}, d);
    groups.emplace(g.elements(), g);
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Every subgroup is generated by its cyclic subgroups, so closing the set
  // under pairwise joins reaches all of them.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<PermGroup> current;
    for (const auto& [key, g] : groups) current.push_back(g);
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        auto gens = current[i].generators();
        gens.insert(gens.end(), current[j].generators().begin(), current[j].generators().end());
        auto joined = group_closure(gens, d);
        if (groups.emplace(joined.elements(), joined).second) grew = true;
      }
    }
  }
  std::vector<PermGroup> out;
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.order() < b.order(); });
  return out;
}

ModelClass parse_model_class(std::string_view name) {
  if (name == "B") return ModelClass::B;
  if (name == "P") return ModelClass::P;
  if (name == "R") return ModelClass::R;
  if (name == "Pi") return ModelClass::Pi;
  if (name == "all") return ModelClass::all;
  throw std::invalid_argument("unknown model class '" + std::string(name) +
                              "' (expected B, P, R, Pi or all)");
}

std::string_view to_string(ModelClass c) {
  switch (c) {
    case ModelClass::B: return "B";
    case ModelClass::P: return "P";
    case ModelClass::R: return "R";
    case ModelClass::Pi: return "Pi";
    case ModelClass::all: return "all";
  }
  return "?";
}

bool in_class(ModelClass c, const ColouredGraph& g) {
  switch (c) {
    case ModelClass::B: return is_edge_regular(g);
    case ModelClass::P: return is_vertex_regular(g);
    case ModelClass::R: return is_regular(g);
    case ModelClass::Pi: return is_permutation_generated(g);
    case ModelClass::all: return true;
  }
  return false;
}

ColouredGraph supremum(ModelClass c, const ColouredGraph& g) {
  switch (c) {
    case ModelClass::B: return sup_B(g);
    case ModelClass::P: return sup_P(g);
    case ModelClass::R: return sup_R(g);
    case ModelClass::Pi: return sup_Pi(g);
    case ModelClass::all: return g;
  }
  return g;
}

ClassCounts classify_all(const Labels& labels, unsigned jobs, bool override_guard) {
  const auto graphs = enumerate_coloured_graphs(labels, override_guard);
  std::vector<unsigned char> flags(graphs.size());
  parallel_for(graphs.size(), jobs, [&](std::size_t i) {
    const auto& g = graphs[i];
    const bool b = is_edge_regular(g);
    const bool p = is_vertex_regular(g);
    const bool pi = is_permutation_generated(g);
    flags[i] = static_cast<unsigned char>(b | (p << 1) | ((b && p) << 2) | (pi << 3));
  });
  ClassCounts c;
  c.total = graphs.size();
  for (auto f : flags) {
    c.B += f & 1;
    c.P += (f >> 1) & 1;
    c.R += (f >> 2) & 1;
    c.Pi += (f >> 3) & 1;
  }
  return c;
}

}  // namespace symlat
