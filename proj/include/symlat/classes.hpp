#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symlat/coloured_graph.hpp"
#include "symlat/partition.hpp"

namespace symlat {

/// Bijection of 0..d-1, stored as its image array.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int degree);
  /// Cycle notation over a label list, e.g. "(13)(24)" or "(B1 B2)(L1 L2)".
  /// Multi-character labels inside a cycle are split on whitespace or, if
  /// the cycle has none, by longest label match. "()" is the identity.
  static Permutation parse(std::string_view cycles, const Labels& labels);

  int degree() const noexcept { return static_cast<int>(images_.size()); }
  int operator()(int x) const { return images_[x]; }
  const std::vector<int>& images() const noexcept { return images_; }
  bool is_identity() const;
  Permutation inverse() const;
  /// (a * b)(x) = a(b(x)).
  friend Permutation operator*(const Permutation& a, const Permutation& b);

  std::string to_string(const Labels& labels) const;

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<int> images_;
};

/// Permutation group with its full element list (sorted, identity first).
class PermGroup {
 public:
  PermGroup(std::vector<Permutation> generators, std::vector<Permutation> elements);

  int degree() const noexcept { return elements_.front().degree(); }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::vector<Permutation>& generators() const noexcept { return generators_; }
  const std::vector<Permutation>& elements() const noexcept { return elements_; }
  bool contains(const Permutation& p) const;

  bool operator==(const PermGroup& o) const { return elements_ == o.elements_; }

 private:
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
};

inline constexpr std::size_t kGroupOrderGuard = 40320;  // 8!
inline constexpr int kAutomorphismGuard = 8;
inline constexpr int kSubgroupGuard = 4;

/// Breadth-first closure of the generators under composition.
PermGroup group_closure(const std::vector<Permutation>& generators, int degree);

/// Permutations fixing every vertex class and every edge class setwise.
/// Graphs above kAutomorphismGuard vertices need the override; the group
/// order guard still applies.
PermGroup aut_coloured(const ColouredGraph& g, bool override_guard = false);

/// Colours a graph by the orbits of a group on its vertices and edges.
/// Throws std::invalid_argument if some element does not preserve the edges.
ColouredGraph orbit_colouring(const PermGroup& group, std::shared_ptr<const Labels> labels,
                              const std::vector<int>& edge_ids);
inline ColouredGraph orbit_colouring(const PermGroup& group, const ColouredGraph& shape) {
  return orbit_colouring(group, shape.shared_labels(), shape.edges());
}

bool is_edge_regular(const ColouredGraph& g);
bool is_equitable(const SetPartition& p, const UndirectedGraph& g);
bool is_vertex_regular(const ColouredGraph& g);
bool is_regular(const ColouredGraph& g);
bool is_permutation_generated(const ColouredGraph& g, bool override_guard = false);

/// Coarsest equitable partition finer than p.
SetPartition equitable_refinement(const SetPartition& p, const UndirectedGraph& g);

/// Bipartite vertex/factor representation: one node per edge, linked to the
/// edge's two endpoints.
struct FactorGraph {
  std::shared_ptr<const Labels> labels;
  SetPartition vertex_part;                       // over 0..d-1
  SetPartition node_part;                         // over 0..m-1
  std::vector<std::pair<int, int>> incidences;    // (vertex, node)
};

FactorGraph to_factor_graph(const ColouredGraph& g);
ColouredGraph from_factor_graph(const FactorGraph& f);

ColouredGraph sup_B(const ColouredGraph& g);
ColouredGraph sup_R(const ColouredGraph& g);
ColouredGraph sup_P(const ColouredGraph& g);
ColouredGraph sup_Pi(const ColouredGraph& g, bool override_guard = false);

/// Every subgroup of the symmetric group on the labels.
std::vector<PermGroup> all_subgroups(const Labels& labels);

enum class ModelClass { all, B, P, R, Pi };

ModelClass parse_model_class(std::string_view name);
std::string_view to_string(ModelClass c);
bool in_class(ModelClass c, const ColouredGraph& g);
ColouredGraph supremum(ModelClass c, const ColouredGraph& g);

struct ClassCounts {
  std::size_t total = 0, B = 0, P = 0, R = 0, Pi = 0;
  bool operator==(const ClassCounts&) const = default;
};

/// Classifies every coloured graph on the labels, fanning the work out over
/// `jobs` threads.
ClassCounts classify_all(const Labels& labels, unsigned jobs = 1, bool override_guard = false);

}  // namespace symlat
