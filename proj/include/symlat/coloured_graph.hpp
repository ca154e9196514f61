#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symlat/partition.hpp"

namespace symlat {

using Labels = std::vector<std::string>;

/// Plain undirected graph on vertices 0..order-1.
struct UndirectedGraph {
  std::size_t order = 0;
  std::vector<std::pair<int, int>> edges;  // a < b, ascending

  std::vector<std::vector<int>> adjacency() const;
};

/// Undirected graph with a vertex colouring and an edge colouring.
///
/// Vertices are indices into the label list. An edge {a,b} with a < b has id
/// a*d + b where d is the number of vertices, so ascending ids list edges in
/// lexicographic order. The vertex colouring partitions 0..d-1, the edge
/// colouring partitions the edge ids; the edge set is its ground set.
class ColouredGraph {
 public:
  ColouredGraph() = default;
  ColouredGraph(Labels labels, SetPartition vertex_classes, SetPartition edge_classes);
  ColouredGraph(std::shared_ptr<const Labels> labels, SetPartition vertex_classes,
                SetPartition edge_classes);

  /// Build from label-level classes. Edge endpoints may be given in any order.
  static ColouredGraph from_classes(
      Labels labels, const std::vector<std::vector<std::string>>& vertex_classes,
      const std::vector<std::vector<std::pair<std::string, std::string>>>& edge_classes);

  int order() const noexcept { return static_cast<int>(labels_->size()); }
  const Labels& labels() const noexcept { return *labels_; }
  const std::shared_ptr<const Labels>& shared_labels() const noexcept { return labels_; }
  const SetPartition& vertex_classes() const noexcept { return vertex_classes_; }
  const SetPartition& edge_classes() const noexcept { return edge_classes_; }
  const std::vector<int>& edges() const noexcept { return edge_classes_.ground(); }
  std::size_t num_edges() const noexcept { return edge_classes_.size(); }
  /// Number of free parameters of the associated model.
  int num_classes() const noexcept {
    return vertex_classes_.num_blocks() + edge_classes_.num_blocks();
  }

  int edge_id(int a, int b) const;
  std::pair<int, int> endpoints(int id) const;
  bool has_edge(int a, int b) const;
  int index_of(std::string_view label) const;
  UndirectedGraph skeleton() const;
  /// Same edge set, coloured by new partitions.
  ColouredGraph recoloured(SetPartition vertex_classes, SetPartition edge_classes) const;

  /// Structural equality on canonical forms, labels included.
  bool operator==(const ColouredGraph& other) const;
  /// Canonical order on colourings of the same label list.
  bool operator<(const ColouredGraph& other) const;

 private:
  std::shared_ptr<const Labels> labels_ = std::make_shared<const Labels>();
  SetPartition vertex_classes_;
  SetPartition edge_classes_;
};

/// All edge ids of the complete graph on d vertices.
std::vector<int> complete_edge_ids(int d);
/// Edge id of the complete graph on d vertices.
inline int edge_id(int d, int a, int b) { return a < b ? a * d + b : b * d + a; }

bool cg_leq(const ColouredGraph& g, const ColouredGraph& h);
ColouredGraph cg_meet(const ColouredGraph& g, const ColouredGraph& h);
ColouredGraph cg_join(const ColouredGraph& g, const ColouredGraph& h);

ColouredGraph zero(Labels labels);
ColouredGraph unit(Labels labels);
ColouredGraph zero(std::shared_ptr<const Labels> labels);
ColouredGraph unit(std::shared_ptr<const Labels> labels);

/// Labels "1".."n".
Labels numeric_labels(int n);

/// Graphs with more vertices than this are only enumerated on request.
inline constexpr int kEnumerationGuard = 5;

/// Streams every coloured graph on a label list: each vertex partition
/// combined with each partition of (complete edge set + one marker), where
/// the marker's block holds the absent edges.
class ColouredGraphStream {
 public:
  explicit ColouredGraphStream(Labels labels, bool override_guard = false);

  std::optional<ColouredGraph> next();

 private:
  std::shared_ptr<const Labels> labels_;
  std::vector<int> complete_;
  PartitionStream vertex_stream_;
  std::optional<SetPartition> vertex_current_;
  std::optional<PartitionStream> edge_stream_;
};

void for_each_coloured_graph(Labels labels,
                             const std::function<void(const ColouredGraph&)>& visit,
                             bool override_guard = false);
std::vector<ColouredGraph> enumerate_coloured_graphs(Labels labels, bool override_guard = false);

struct IndicatorMatrix {
  enum class Kind { vertex, edge };
  Kind kind;
  int class_index;  // block index within the vertex or edge colouring
  Eigen::MatrixXd matrix;
};

/// One matrix per vertex class, then one per edge class, in block order.
std::vector<IndicatorMatrix> indicator_matrices(const ColouredGraph& g);

/// Compact notation: classes separated by '|', members by whitespace.
/// Edges are written as two labels, either adjacent ("12") or joined by
/// '-' ("B1-L1"). Example: parse_compact(labels, "1 3 | 2 4", "12 34 | 14 23").
ColouredGraph parse_compact(Labels labels, std::string_view vertex_classes,
                            std::string_view edge_classes);

/// Inverse of parse_compact, listing every class.
std::string to_compact(const ColouredGraph& g);

/// Multi-line rendering: vertices of the k-th non-atomic class carry k
/// asterisks, edges of the k-th non-atomic edge class carry k dashes, atomic
/// edges are joined with '_'.
std::string render_text(const ColouredGraph& g);

}  // namespace symlat

template <>
struct std::hash<symlat::ColouredGraph> {
  std::size_t operator()(const symlat::ColouredGraph& g) const noexcept;
};
