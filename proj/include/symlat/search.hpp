#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symlat/classes.hpp"
#include "symlat/coloured_graph.hpp"
#include "symlat/gaussian.hpp"

namespace symlat {

enum class Direction { accept, reject };

/// Distinct graphs with no member strictly above another.
std::vector<ColouredGraph> max_reduce(std::vector<ColouredGraph> models);
/// Distinct graphs with no member strictly below another.
std::vector<ColouredGraph> min_reduce(std::vector<ColouredGraph> models);

/// Minimal edge regular models not below g. Requires g edge regular.
std::vector<ColouredGraph> dual_accept_B(const ColouredGraph& g);
/// Maximal edge regular models not above g. Requires g edge regular.
std::vector<ColouredGraph> dual_reject_B(const ColouredGraph& g);

using SingletonDual = std::function<std::vector<ColouredGraph>(const ColouredGraph&)>;
using BinaryOp = std::function<ColouredGraph(const ColouredGraph&, const ColouredGraph&)>;

/// Dual of a set by folding singleton duals: pairwise meets reduced to
/// maximal elements (reject) or class joins reduced to minimal ones (accept).
std::vector<ColouredGraph> dual_set(const std::vector<ColouredGraph>& s, Direction direction,
                                    const SingletonDual& singleton, const BinaryOp& combine);

/// A finite lattice held as an explicit member list with its order matrix.
class ExplicitLattice {
 public:
  explicit ExplicitLattice(std::vector<ColouredGraph> members);

  const std::vector<ColouredGraph>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool leq(std::size_t i, std::size_t j) const { return up_[i][j]; }
  std::optional<std::size_t> index_of(const ColouredGraph& g) const;

 private:
  std::vector<ColouredGraph> members_;
  std::vector<std::vector<bool>> up_;  // up_[i][j] iff members_[i] <= members_[j]
};

std::vector<ColouredGraph> brute_force_duals(const ExplicitLattice& lattice,
                                             const std::vector<ColouredGraph>& s,
                                             Direction direction);

/// Edge regular colourings of all graphs on the labels.
std::vector<ColouredGraph> enumerate_B_lattice(const Labels& labels);
/// Permutation-generated colourings on four labels: orbit colourings of
/// the complete graph under every subgroup, closed under deleting edge classes.
std::vector<ColouredGraph> enumerate_Pi_lattice(const Labels& labels);

struct TestOutcome {
  bool accept = false;
  bool flagged = false;  // fit failed; treated as a rejection
  std::string reason;
  std::optional<FitResult> fit;
};

using ModelTest = std::function<TestOutcome(const ColouredGraph&)>;

/// Likelihood ratio test against the saturated model.
ModelTest make_lrt_test(GaussianData data, double alpha);

struct CandidateRecord {
  ColouredGraph graph;
  TestOutcome outcome;
};

struct Stage {
  std::vector<CandidateRecord> tested;  // canonical order
};

struct SearchTrace {
  std::vector<Stage> stages;  // stage 0 holds the initial models
  std::vector<ColouredGraph> min_accepted;
  std::vector<ColouredGraph> max_rejected;
  std::size_t models_tested = 0;
  bool any_flagged = false;

  const TestOutcome* outcome_of(const ColouredGraph& g) const;
};

struct SearchOptions {
  ModelClass lattice = ModelClass::B;
  unsigned jobs = 1;
  /// When set, candidates within a stage are evaluated in a shuffled order.
  std::optional<std::uint64_t> shuffle_seed;
  /// Initial models; defaults to the saturated model.
  std::vector<ColouredGraph> initial;
};

using SetDual = std::function<std::vector<ColouredGraph>(const std::vector<ColouredGraph>&)>;

/// Rejection dual of a model set inside the search lattice: the B generators
/// folded with meets, or a brute-force scan of the enumerated Pi lattice
/// (four labels only).
SetDual reject_dual_for(ModelClass lattice, const Labels& labels);

SearchTrace eh_search(const Labels& labels, const ModelTest& test, const SearchOptions& options);

/// True iff no accepted model lies below a rejected one.
bool coherent(const SearchTrace& trace);

}  // namespace symlat
