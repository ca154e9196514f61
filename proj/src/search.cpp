#include "symlat/search.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <random>
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

void require_edge_regular(const ColouredGraph& g) {
  if (!is_edge_regular(g)) throw std::invalid_argument("dual generators need an edge regular graph");
}

void sort_unique(std::vector<ColouredGraph>& models) {
  std::sort(models.begin(), models.end());
  models.erase(std::unique(models.begin(), models.end()), models.end());
}

std::vector<ColouredGraph> reduce(std::vector<ColouredGraph> models, bool keep_max) {
  sort_unique(models);
  // The class count strictly increases along the order, so visiting from the
  // extreme end means a model is dominated iff some kept model dominates it.
  std::vector<std::size_t> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ca = models[a].num_classes(), cb = models[b].num_classes();
    return keep_max ? ca > cb : ca < cb;
  });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return keep_max ? cg_leq(models[i], models[j]) : cg_leq(models[j], models[i]);
    });
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<ColouredGraph> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(std::move(models[i]));
  return out;
}

// Complete graph with atomic edge classes except `merged_edges`, over the
// vertex partition given by `vertex_tags`.
ColouredGraph complete_with(const std::shared_ptr<const Labels>& labels, const std::vector<int>& vertex_tags,
                            const std::vector<int>& merged_edges, int removed_edge = -1) {
  const int d = static_cast<int>(labels->size());
  std::vector<int> ground;
  std::vector<int> tags;
  for (int id : complete_edge_ids(d)) {
    if (id == removed_edge) continue;
    ground.push_back(id);
    const bool merged = std::find(merged_edges.begin(), merged_edges.end(), id) != merged_edges.end();
    tags.push_back(merged ? -1 : id);
  }
  return ColouredGraph(labels, SetPartition::from_labels(iota_vector(d), vertex_tags),
                       SetPartition::from_labels(ground, tags));
}

}  // namespace

std::vector<ColouredGraph> max_reduce(std::vector<ColouredGraph> models) {
  return reduce(std::move(models), true);
}

std::vector<ColouredGraph> min_reduce(std::vector<ColouredGraph> models) {
  return reduce(std::move(models), false);
}

std::vector<ColouredGraph> dual_accept_B(const ColouredGraph& g) {
  require_edge_regular(g);
  const int d = g.order();
  const auto& labels = g.shared_labels();
  std::vector<ColouredGraph> out;
  // Empty graphs with two vertex classes that do not coarsen the colouring.
  PartitionStream stream(iota_vector(d));
  while (auto p = stream.next()) {
    if (p->num_blocks() == 2 && !is_finer(g.vertex_classes(), *p)) {
      out.emplace_back(labels, *p, SetPartition());
    }
  }
  // One vertex class and one edge class not made of the colouring's classes.
  const auto complete = complete_edge_ids(d);
  const auto one_block = SetPartition::single_block(iota_vector(d));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << complete.size()); ++mask) {
    std::vector<int> ids;
    for (std::size_t k = 0; k < complete.size(); ++k)
      if (mask >> k & 1) ids.push_back(complete[k]);
    ColouredGraph a(labels, one_block, SetPartition::single_block(ids));
    if (!cg_leq(a, g)) out.push_back(std::move(a));
  }
  sort_unique(out);
  return out;
}

std::vector<ColouredGraph> dual_reject_B(const ColouredGraph& g) {
  require_edge_regular(g);
  const int d = g.order();
  const auto& labels = g.shared_labels();
  const auto& vc = g.vertex_classes().rgs();
  const auto complete = complete_edge_ids(d);
  std::vector<ColouredGraph> out;
  auto keep = [&](ColouredGraph r) {
    if (!cg_leq(g, r)) out.push_back(std::move(r));
  };
  // Two vertices of different classes merged, everything else atomic.
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (vc[a] == vc[b]) continue;
      auto tags = iota_vector(d);
      tags[b] = a;
      keep(complete_with(labels, tags, {}));
    }
  }
  // Atomic colouring of the complete graph minus one edge of g.
  for (int e : g.edges()) keep(complete_with(labels, iota_vector(d), {}, e));
  // One composite edge class {ac, bd} with a~b and c~d in g's vertex colouring.
  for (std::size_t i = 0; i < complete.size(); ++i) {
    for (std::size_t j = i + 1; j < complete.size(); ++j) {
      const int e1 = complete[i];
      const int e2 = complete[j];
      const int b = e2 / d;
      const int dd = e2 % d;
      for (int flip = 0; flip < 2; ++flip) {
        const int a = flip ? e1 % d : e1 / d;
        const int c = flip ? e1 / d : e1 % d;
        if (vc[a] != vc[b] || vc[c] != vc[dd]) continue;
        auto tags = iota_vector(d);
        auto merge = [&](int x, int y) {
          const int from = tags[y];
          const int to = tags[x];
          for (auto& t : tags)
            if (t == from) t = to;
        };
        merge(a, b);
        merge(c, dd);
        auto r = complete_with(labels, tags, {e1, e2});
        if (is_edge_regular(r)) keep(std::move(r));
      }
    }
  }
  return max_reduce(std::move(out));
}

std::vector<ColouredGraph> dual_set(const std::vector<ColouredGraph>& s, Direction direction,
                                    const SingletonDual& singleton, const BinaryOp& combine) {
  if (s.empty()) throw std::invalid_argument("dual of an empty model set");
  std::vector<ColouredGraph> current = singleton(s.front());
  for (std::size_t k = 1; k < s.size(); ++k) {
    const auto next = singleton(s[k]);
    std::vector<ColouredGraph> combined;
    for (const auto& a : current) {
      // A member that already avoids s[k] stays; its combinations lie on the
      // wrong side of it and would be reduced away.
      const bool avoids = direction == Direction::reject ? !cg_leq(s[k], a) : !cg_leq(a, s[k]);
      if (avoids) {
        combined.push_back(a);
        continue;
      }
      for (const auto& b : next) combined.push_back(combine(a, b));
    }
    current = direction == Direction::reject ? max_reduce(std::move(combined))
                                             : min_reduce(std::move(combined));
  }
  return direction == Direction::reject ? max_reduce(std::move(current))
                                        : min_reduce(std::move(current));
}

ExplicitLattice::ExplicitLattice(std::vector<ColouredGraph> members) : members_(std::move(members)) {
  sort_unique(members_);
  const std::size_t n = members_.size();
  up_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) up_[i][j] = i == j || cg_leq(members_[i], members_[j]);
}

std::optional<std::size_t> ExplicitLattice::index_of(const ColouredGraph& g) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), g);
  if (it == members_.end() || !(*it == g)) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

std::vector<ColouredGraph> brute_force_duals(const ExplicitLattice& lattice,
                                             const std::vector<ColouredGraph>& s,
                                             Direction direction) {
  const auto& m = lattice.members();
  // Candidates: members containing no s-member (reject) or contained in none (accept).
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool clash = false;
    for (const auto& x : s) {
      clash = direction == Direction::reject ? cg_leq(x, m[i]) : cg_leq(m[i], x);
      if (clash) break;
    }
    if (!clash) cand.push_back(i);
  }
  std::vector<ColouredGraph> out;
  for (auto i : cand) {
    bool extreme = true;
    for (auto j : cand) {
      if (i == j) continue;
      if (direction == Direction::reject ? lattice.leq(i, j) : lattice.leq(j, i)) {
        extreme = false;
        break;
      }
    }
    if (extreme) out.push_back(m[i]);
  }
  return out;
}

std::vector<ColouredGraph> enumerate_B_lattice(const Labels& labels) {
  std::vector<ColouredGraph> out;
  for_each_coloured_graph(labels, [&](const ColouredGraph& g) {
    if (is_edge_regular(g)) out.push_back(g);
  });
  return out;
}

std::vector<ColouredGraph> enumerate_Pi_lattice(const Labels& labels) {
  if (labels.size() != 4) {
    throw GuardExceeded("the Pi lattice is only enumerated for four labels");
  }
  auto shared = std::make_shared<const Labels>(labels);
  const auto complete = complete_edge_ids(4);
  std::vector<ColouredGraph> out;
  for (const auto& group : all_subgroups(labels)) {
    const auto full = orbit_colouring(group, shared, complete);
    const auto orbits = full.edge_classes().blocks();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << orbits.size()); ++mask) {
      std::vector<int> ids;
      for (std::size_t k = 0; k < orbits.size(); ++k)
        if (mask >> k & 1) ids.insert(ids.end(), orbits[k].begin(), orbits[k].end());
      out.push_back(orbit_colouring(group, shared, ids));
    }
  }
  sort_unique(out);
  return out;
}

ModelTest make_lrt_test(GaussianData data, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  auto shared = std::make_shared<const GaussianData>(std::move(data));
  return [shared, alpha](const ColouredGraph& g) {
    TestOutcome out;
    try {
      auto fit = fit_rcon(g, *shared);
      if (!fit.converged) {
        out.flagged = true;
        out.reason = "fit did not converge";
      } else {
        out.accept = lrt_vs_saturated(fit, alpha).accept;
      }
      out.fit = std::move(fit);
    } catch (const MleNonexistence& e) {
      out.flagged = true;
      out.reason = e.what();
    } catch (const DomainError& e) {
      out.flagged = true;
      out.reason = e.what();
    }
    return out;
  };
}

SetDual reject_dual_for(ModelClass lattice, const Labels& labels) {
  switch (lattice) {
    case ModelClass::B:
      return [](const std::vector<ColouredGraph>& s) {
        return dual_set(s, Direction::reject, dual_reject_B, cg_meet);
      };
    case ModelClass::Pi: {
      auto explicit_lattice = std::make_shared<const ExplicitLattice>(enumerate_Pi_lattice(labels));
      return [explicit_lattice](const std::vector<ColouredGraph>& s) {
        return brute_force_duals(*explicit_lattice, s, Direction::reject);
      };
    }
    default:
      throw std::invalid_argument("search is only defined over the B and Pi lattices");
  }
}

const TestOutcome* SearchTrace::outcome_of(const ColouredGraph& g) const {
  for (const auto& stage : stages)
    for (const auto& rec : stage.tested)
      if (rec.graph == g) return &rec.outcome;
  return nullptr;
}

SearchTrace eh_search(const Labels& labels, const ModelTest& test, const SearchOptions& options) {
  const auto dual = reject_dual_for(options.lattice, labels);
  SearchTrace trace;
  std::vector<ColouredGraph> accepted;
  std::vector<ColouredGraph> rejected;
  std::map<ColouredGraph, bool> seen;
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));

  // Tests one stage; returns the number of accepted candidates.
  auto run_stage = [&](std::vector<ColouredGraph> batch) {
    std::sort(batch.begin(), batch.end());
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), 0);
    if (options.shuffle_seed) std::shuffle(order.begin(), order.end(), rng);
    std::vector<TestOutcome> results(batch.size());
    parallel_for(batch.size(), options.jobs,
                 [&](std::size_t k) { results[order[k]] = test(batch[order[k]]); });
    Stage stage;
    std::size_t n_accepted = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      seen[batch[i]] = results[i].accept;
      trace.any_flagged = trace.any_flagged || results[i].flagged;
      (results[i].accept ? accepted : rejected).push_back(batch[i]);
      n_accepted += results[i].accept;
      stage.tested.push_back({batch[i], std::move(results[i])});
    }
    trace.models_tested += batch.size();
    trace.stages.push_back(std::move(stage));
    accepted = min_reduce(std::move(accepted));
    rejected = max_reduce(std::move(rejected));
    return n_accepted;
  };

  auto initial = options.initial;
  if (initial.empty()) initial.push_back(unit(labels));
  if (run_stage(initial) == 0) {
    trace.max_rejected = rejected;
    return trace;
  }
  while (true) {
    std::vector<ColouredGraph> batch;
    for (auto& c : dual(accepted)) {
      if (seen.count(c)) continue;
      // Below a rejected model: rejected by coherence without a fit.
      const bool implied = std::any_of(rejected.begin(), rejected.end(),
                                       [&](const auto& r) { return cg_leq(c, r); });
      if (!implied) batch.push_back(std::move(c));
    }
    if (batch.empty() || run_stage(std::move(batch)) == 0) break;
  }
  trace.min_accepted = accepted;
  trace.max_rejected = rejected;
  return trace;
}

bool coherent(const SearchTrace& trace) {
  std::vector<ColouredGraph> acc, rej;
  for (const auto& stage : trace.stages)
    for (const auto& rec : stage.tested) (rec.outcome.accept ? acc : rej).push_back(rec.graph);
  for (const auto& a : acc)
    for (const auto& r : rej)
      if (cg_leq(a, r)) return false;
  return true;
}

}  // namespace symlat
