#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "symlat/classes.hpp"
#include "symlat/coloured_graph.hpp"

#ifndef SYMLAT_FIXTURES_DIR
#define SYMLAT_FIXTURES_DIR "fixtures"
#endif

namespace symlat::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SYMLAT_FIXTURES_DIR) / name;
}

inline const std::vector<ColouredGraph>& all_graphs(int d) {
  static std::vector<std::vector<ColouredGraph>> cache(6);
  auto& slot = cache.at(static_cast<std::size_t>(d));
  if (slot.empty()) slot = enumerate_coloured_graphs(numeric_labels(d));
  return slot;
}

inline std::vector<ColouredGraph> sample(const std::vector<ColouredGraph>& pool, std::size_t k,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ColouredGraph> out;
  out.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t i = 0; i < k; ++i) out.push_back(pool[pick(rng)]);
  return out;
}

/// Least element of {x in pool : pred(x)}, or nothing if the set has no
/// least element under cg_leq.
inline std::optional<ColouredGraph> least(const std::vector<ColouredGraph>& pool,
                                          const std::function<bool(const ColouredGraph&)>& pred) {
  std::vector<const ColouredGraph*> hits;
  for (const auto& x : pool)
    if (pred(x)) hits.push_back(&x);
  for (const auto* c : hits) {
    if (std::all_of(hits.begin(), hits.end(), [&](const ColouredGraph* o) { return cg_leq(*c, *o); }))
      return *c;
  }
  return std::nullopt;
}

inline std::optional<ColouredGraph> greatest(const std::vector<ColouredGraph>& pool,
                                             const std::function<bool(const ColouredGraph&)>& pred) {
  std::vector<const ColouredGraph*> hits;
  for (const auto& x : pool)
    if (pred(x)) hits.push_back(&x);
  for (const auto* c : hits) {
    if (std::all_of(hits.begin(), hits.end(), [&](const ColouredGraph* o) { return cg_leq(*o, *c); }))
      return *c;
  }
  return std::nullopt;
}

/// Brute-force least member of a class above g.
inline std::optional<ColouredGraph> least_in_class_above(ModelClass cls, const ColouredGraph& g) {
  return least(all_graphs(g.order()),
               [&](const ColouredGraph& h) { return cg_leq(g, h) && in_class(cls, h); });
}

inline std::vector<ColouredGraph> sorted(std::vector<ColouredGraph> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline bool contains(const std::vector<ColouredGraph>& v, const ColouredGraph& g) {
  return std::find(v.begin(), v.end(), g) != v.end();
}

}  // namespace symlat::testing
