#include "symlat/partition.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "symlat/error.hpp"

namespace symlat {
namespace {

void require_sorted_unique(const std::vector<int>& ground) {
  for (std::size_t i = 1; i < ground.size(); ++i) {
    if (ground[i - 1] >= ground[i]) {
      throw std::invalid_argument("partition ground set must be strictly ascending");
    }
  }
}

void require_same_ground(const SetPartition& p, const SetPartition& q) {
  if (p.ground() != q.ground()) {
    throw GroundMismatch("partitions are over different ground sets: " + p.to_string() +
                         " vs " + q.to_string());
  }
}

// Relabel block tags by order of first appearance.
std::pair<std::vector<int>, int> canonical_rgs(std::span<const int> labels) {
  std::vector<int> out(labels.size());
  std::vector<std::pair<int, int>> seen;  // (tag, id), small
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& s) { return s.first == labels[i]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[i], next);
      out[i] = next++;
    } else {
      out[i] = it->second;
    }
  }
  return {std::move(out), next};
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

SetPartition::SetPartition(std::vector<int> ground, const std::vector<std::vector<int>>& blocks) {
  std::sort(ground.begin(), ground.end());
  require_sorted_unique(ground);
  std::vector<int> tag(ground.size(), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw std::invalid_argument("partition block is empty");
    for (int e : blocks[b]) {
      auto it = std::lower_bound(ground.begin(), ground.end(), e);
      if (it == ground.end() || *it != e) {
        throw std::invalid_argument("partition block element " + std::to_string(e) +
                                    " is not in the ground set");
      }
      auto pos = static_cast<std::size_t>(it - ground.begin());
      if (tag[pos] != -1) {
        throw std::invalid_argument("partition element " + std::to_string(e) +
                                    " appears in more than one block");
      }
      tag[pos] = static_cast<int>(b);
    }
  }
  if (std::find(tag.begin(), tag.end(), -1) != tag.end()) {
    throw std::invalid_argument("partition blocks do not cover the ground set");
  }
  auto [rgs, count] = canonical_rgs(tag);
  ground_ = std::move(ground);
  rgs_ = std::move(rgs);
  num_blocks_ = count;
}

SetPartition SetPartition::from_blocks(const std::vector<std::vector<int>>& blocks) {
  std::vector<int> ground;
  for (const auto& b : blocks) ground.insert(ground.end(), b.begin(), b.end());
  std::sort(ground.begin(), ground.end());
  if (std::adjacent_find(ground.begin(), ground.end()) != ground.end()) {
    throw std::invalid_argument("partition blocks overlap");
  }
  return SetPartition(std::move(ground), blocks);
}

SetPartition SetPartition::from_labels(std::vector<int> ground, std::span<const int> labels) {
  if (ground.size() != labels.size()) {
    throw std::invalid_argument("partition label count differs from ground size");
  }
  require_sorted_unique(ground);
  auto [rgs, count] = canonical_rgs(labels);
  return SetPartition(std::move(ground), std::move(rgs), count);
}

SetPartition SetPartition::discrete(std::vector<int> ground) {
  require_sorted_unique(ground);
  std::vector<int> rgs(ground.size());
  std::iota(rgs.begin(), rgs.end(), 0);
  const int n = static_cast<int>(ground.size());
  return SetPartition(std::move(ground), std::move(rgs), n);
}

SetPartition SetPartition::single_block(std::vector<int> ground) {
  require_sorted_unique(ground);
  std::vector<int> rgs(ground.size(), 0);
  const int n = ground.empty() ? 0 : 1;
  return SetPartition(std::move(ground), std::move(rgs), n);
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_blocks_));
  for (std::size_t i = 0; i < ground_.size(); ++i) out[rgs_[i]].push_back(ground_[i]);
  return out;
}

std::optional<std::size_t> SetPartition::position(int element) const {
  auto it = std::lower_bound(ground_.begin(), ground_.end(), element);
  if (it == ground_.end() || *it != element) return std::nullopt;
  return static_cast<std::size_t>(it - ground_.begin());
}

int SetPartition::block_of(int element) const {
  auto pos = position(element);
  if (!pos) throw std::out_of_range("element " + std::to_string(element) + " not in partition");
  return rgs_[*pos];
}

SetPartition SetPartition::restrict_to(std::span<const int> subset) const {
  std::vector<int> ground(subset.begin(), subset.end());
  std::vector<int> labels;
  labels.reserve(ground.size());
  for (int e : ground) labels.push_back(block_of(e));
  return from_labels(std::move(ground), labels);
}

std::string SetPartition::to_string() const {
  std::ostringstream os;
  os << '[';
  const auto bs = blocks();
  for (std::size_t b = 0; b < bs.size(); ++b) {
    if (b) os << ',';
    os << '[';
    for (std::size_t i = 0; i < bs[b].size(); ++i) os << (i ? "," : "") << bs[b][i];
    os << ']';
  }
  os << ']';
  return os.str();
}

bool is_finer(const SetPartition& p, const SetPartition& q) {
  require_same_ground(p, q);
  if (p.num_blocks() < q.num_blocks()) return false;
  // Each p-block must sit inside a single q-block.
  thread_local std::vector<int> target;
  target.assign(static_cast<std::size_t>(p.num_blocks()), -1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    int& t = target[p.rgs()[i]];
    if (t == -1) {
      t = q.rgs()[i];
    } else if (t != q.rgs()[i]) {
      return false;
    }
  }
  return true;
}

SetPartition partition_meet(const SetPartition& p, const SetPartition& q) {
  require_same_ground(p, q);
  const auto nq = static_cast<std::size_t>(q.num_blocks());
  std::vector<int> id(static_cast<std::size_t>(p.num_blocks()) * nq, -1);
  std::vector<int> rgs(p.size());
  int next = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    int& slot = id[static_cast<std::size_t>(p.rgs()[i]) * nq + q.rgs()[i]];
    if (slot == -1) slot = next++;
    rgs[i] = slot;
  }
  return SetPartition(p.ground(), std::move(rgs), next);
}

SetPartition partition_join(const SetPartition& p, const SetPartition& q) {
  require_same_ground(p, q);
  const std::size_t n = p.size();
  UnionFind uf(n);
  std::vector<int> first_p(static_cast<std::size_t>(p.num_blocks()), -1);
  std::vector<int> first_q(static_cast<std::size_t>(q.num_blocks()), -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int ii = static_cast<int>(i);
    int& fp = first_p[p.rgs()[i]];
    int& fq = first_q[q.rgs()[i]];
    if (fp == -1) fp = ii; else uf.unite(fp, ii);
    if (fq == -1) fq = ii; else uf.unite(fq, ii);
  }
  std::vector<int> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = uf.find(static_cast<int>(i));
  auto [rgs, count] = canonical_rgs(roots);
  return SetPartition(p.ground(), std::move(rgs), count);
}

PartitionStream::PartitionStream(std::vector<int> ground) : ground_(std::move(ground)) {
  require_sorted_unique(ground_);
  rgs_.assign(ground_.size(), 0);
  prefix_max_.assign(ground_.size(), 0);
}

bool PartitionStream::advance() {
  const std::size_t n = rgs_.size();
  for (std::size_t i = n; i-- > 1;) {
    if (rgs_[i] <= prefix_max_[i - 1]) {
      ++rgs_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], rgs_[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        rgs_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::optional<SetPartition> PartitionStream::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
  } else if (!advance()) {
    done_ = true;
    return std::nullopt;
  }
  const int blocks = rgs_.empty() ? 0 : prefix_max_.back() + 1;
  return SetPartition(ground_, rgs_, blocks);
}

void for_each_partition(std::vector<int> ground,
                        const std::function<void(const SetPartition&)>& visit) {
  PartitionStream stream(std::move(ground));
  while (auto p = stream.next()) visit(*p);
}

BigInt bell(unsigned d) {
  // B_{m+1} = sum_k C(m,k) B_k, with the binomial row updated in place.
  std::vector<BigInt> b{1};
  std::vector<BigInt> row{1};
  for (unsigned m = 0; m < d; ++m) {
    BigInt next = 0;
    for (unsigned k = 0; k <= m; ++k) next += row[k] * b[k];
    b.push_back(next);
    row.push_back(1);
    for (unsigned k = m; k >= 1; --k) row[k] += row[k - 1];
  }
  return b[d];
}

BigInt dobinski_bell(unsigned d) {
  using Real = boost::multiprecision::cpp_dec_float_100;
  Real sum = 0;
  Real factorial = 1;
  for (unsigned k = 0; k < 2 * d; ++k) {
    if (k > 0) factorial *= k;
    sum += boost::multiprecision::pow(Real(k), d) / factorial;
  }
  sum /= boost::multiprecision::exp(Real(1));
  return BigInt(boost::multiprecision::floor(sum)) + 1;
}

BigInt model_count(unsigned v) {
  if (v == 0) throw std::invalid_argument("model_count needs at least one vertex");
  return bell(v) * bell(v * (v - 1) / 2 + 1);
}

}  // namespace symlat

std::size_t std::hash<symlat::SetPartition>::operator()(
    const symlat::SetPartition& p) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&](int v) { h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (int g : p.ground()) mix(g);
  for (int r : p.rgs()) mix(r);
  return h;
}
