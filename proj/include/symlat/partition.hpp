#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace symlat {

using BigInt = boost::multiprecision::cpp_int;

/// Partition of a finite set of integer ids.
///
/// The ground set is kept sorted and each element carries the index of its
/// block, numbered in order of first appearance (a restricted-growth string).
/// This makes the representation canonical: blocks are ordered by their least
/// member, so structural equality is partition equality.
class SetPartition {
 public:
  SetPartition() = default;

  /// Throws std::invalid_argument unless `blocks` partition `ground` exactly.
  SetPartition(std::vector<int> ground, const std::vector<std::vector<int>>& blocks);

  /// Ground set taken as the union of the blocks.
  static SetPartition from_blocks(const std::vector<std::vector<int>>& blocks);
  /// `labels[i]` is an arbitrary block tag for `ground[i]`.
  static SetPartition from_labels(std::vector<int> ground, std::span<const int> labels);
  static SetPartition discrete(std::vector<int> ground);
  static SetPartition single_block(std::vector<int> ground);

  const std::vector<int>& ground() const noexcept { return ground_; }
  /// Block index of each ground element, in ground order.
  const std::vector<int>& rgs() const noexcept { return rgs_; }
  std::size_t size() const noexcept { return ground_.size(); }
  bool empty() const noexcept { return ground_.empty(); }
  int num_blocks() const noexcept { return num_blocks_; }

  std::vector<std::vector<int>> blocks() const;
  std::optional<std::size_t> position(int element) const;
  bool contains(int element) const { return position(element).has_value(); }
  /// Throws std::out_of_range for elements outside the ground set.
  int block_of(int element) const;
  bool same_block(int a, int b) const { return block_of(a) == block_of(b); }

  /// Restriction to a sorted subset of the ground set.
  SetPartition restrict_to(std::span<const int> subset) const;

  std::string to_string() const;

  bool operator==(const SetPartition&) const = default;
  auto operator<=>(const SetPartition&) const = default;

 private:
  SetPartition(std::vector<int> ground, std::vector<int> rgs, int num_blocks)
      : ground_(std::move(ground)), rgs_(std::move(rgs)), num_blocks_(num_blocks) {}

  friend class PartitionStream;
  friend SetPartition partition_meet(const SetPartition&, const SetPartition&);
  friend SetPartition partition_join(const SetPartition&, const SetPartition&);

  std::vector<int> ground_;
  std::vector<int> rgs_;
  int num_blocks_ = 0;
};

/// True iff every block of `q` is a union of blocks of `p`.
bool is_finer(const SetPartition& p, const SetPartition& q);
/// Common refinement: nonempty intersections of blocks.
SetPartition partition_meet(const SetPartition& p, const SetPartition& q);
/// Finest common coarsening.
SetPartition partition_join(const SetPartition& p, const SetPartition& q);

/// Streams every partition of a ground set in restricted-growth
/// lexicographic order without materializing the list.
class PartitionStream {
 public:
  explicit PartitionStream(std::vector<int> ground);

  std::optional<SetPartition> next();

 private:
  bool advance();

  std::vector<int> ground_;
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;
  bool started_ = false;
  bool done_ = false;
};

inline PartitionStream all_partitions(std::vector<int> ground) {
  return PartitionStream(std::move(ground));
}

void for_each_partition(std::vector<int> ground,
                        const std::function<void(const SetPartition&)>& visit);

/// Bell number B_d by the binomial recursion.
BigInt bell(unsigned d);
/// Least integer above the truncated Dobinski sum of the first 2d terms.
BigInt dobinski_bell(unsigned d);
/// Number of coloured graphs on v vertices: B_v * B_{v(v-1)/2 + 1}.
BigInt model_count(unsigned v);

}  // namespace symlat

template <>
struct std::hash<symlat::SetPartition> {
  std::size_t operator()(const symlat::SetPartition& p) const noexcept;
};
