#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ieppa/tensor.hpp"

namespace ieppa {

// One constraint block stored as a label map: every entry of the grid carries
// either a row index in [0, m) or kUncovered. Entries in different rows are
// disjoint by construction, which is the binary non-overlap structure the
// solver relies on.
class PartitionBlock {
 public:
  static constexpr std::int32_t kUncovered = -1;

  PartitionBlock() = default;
  // Validates labels range and that every row is non-empty.
  PartitionBlock(Dims dims, std::size_t m, std::vector<std::int32_t> labels);

  const Dims& dims() const { return dims_; }
  std::size_t m() const { return m_; }
  std::int32_t label(std::size_t e) const { return labels_[e]; }
  std::span<const std::int32_t> labels() const { return labels_; }

  // Entries of row j in ascending flat order.
  std::span<const std::uint32_t> row(std::size_t j) const {
    return {entries_.data() + row_ptr_[j], row_ptr_[j + 1] - row_ptr_[j]};
  }
  std::size_t row_size(std::size_t j) const { return row_ptr_[j + 1] - row_ptr_[j]; }
  std::size_t covered_count() const { return entries_.size(); }
  bool fully_covering() const { return entries_.size() == dims_.size(); }

  // Keeps the rows with keep[j] true, renumbered in order; entries of dropped
  // rows become uncovered.
  PartitionBlock RestrictRows(const std::vector<bool>& keep) const;

  // The same partition on a subset of entries: `entry_map[e]` is the new flat
  // index of old entry e, or -1 when e is removed. Rows left empty are
  // dropped, so every remaining row is non-empty.
  PartitionBlock Reindex(Dims new_dims, std::span<const std::int64_t> entry_map) const;

  friend bool operator==(const PartitionBlock& a, const PartitionBlock& b) {
    return a.dims_ == b.dims_ && a.m_ == b.m_ && a.labels_ == b.labels_;
  }

 private:
  Dims dims_{};
  std::size_t m_ = 0;
  std::vector<std::int32_t> labels_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> entries_;
};

PartitionBlock BlockFromIndicators(std::span<const Tensor3> indicators);
std::vector<Tensor3> BlockIndicators(const PartitionBlock& block);

// out[j] = sum of X over row j, accumulated in ascending flat order.
std::vector<double> ApplyBlock(const PartitionBlock& block, const Tensor3& x);
// Entry e gets y[label(e)], uncovered entries get 0.
Tensor3 AdjointBlock(const PartitionBlock& block, std::span<const double> y);
// Entry e gets z[label(e)], uncovered entries get 1.
Tensor3 BulletBlock(const PartitionBlock& block, std::span<const double> z);

// Block i labels (r,s,t) by its i-th coordinate. Two blocks when n3 == 1.
std::vector<PartitionBlock> CmotMarginalBlocks(Dims dims);

struct Direction {
  int v1 = 0;
  int v2 = 0;
  friend bool operator==(const Direction&, const Direction&) = default;
};

// v1 == 1 with any v2, or v2 == +-1 with v1 >= 0; never (0,0).
bool IsAdmissibleDirection(Direction v);

// Lines of the n x n grid parallel to v, rows ordered by the invariant
// v2*x - v1*y with x = column + 1, y = row + 1. Only invariants that occur
// produce rows.
PartitionBlock TomoBlock(std::size_t n, Direction v);

// The LP  min <C,X>  s.t.  apply(B_i, X) = b_i,  0 <= X <= U.
struct Instance {
  Dims dims{};
  Tensor3 cost;
  std::vector<PartitionBlock> blocks;
  std::vector<std::vector<double>> rhs;
  std::optional<Tensor3> upper;  // entries > 0, possibly +inf

  std::size_t block_count() const { return blocks.size(); }
  bool has_upper() const { return upper.has_value(); }

  // Shapes, U > 0, and rhs lengths. With require_positive_rhs a zero or
  // negative right-hand side raises kZeroRhs.
  void Validate(bool require_positive_rhs = true) const;

  // True when the blocks are exactly CmotMarginalBlocks(dims).
  bool IsMarginalStructured() const;
};

// Relative primal feasibility
//   sqrt(sum_i |A_i(X) - b_i|^2) / (1 + sqrt(sum_i |b_i|^2)).
double RelativeFeasibility(const Instance& inst, const Tensor3& x);

}  // namespace ieppa
