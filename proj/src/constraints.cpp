#include "ieppa/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "ieppa/error.hpp"
#include "ieppa/kernels.hpp"

namespace ieppa {

PartitionBlock::PartitionBlock(Dims dims, std::size_t m,
                               std::vector<std::int32_t> labels)
    : dims_(dims), m_(m), labels_(std::move(labels)) {
  if (labels_.size() != dims.size()) {
    Fail(ErrorKind::kDimensionMismatch, "block labels length does not match dims");
  }
  if (m == 0) Fail(ErrorKind::kInvalidArgument, "block must have at least one row");
  if (dims.size() > UINT32_MAX) Fail(ErrorKind::kSizeGuard, "tensor too large");
  std::vector<std::size_t> counts(m, 0);
  for (auto l : labels_) {
    if (l == kUncovered) continue;
    if (l < 0 || static_cast<std::size_t>(l) >= m) {
      Fail(ErrorKind::kInvalidArgument, "block label " + std::to_string(l) +
                                            " outside [0," + std::to_string(m) + ")");
    }
    ++counts[l];
  }
  row_ptr_.assign(m + 1, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (counts[j] == 0) {
      Fail(ErrorKind::kInvalidArgument, "block row " + std::to_string(j) + " is empty");
    }
    row_ptr_[j + 1] = row_ptr_[j] + counts[j];
  }
  entries_.resize(row_ptr_[m]);
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    const auto l = labels_[e];
    if (l != kUncovered) entries_[fill[l]++] = static_cast<std::uint32_t>(e);
  }
}

PartitionBlock PartitionBlock::RestrictRows(const std::vector<bool>& keep) const {
  if (keep.size() != m_) Fail(ErrorKind::kDimensionMismatch, "restrict_rows: mask length");
  std::vector<std::int32_t> renum(m_, kUncovered);
  std::int32_t next = 0;
  for (std::size_t j = 0; j < m_; ++j) {
    if (keep[j]) renum[j] = next++;
  }
  if (next == 0) Fail(ErrorKind::kInvalidArgument, "restrict_rows: no rows kept");
  std::vector<std::int32_t> labels(labels_.size());
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    labels[e] = labels_[e] == kUncovered ? kUncovered : renum[labels_[e]];
  }
  return PartitionBlock(dims_, static_cast<std::size_t>(next), std::move(labels));
}

PartitionBlock PartitionBlock::Reindex(Dims new_dims,
                                       std::span<const std::int64_t> entry_map) const {
  if (entry_map.size() != labels_.size()) {
    Fail(ErrorKind::kDimensionMismatch, "reindex: map length");
  }
  std::vector<bool> used(m_, false);
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    if (entry_map[e] >= 0 && labels_[e] != kUncovered) used[labels_[e]] = true;
  }
  std::vector<std::int32_t> renum(m_, kUncovered);
  std::int32_t next = 0;
  for (std::size_t j = 0; j < m_; ++j) {
    if (used[j]) renum[j] = next++;
  }
  if (next == 0) Fail(ErrorKind::kInvalidArgument, "reindex: no rows remain");
  std::vector<std::int32_t> labels(new_dims.size(), kUncovered);
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    const auto to = entry_map[e];
    if (to < 0) continue;
    if (static_cast<std::size_t>(to) >= labels.size()) {
      Fail(ErrorKind::kInvalidArgument, "reindex: target out of range");
    }
    labels[to] = labels_[e] == kUncovered ? kUncovered : renum[labels_[e]];
  }
  return PartitionBlock(new_dims, static_cast<std::size_t>(next), std::move(labels));
}

PartitionBlock BlockFromIndicators(std::span<const Tensor3> indicators) {
  if (indicators.empty()) Fail(ErrorKind::kInvalidArgument, "no indicator tensors");
  const Dims dims = indicators.front().dims();
  std::vector<std::int32_t> labels(dims.size(), PartitionBlock::kUncovered);
  for (std::size_t j = 0; j < indicators.size(); ++j) {
    const Tensor3& t = indicators[j];
    RequireSameDims(t, indicators.front(), "block_from_indicators");
    bool any = false;
    for (std::size_t e = 0; e < t.size(); ++e) {
      const double v = t[e];
      if (v == 0.0) continue;
      if (v != 1.0) {
        Fail(ErrorKind::kAssumptionViolated,
             "indicator " + std::to_string(j) + " has non-binary entry");
      }
      if (labels[e] != PartitionBlock::kUncovered) {
        Fail(ErrorKind::kAssumptionViolated,
             "indicators " + std::to_string(labels[e]) + " and " + std::to_string(j) +
                 " overlap at entry " + std::to_string(e));
      }
      labels[e] = static_cast<std::int32_t>(j);
      any = true;
    }
    if (!any) {
      Fail(ErrorKind::kAssumptionViolated, "indicator " + std::to_string(j) + " is empty");
    }
  }
  return PartitionBlock(dims, indicators.size(), std::move(labels));
}

std::vector<Tensor3> BlockIndicators(const PartitionBlock& block) {
  std::vector<Tensor3> out(block.m(), Tensor3::Zeros(block.dims()));
  for (std::size_t j = 0; j < block.m(); ++j) {
    for (auto e : block.row(j)) out[j][e] = 1.0;
  }
  return out;
}

std::vector<double> ApplyBlock(const PartitionBlock& block, const Tensor3& x) {
  if (x.dims() != block.dims()) Fail(ErrorKind::kDimensionMismatch, "apply_block: dims");
  std::vector<double> out(block.m());
  kernels::parallel::BlockSum(block, x.values(), out);
  return out;
}

Tensor3 AdjointBlock(const PartitionBlock& block, std::span<const double> y) {
  if (y.size() != block.m()) Fail(ErrorKind::kDimensionMismatch, "adjoint_block: length");
  Tensor3 out = Tensor3::Zeros(block.dims());
  kernels::parallel::AddRows(block, y, 1.0, out.values());
  return out;
}

Tensor3 BulletBlock(const PartitionBlock& block, std::span<const double> z) {
  if (z.size() != block.m()) Fail(ErrorKind::kDimensionMismatch, "bullet_block: length");
  Tensor3 out = Tensor3::Ones(block.dims());
  kernels::parallel::ScaleRows(block, z, out.values());
  return out;
}

std::vector<PartitionBlock> CmotMarginalBlocks(Dims dims) {
  if (dims.size() == 0) Fail(ErrorKind::kInvalidArgument, "dims must be positive");
  const int count = dims.n3 == 1 ? 2 : 3;
  std::vector<PartitionBlock> blocks;
  for (int axis = 0; axis < count; ++axis) {
    std::vector<std::int32_t> labels(dims.size());
    for (std::size_t e = 0; e < labels.size(); ++e) {
      labels[e] = static_cast<std::int32_t>(dims.coords(e)[axis]);
    }
    blocks.emplace_back(dims, dims.extent(axis), std::move(labels));
  }
  return blocks;
}

bool IsAdmissibleDirection(Direction v) {
  if (v.v1 == 0 && v.v2 == 0) return false;
  if (v.v1 == 1) return true;
  return (v.v2 == 1 || v.v2 == -1) && v.v1 >= 0;
}

PartitionBlock TomoBlock(std::size_t n, Direction v) {
  if (n == 0) Fail(ErrorKind::kInvalidArgument, "tomo_block: n must be positive");
  if (!IsAdmissibleDirection(v)) {
    Fail(ErrorKind::kInvalidArgument, "direction (" + std::to_string(v.v1) + "," +
                                          std::to_string(v.v2) +
                                          ") is not of the form (1,p), (1,-p), (p,1), (p,-1)");
  }
  const Dims dims{n, n, 1};
  std::vector<long long> inv(dims.size());
  std::map<long long, std::int32_t> rows;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const long long x = static_cast<long long>(c) + 1;
      const long long y = static_cast<long long>(r) + 1;
      const long long key = v.v2 * x - v.v1 * y;
      inv[dims.flat(r, c, 0)] = key;
      rows.emplace(key, 0);
    }
  }
  std::int32_t next = 0;
  for (auto& [key, idx] : rows) idx = next++;
  std::vector<std::int32_t> labels(dims.size());
  for (std::size_t e = 0; e < labels.size(); ++e) labels[e] = rows.at(inv[e]);
  return PartitionBlock(dims, rows.size(), std::move(labels));
}

void Instance::Validate(bool require_positive_rhs) const {
  if (dims.size() == 0) Fail(ErrorKind::kInvalidArgument, "instance dims must be positive");
  if (cost.dims() != dims) Fail(ErrorKind::kDimensionMismatch, "cost dims");
  if (blocks.empty()) Fail(ErrorKind::kInvalidArgument, "instance needs at least one block");
  if (rhs.size() != blocks.size()) {
    Fail(ErrorKind::kDimensionMismatch, "rhs count does not match block count");
  }
  for (double c : cost.values()) {
    if (!std::isfinite(c)) Fail(ErrorKind::kInvalidArgument, "cost entries must be finite");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].dims() != dims) {
      Fail(ErrorKind::kDimensionMismatch, "block " + std::to_string(i) + " dims");
    }
    if (rhs[i].size() != blocks[i].m()) {
      Fail(ErrorKind::kDimensionMismatch, "rhs " + std::to_string(i) + " length");
    }
    for (std::size_t j = 0; j < rhs[i].size(); ++j) {
      const double b = rhs[i][j];
      if (!std::isfinite(b)) Fail(ErrorKind::kInvalidArgument, "rhs must be finite");
      if (b < 0.0) Fail(ErrorKind::kInvalidArgument, "rhs must be nonnegative");
      if (require_positive_rhs && b <= 0.0) {
        Fail(ErrorKind::kZeroRhs,
             "block " + std::to_string(i) + " row " + std::to_string(j) +
                 " has zero right-hand side; drop empty lines when generating "
                 "projections (the tomo front end does this)");
      }
    }
  }
  if (upper) {
    if (upper->dims() != dims) Fail(ErrorKind::kDimensionMismatch, "upper dims");
    for (double u : upper->values()) {
      if (!(u > 0.0)) Fail(ErrorKind::kInvalidArgument, "upper bound entries must be > 0");
    }
  }
}

bool Instance::IsMarginalStructured() const {
  const bool two = dims.n3 == 1;
  if (blocks.size() != (two ? 2u : 3u)) return false;
  for (std::size_t axis = 0; axis < blocks.size(); ++axis) {
    const auto& b = blocks[axis];
    if (b.dims() != dims || b.m() != dims.extent(static_cast<int>(axis))) return false;
    for (std::size_t e = 0; e < dims.size(); ++e) {
      if (static_cast<std::size_t>(b.label(e)) != dims.coords(e)[axis] ||
          b.label(e) == PartitionBlock::kUncovered) {
        return false;
      }
    }
  }
  return true;
}

double RelativeFeasibility(const Instance& inst, const Tensor3& x) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
    const auto r = ApplyBlock(inst.blocks[i], x);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double d = r[j] - inst.rhs[i][j];
      num += d * d;
      den += inst.rhs[i][j] * inst.rhs[i][j];
    }
  }
  return std::sqrt(num) / (1.0 + std::sqrt(den));
}

}  // namespace ieppa
