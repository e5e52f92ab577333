// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/blocks.hpp"

#include <cmath>
#include <string>

namespace blockopt {

BlockLayout BlockLayout::partition(std::span<const std::size_t> sizes) {
  if (sizes.empty()) {
    throw InvalidLayoutError("block layout needs at least one block");
  }
  BlockLayout layout;
  layout.offsets_.reserve(sizes.size() + 1);
  layout.offsets_.push_back(0);
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] == 0) {
      throw InvalidLayoutError("block " + std::to_string(b) + " is empty");
    }
    layout.offsets_.push_back(layout.offsets_.back() + sizes[b]);
  }
  return layout;
}

std::size_t BlockLayout::offset(std::size_t b) const {
  if (b >= num_blocks()) {
    throw std::out_of_range("block index " + std::to_string(b) + " out of range (B=" +
                            std::to_string(num_blocks()) + ")");
  }
  return offsets_[b];
}

std::size_t BlockLayout::size(std::size_t b) const {
  const std::size_t begin = offset(b);
  return offsets_[b + 1] - begin;
}

std::vector<std::size_t> BlockLayout::sizes() const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < num_blocks(); ++b) out.push_back(size(b));
  return out;
}

BlockedVector::BlockedVector(BlockLayout layout)
    : layout_(std::move(layout)), data_(layout_.total_dim(), Scalar{0}) {}

BlockedVector::BlockedVector(BlockLayout layout, std::vector<Scalar> data)
    : layout_(std::move(layout)), data_(std::move(data)) {
  if (data_.size() != layout_.total_dim()) {
    throw InvalidLayoutError("vector length " + std::to_string(data_.size()) +
                             " does not match layout dimension " +
                             std::to_string(layout_.total_dim()));
  }
}

std::span<Scalar> BlockedVector::block(std::size_t b) {
  return std::span<Scalar>(data_).subspan(layout_.offset(b), layout_.size(b));
}

std::span<const Scalar> BlockedVector::block(std::size_t b) const {
  return std::span<const Scalar>(data_).subspan(layout_.offset(b), layout_.size(b));
}

Scalar l2_norm(std::span<const Scalar> v) {
  Scalar sum = 0;
  for (Scalar x : v) sum += x * x;
  return std::sqrt(sum);
}

Scalar block_norm(const BlockedVector& v, std::size_t b) { return l2_norm(v.block(b)); }

bool all_finite(std::span<const Scalar> v) {
  for (Scalar x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace blockopt
