// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Block-partitioned parameter and gradient storage.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace blockopt {

using Scalar = double;

class InvalidLayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered partition of [0, d) into contiguous, non-empty blocks.
class BlockLayout {
 public:
  BlockLayout() = default;

  /// Builds a layout whose block b has sizes[b] elements, in input order.
  /// Throws InvalidLayoutError on an empty list or a zero size.
  static BlockLayout partition(std::span<const std::size_t> sizes);
  static BlockLayout partition(std::initializer_list<std::size_t> sizes) {
    return partition(std::span<const std::size_t>(sizes.begin(), sizes.size()));
  }

  std::size_t num_blocks() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t total_dim() const { return offsets_.empty() ? 0 : offsets_.back(); }

  /// First index of block b. Throws std::out_of_range.
  std::size_t offset(std::size_t b) const;
  std::size_t size(std::size_t b) const;
  std::vector<std::size_t> sizes() const;

  bool operator==(const BlockLayout&) const = default;

 private:
  std::vector<std::size_t> offsets_;
};

/// A flat length-d vector viewed through a BlockLayout.
class BlockedVector {
 public:
  BlockedVector() = default;
  explicit BlockedVector(BlockLayout layout);
  BlockedVector(BlockLayout layout, std::vector<Scalar> data);

  static BlockedVector zeros(const BlockLayout& layout) { return BlockedVector(layout); }

  const BlockLayout& layout() const { return layout_; }
  std::size_t num_blocks() const { return layout_.num_blocks(); }
  std::size_t size() const { return data_.size(); }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }
  const std::vector<Scalar>& values() const { return data_; }

  Scalar& operator[](std::size_t i) { return data_[i]; }
  Scalar operator[](std::size_t i) const { return data_[i]; }

  /// Read/write window over block b. Throws std::out_of_range.
  std::span<Scalar> block(std::size_t b);
  std::span<const Scalar> block(std::size_t b) const;

  bool operator==(const BlockedVector&) const = default;

 private:
  BlockLayout layout_;
  std::vector<Scalar> data_;
};

/// Euclidean norm, accumulated left to right.
Scalar l2_norm(std::span<const Scalar> v);

/// ||v_b||_2. Throws std::out_of_range when b >= B.
Scalar block_norm(const BlockedVector& v, std::size_t b);

bool all_finite(std::span<const Scalar> v);

}  // namespace blockopt
