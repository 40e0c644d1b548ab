// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "lau/error.hpp"

namespace lau {

// Dense row-major tensor of doubles. Sized for desk-scale models: plain
// loops, no views, no broadcasting.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape)
      : shape_(std::move(shape)), data_(numel_of(shape_), 0.0) {}
  Tensor(std::initializer_list<size_t> shape)
      : Tensor(std::vector<size_t>(shape)) {}

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t i) const { return shape_[i]; }
  size_t numel() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  double& at2(size_t i, size_t j) { return data_[i * shape_[1] + j]; }
  double at2(size_t i, size_t j) const { return data_[i * shape_[1] + j]; }

  double& at3(size_t i, size_t j, size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at3(size_t i, size_t j, size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  static size_t numel_of(const std::vector<size_t>& shape) {
    size_t n = 1;
    for (size_t d : shape) n *= d;
    return n;
  }

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

}  // namespace lau
