/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sessrank::neural {

// Dense row-major matrix of doubles. Vectors are n x 1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Tensor&) const = default;
};

// y += W x. Four rows at a time so the dot products run as independent
// accumulation chains.
inline void gemv_add(const Tensor& w, std::span<const double> x,
                     std::span<double> y) {
  assert(x.size() == w.cols && y.size() == w.rows);
  const std::size_t n = w.cols;
  std::size_t i = 0;
  for (; i + 4 <= w.rows; i += 4) {
    const double* r0 = w.data.data() + i * n;
    const double* r1 = r0 + n;
    const double* r2 = r1 + n;
    const double* r3 = r2 + n;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = x[j];
      a0 += r0[j] * xj;
      a1 += r1[j] * xj;
      a2 += r2[j] * xj;
      a3 += r3[j] * xj;
    }
    y[i] += a0;
    y[i + 1] += a1;
    y[i + 2] += a2;
    y[i + 3] += a3;
  }
  for (; i < w.rows; ++i) {
    const double* row = w.data.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

// x += W^T d
inline void gemv_t_add(const Tensor& w, std::span<const double> d,
                       std::span<double> x) {
  assert(d.size() == w.rows && x.size() == w.cols);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    const double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) x[j] += di * row[j];
  }
}

// W += d x^T
inline void outer_add(std::span<const double> d, std::span<const double> x,
                      Tensor& w) {
  assert(d.size() == w.rows && x.size() == w.cols);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) row[j] += di * x[j];
  }
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace sessrank::neural
