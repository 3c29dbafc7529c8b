// Copyright 2026 The lgbg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lgbg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "lgbg/error.hpp"

namespace lgbg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kVocabulary: return "vocabulary error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kEmbedding: return "embedding error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? " x " : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
  for (auto d : shape_)
    if (d == 0) fail(ErrorKind::kDimension, "tensor dimensions must be positive: " + shape_string(shape_));
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_)
    if (d == 0) fail(ErrorKind::kDimension, "tensor dimensions must be positive: " + shape_string(shape_));
  if (shape_size(shape_) != data_.size())
    fail(ErrorKind::kDimension, "tensor data length " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_string(shape_));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != size())
    fail(ErrorKind::kDimension, "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  return Tensor(std::move(shape), data_);
}

void Tensor::require_finite(const char* where) const {
  if (!all_finite())
    fail(ErrorKind::kNumeric, std::string("non-finite value produced by ") + where);
}

namespace kernels {

void linear_nt(std::span<const double> x, std::span<const double> w,
               std::span<double> out, std::size_t n, std::size_t in,
               std::size_t o, bool accumulate) {
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.data() + r * in;
    double* yr = out.data() + r * o;
    for (std::size_t c = 0; c < o; ++c) {
      const double* wc = w.data() + c * in;
      double acc = 0.0;
      for (std::size_t k = 0; k < in; ++k) acc += xr[k] * wc[k];
      yr[c] = accumulate ? yr[c] + acc : acc;
    }
  }
}

void matmul_nn(std::span<const double> a, std::span<const double> b,
               std::span<double> out, std::size_t n, std::size_t k,
               std::size_t m, bool accumulate) {
  if (!accumulate) std::fill(out.begin(), out.begin() + n * m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double* yr = out.data() + r * m;
    for (std::size_t j = 0; j < k; ++j) {
      const double s = a[r * k + j];
      if (s == 0.0) continue;
      const double* bj = b.data() + j * m;
      for (std::size_t c = 0; c < m; ++c) yr[c] += s * bj[c];
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b,
               std::span<double> out, std::size_t n, std::size_t k,
               std::size_t m, bool accumulate) {
  if (!accumulate) std::fill(out.begin(), out.begin() + k * m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* ar = a.data() + r * k;
    const double* br = b.data() + r * m;
    for (std::size_t j = 0; j < k; ++j) {
      const double s = ar[j];
      if (s == 0.0) continue;
      double* yj = out.data() + j * m;
      for (std::size_t c = 0; c < m; ++c) yj[c] += s * br[c];
    }
  }
}

void softmax(std::span<const double> z, std::span<double> out) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - zmax);
    total += out[i];
  }
  for (std::size_t i = 0; i < z.size(); ++i) out[i] /= total;
}

}  // namespace kernels
}  // namespace lgbg
