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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lgbg/param_set.hpp"
#include "lgbg/tensor.hpp"

namespace lgbg {

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const noexcept { return id != kInvalid; }
};

// Constant sparse matrix in compressed-row form (used for normalized edge
// weights). Row i lists the (column, weight) pairs that feed output row i.
struct SparseRows {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return val.size(); }
};

// Reverse-mode tape. Operations are recorded in call order; backward replays
// their adjoints in exact reverse order. A value consumed by several
// operations receives the sum of their adjoint contributions.
//
// A tape is single-owner: use one tape per thread. Parameter leaves refer to
// the ParamSet's storage, which must outlive the tape and stay unmodified
// while it is in use.
class Tape {
 public:
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  bool recording() const noexcept { return record_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  Var constant(Tensor value);
  // Leaf bound to params.value(id). Repeated calls return the same leaf.
  Var parameter(const ParamSet& params, ParamId id);

  const Tensor& value(Var v) const;
  // Adjoint of v after backward(); zero tensor if v received none.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  // --- operations -------------------------------------------------------
  Var add(Var a, Var b);
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  // x [in] or [n x in], w [out x in] -> [out] or [n x out]; y = x w^T.
  Var linear(Var x, Var w);
  // a [n x k], b [k x m] -> [n x m].
  Var matmul(Var a, Var b);
  // y = s x for a constant sparse s (rows of x are gathered and weighted).
  Var spmm(const SparseRows& s, Var x);
  Var slice_rows(Var x, std::size_t begin, std::size_t end);
  Var gather_rows(Var x, std::span<const std::size_t> rows);
  Var concat_rows(std::span<const Var> parts);
  Var concat_cols(Var a, Var b);
  // Concatenates vectors into one vector.
  Var concat(std::span<const Var> parts);
  Var reshape(Var x, Shape shape);
  // Softmax over a vector, or over each row of a matrix. Max-subtracted.
  Var softmax(Var z);
  // [n x m] -> [m]
  Var sum_rows(Var x);
  // Sum of all entries -> scalar.
  Var sum(Var x);
  // -log(max(p[label], floor)). Increments *clamp_count when clamped.
  Var nll(Var probs, std::size_t label, double floor = 1e-12,
          std::size_t* clamp_count = nullptr);
  // Mean over columns of the population variance of each column -> scalar.
  Var mean_column_variance(Var x);

  // --- backward ---------------------------------------------------------
  // root must be a single-element value; seeds it with 1.
  void backward(Var root);
  // Seeds several values with explicit adjoints, then replays.
  void backward(std::span<const std::pair<Var, Tensor>> seeds);

  // Adjoints accumulated at parameter leaves, laid out like `params`.
  Gradients param_grads(const ParamSet& params) const;

  // Node ids in the order the last backward pass visited them.
  const std::vector<std::size_t>& backward_order() const noexcept { return order_; }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool requires_grad = false;
    std::ptrdiff_t param = -1;
    std::function<void(Tape&, std::size_t)> backward;
  };

  const Tensor& val(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  Tensor& grad_mut(std::size_t id);
  const Tensor& grad_ref(std::size_t id) const { return nodes_[id].grad; }
  bool needs(std::size_t id) const { return nodes_[id].requires_grad; }

  Var push(Tensor value, const char* op, std::initializer_list<std::size_t> inputs,
           std::function<void(Tape&, std::size_t)> backward);
  Var push(Tensor value, const char* op, const std::vector<std::size_t>& inputs,
           std::function<void(Tape&, std::size_t)> backward);
  void replay();

  bool record_;
  std::vector<Node> nodes_;
  std::vector<std::pair<ParamId, std::size_t>> param_leaves_;
  std::vector<std::size_t> order_;
};

}  // namespace lgbg
