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

#include "lgbg/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    fail(ErrorKind::kDimension, std::string(op) + ": shape mismatch " +
                                    shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2)
    fail(ErrorKind::kDimension, std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

void add_into(Tensor& dst, std::span<const double> src, double factor = 1.0) {
  auto d = dst.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * src[i];
}

}  // namespace

Tensor& Tape::grad_mut(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(val(id).shape(), 0.0);
  return n.grad;
}

Var Tape::push(Tensor value, const char* op, std::initializer_list<std::size_t> inputs,
               std::function<void(Tape&, std::size_t)> backward) {
  return push(std::move(value), op, std::vector<std::size_t>(inputs), std::move(backward));
}

Var Tape::push(Tensor value, const char* op, const std::vector<std::size_t>& inputs,
               std::function<void(Tape&, std::size_t)> backward) {
  value.require_finite(op);
  Node node;
  node.value = std::move(value);
  if (record_) {
    node.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                     [&](std::size_t i) { return nodes_[i].requires_grad; });
    if (node.requires_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
  value.require_finite("constant");
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(const ParamSet& params, ParamId id) {
  for (const auto& [pid, node] : param_leaves_)
    if (pid == id) return Var{node};
  Node node;
  node.external = &params.value(id);
  node.requires_grad = record_;
  node.param = static_cast<std::ptrdiff_t>(id);
  nodes_.push_back(std::move(node));
  param_leaves_.emplace_back(id, nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const { return val(v.id); }

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.grad.empty() ? Tensor(val(v.id).shape(), 0.0) : n.grad;
}

Var Tape::add(Var a, Var b) {
  const Tensor& x = val(a.id);
  const Tensor& y = val(b.id);
  require_same_shape(x, y, "add");
  Tensor out = x;
  add_into(out, y.data());
  return push(std::move(out), "add", {a.id, b.id}, [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.grad_ref(self);
    if (t.needs(a.id)) add_into(t.grad_mut(a.id), g.data());
    if (t.needs(b.id)) add_into(t.grad_mut(b.id), g.data());
  });
}

Var Tape::scale(Var a, double factor) {
  Tensor out = val(a.id);
  for (auto& v : out.data()) v *= factor;
  return push(std::move(out), "scale", {a.id}, [a, factor](Tape& t, std::size_t self) {
    add_into(t.grad_mut(a.id), t.grad_ref(self).data(), factor);
  });
}

Var Tape::tanh(Var a) {
  Tensor out = val(a.id);
  for (auto& v : out.data()) v = std::tanh(v);
  return push(std::move(out), "tanh", {a.id}, [a](Tape& t, std::size_t self) {
    const auto y = t.val(self).data();
    const auto g = t.grad_ref(self).data();
    auto dx = t.grad_mut(a.id).data();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::sigmoid(Var a) {
  Tensor out = val(a.id);
  for (auto& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(out), "sigmoid", {a.id}, [a](Tape& t, std::size_t self) {
    const auto y = t.val(self).data();
    const auto g = t.grad_ref(self).data();
    auto dx = t.grad_mut(a.id).data();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::linear(Var x, Var w) {
  const Tensor& xv = val(x.id);
  const Tensor& wv = val(w.id);
  require_matrix(wv, "linear");
  if (xv.rank() > 2 || xv.cols() != wv.cols())
    fail(ErrorKind::kDimension, "linear: input " + shape_string(xv.shape()) +
                                    " incompatible with weight " + shape_string(wv.shape()));
  const std::size_t n = xv.rows(), in = wv.cols(), o = wv.rows();
  Tensor out(xv.rank() == 1 ? Shape{o} : Shape{n, o});
  kernels::linear_nt(xv.data(), wv.data(), out.data(), n, in, o, false);
  return push(std::move(out), "linear", {x.id, w.id}, [x, w, n, in, o](Tape& t, std::size_t self) {
    const auto g = t.grad_ref(self).data();
    if (t.needs(x.id))  // dx[n x in] += g[n x o] w[o x in]
      kernels::matmul_nn(g, t.val(w.id).data(), t.grad_mut(x.id).data(), n, o, in, true);
    if (t.needs(w.id))  // dw[o x in] += g^T[o x n] x[n x in]
      kernels::matmul_tn(g, t.val(x.id).data(), t.grad_mut(w.id).data(), n, o, in, true);
  });
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& av = val(a.id);
  const Tensor& bv = val(b.id);
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  if (av.cols() != bv.rows())
    fail(ErrorKind::kDimension, "matmul: " + shape_string(av.shape()) + " x " + shape_string(bv.shape()));
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out({n, m});
  kernels::matmul_nn(av.data(), bv.data(), out.data(), n, k, m, false);
  return push(std::move(out), "matmul", {a.id, b.id}, [a, b, n, k, m](Tape& t, std::size_t self) {
    const auto g = t.grad_ref(self).data();
    if (t.needs(a.id))  // da[n x k] += g[n x m] b^T
      kernels::linear_nt(g, t.val(b.id).data(), t.grad_mut(a.id).data(), n, m, k, true);
    if (t.needs(b.id))  // db[k x m] += a^T g
      kernels::matmul_tn(t.val(a.id).data(), g, t.grad_mut(b.id).data(), n, k, m, true);
  });
}

Var Tape::spmm(const SparseRows& s, Var x) {
  const Tensor& xv = val(x.id);
  require_matrix(xv, "spmm");
  if (xv.rows() != s.n_cols)
    fail(ErrorKind::kDimension, "spmm: sparse operand has " + std::to_string(s.n_cols) +
                                    " columns, input has " + std::to_string(xv.rows()) + " rows");
  const std::size_t d = xv.cols();
  Tensor out({s.n_rows, d});
  for (std::size_t i = 0; i < s.n_rows; ++i) {
    auto yi = out.row(i);
    for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
      const auto xj = xv.row(s.col[p]);
      for (std::size_t c = 0; c < d; ++c) yi[c] += s.val[p] * xj[c];
    }
  }
  return push(std::move(out), "spmm", {x.id}, [s, x, d](Tape& t, std::size_t self) {
    const Tensor& g = t.grad_ref(self);
    Tensor& dx = t.grad_mut(x.id);
    for (std::size_t i = 0; i < s.n_rows; ++i) {
      const auto gi = g.row(i);
      for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
        auto dj = dx.row(s.col[p]);
        for (std::size_t c = 0; c < d; ++c) dj[c] += s.val[p] * gi[c];
      }
    }
  });
}

Var Tape::slice_rows(Var x, std::size_t begin, std::size_t end) {
  const Tensor& xv = val(x.id);
  require_matrix(xv, "slice_rows");
  if (begin >= end || end > xv.rows())
    fail(ErrorKind::kDimension, "slice_rows: bad range");
  const std::size_t d = xv.cols();
  Tensor out({end - begin, d});
  std::copy(xv.data().begin() + begin * d, xv.data().begin() + end * d, out.data().begin());
  return push(std::move(out), "slice_rows", {x.id}, [x, begin, d](Tape& t, std::size_t self) {
    const auto g = t.grad_ref(self).data();
    auto dx = t.grad_mut(x.id).data().subspan(begin * d, g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

Var Tape::gather_rows(Var x, std::span<const std::size_t> rows) {
  const Tensor& xv = val(x.id);
  require_matrix(xv, "gather_rows");
  if (rows.empty()) fail(ErrorKind::kDimension, "gather_rows: empty index list");
  const std::size_t d = xv.cols();
  Tensor out({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= xv.rows()) fail(ErrorKind::kDimension, "gather_rows: index out of range");
    std::copy(xv.row(rows[r]).begin(), xv.row(rows[r]).end(), out.row(r).begin());
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return push(std::move(out), "gather_rows", {x.id}, [x, idx = std::move(idx), d](Tape& t, std::size_t self) {
    const Tensor& g = t.grad_ref(self);
    Tensor& dx = t.grad_mut(x.id);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      auto dst = dx.row(idx[r]);
      const auto src = g.row(r);
      for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
}

Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kDimension, "concat_rows: no inputs");
  const std::size_t d = val(parts[0].id).cols();
  std::size_t n = 0;
  std::vector<std::size_t> ids, offsets;
  for (const Var& p : parts) {
    const Tensor& pv = val(p.id);
    if (pv.rank() > 2 || pv.cols() != d) fail(ErrorKind::kDimension, "concat_rows: column mismatch");
    ids.push_back(p.id);
    offsets.push_back(n);
    n += pv.rows();
  }
  Tensor out({n, d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = val(ids[i]).data();
    std::copy(src.begin(), src.end(), out.data().begin() + offsets[i] * d);
  }
  return push(std::move(out), "concat_rows", ids, [ids, offsets, d](Tape& t, std::size_t self) {
    const auto g = t.grad_ref(self).data();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!t.needs(ids[i])) continue;
      auto dx = t.grad_mut(ids[i]).data();
      const auto src = g.subspan(offsets[i] * d, dx.size());
      for (std::size_t k = 0; k < dx.size(); ++k) dx[k] += src[k];
    }
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& av = val(a.id);
  const Tensor& bv = val(b.id);
  require_matrix(av, "concat_cols");
  require_matrix(bv, "concat_cols");
  if (av.rows() != bv.rows()) fail(ErrorKind::kDimension, "concat_cols: row mismatch");
  const std::size_t n = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out({n, ca + cb});
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + ca);
  }
  return push(std::move(out), "concat_cols", {a.id, b.id}, [a, b, n, ca, cb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad_ref(self);
    for (std::size_t r = 0; r < n; ++r) {
      const auto gr = g.row(r);
      if (t.needs(a.id)) {
        auto da = t.grad_mut(a.id).row(r);
        for (std::size_t c = 0; c < ca; ++c) da[c] += gr[c];
      }
      if (t.needs(b.id)) {
        auto db = t.grad_mut(b.id).row(r);
        for (std::size_t c = 0; c < cb; ++c) db[c] += gr[ca + c];
      }
    }
  });
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kDimension, "concat: no inputs");
  std::vector<std::size_t> ids, offsets;
  std::vector<double> data;
  for (const Var& p : parts) {
    const Tensor& pv = val(p.id);
    if (pv.rank() != 1) fail(ErrorKind::kDimension, "concat: inputs must be vectors");
    ids.push_back(p.id);
    offsets.push_back(data.size());
    data.insert(data.end(), pv.data().begin(), pv.data().end());
  }
  Tensor out = Tensor::vector(std::move(data));
  return push(std::move(out), "concat", ids, [ids, offsets](Tape& t, std::size_t self) {
    const auto g = t.grad_ref(self).data();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!t.needs(ids[i])) continue;
      auto dx = t.grad_mut(ids[i]).data();
      for (std::size_t k = 0; k < dx.size(); ++k) dx[k] += g[offsets[i] + k];
    }
  });
}

Var Tape::reshape(Var x, Shape shape) {
  Tensor out = val(x.id).reshaped(std::move(shape));
  return push(std::move(out), "reshape", {x.id}, [x](Tape& t, std::size_t self) {
    add_into(t.grad_mut(x.id), t.grad_ref(self).data());
  });
}

Var Tape::softmax(Var z) {
  const Tensor& zv = val(z.id);
  if (zv.empty() || zv.rank() > 2) fail(ErrorKind::kDimension, "softmax: empty or high-rank input");
  const std::size_t n = zv.rows(), m = zv.cols();
  Tensor out(zv.shape());
  for (std::size_t r = 0; r < n; ++r) kernels::softmax(zv.row(r), out.row(r));
  return push(std::move(out), "softmax", {z.id}, [z, n, m](Tape& t, std::size_t self) {
    const Tensor& y = t.val(self);
    const Tensor& g = t.grad_ref(self);
    Tensor& dz = t.grad_mut(z.id);
    for (std::size_t r = 0; r < n; ++r) {
      const auto yr = y.row(r);
      const auto gr = g.row(r);
      double dot = 0.0;
      for (std::size_t c = 0; c < m; ++c) dot += yr[c] * gr[c];
      auto dr = dz.row(r);
      for (std::size_t c = 0; c < m; ++c) dr[c] += yr[c] * (gr[c] - dot);
    }
  });
}

Var Tape::sum_rows(Var x) {
  const Tensor& xv = val(x.id);
  require_matrix(xv, "sum_rows");
  const std::size_t n = xv.rows(), d = xv.cols();
  Tensor out({d});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) out[c] += xv.at(r, c);
  return push(std::move(out), "sum_rows", {x.id}, [x, n, d](Tape& t, std::size_t self) {
    const Tensor& g = t.grad_ref(self);
    Tensor& dx = t.grad_mut(x.id);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) dx.at(r, c) += g[c];
  });
}

Var Tape::sum(Var x) {
  double total = 0.0;
  for (double v : val(x.id).data()) total += v;
  return push(Tensor::scalar(total), "sum", {x.id}, [x](Tape& t, std::size_t self) {
    const double g = t.grad_ref(self)[0];
    for (auto& v : t.grad_mut(x.id).data()) v += g;
  });
}

Var Tape::nll(Var probs, std::size_t label, double floor, std::size_t* clamp_count) {
  const Tensor& p = val(probs.id);
  if (p.rank() != 1 || label >= p.size()) fail(ErrorKind::kDimension, "nll: label out of range");
  const double pl = p[label];
  const bool clamped = pl < floor;
  if (clamped && clamp_count) ++*clamp_count;
  const double loss = -std::log(clamped ? floor : pl);
  return push(Tensor::scalar(loss), "nll", {probs.id}, [probs, label, clamped](Tape& t, std::size_t self) {
    if (clamped) return;
    const double g = t.grad_ref(self)[0];
    t.grad_mut(probs.id)[label] += -g / t.val(probs.id)[label];
  });
}

Var Tape::mean_column_variance(Var x) {
  const Tensor& xv = val(x.id);
  require_matrix(xv, "mean_column_variance");
  const std::size_t n = xv.rows(), d = xv.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) mean[c] += xv.at(r, c);
  for (auto& m : mean) m /= static_cast<double>(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = xv.at(r, c) - mean[c];
      total += dev * dev;
    }
  const double out = total / static_cast<double>(n * d);
  return push(Tensor::scalar(out), "mean_column_variance", {x.id},
              [x, n, d, mean = std::move(mean)](Tape& t, std::size_t self) {
                const double g = t.grad_ref(self)[0] * 2.0 / static_cast<double>(n * d);
                const Tensor& xv = t.val(x.id);
                Tensor& dx = t.grad_mut(x.id);
                for (std::size_t r = 0; r < n; ++r)
                  for (std::size_t c = 0; c < d; ++c) dx.at(r, c) += g * (xv.at(r, c) - mean[c]);
              });
}

void Tape::backward(Var root) {
  if (val(root.id).size() != 1) fail(ErrorKind::kDimension, "backward: root must be a scalar");
  std::pair<Var, Tensor> seed{root, Tensor(val(root.id).shape(), 1.0)};
  backward(std::span<const std::pair<Var, Tensor>>(&seed, 1));
}

void Tape::backward(std::span<const std::pair<Var, Tensor>> seeds) {
  if (!record_) fail(ErrorKind::kUsage, "backward on a tape that does not record gradients");
  for (auto& n : nodes_) n.grad = Tensor();
  for (const auto& [v, adj] : seeds) {
    if (adj.shape() != val(v.id).shape()) fail(ErrorKind::kDimension, "backward: seed shape mismatch");
    add_into(grad_mut(v.id), adj.data());
  }
  replay();
}

void Tape::replay() {
  order_.clear();
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    order_.push_back(i);
    n.backward(*this, i);
  }
}

Gradients Tape::param_grads(const ParamSet& params) const {
  Gradients out(params);
  for (const auto& [pid, node] : param_leaves_) {
    if (nodes_[node].grad.empty()) continue;
    add_into(out[pid], nodes_[node].grad.data());
  }
  return out;
}

}  // namespace lgbg
