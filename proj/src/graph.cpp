// Copyright 2026 The summ Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "summ/graph.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace summ {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("graph: ") + what);
}

Matrix sigmoid_of(const Matrix& a) {
  return a.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

}  // namespace

Graph::Graph(const ParamSet* params) : params_(params) {}

Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::input(Matrix value) {
  Node n;
  n.op = Op::kInput;
  n.own = std::move(value);
  return push(std::move(n));
}

Var Graph::scalar_input(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return input(std::move(m));
}

Var Graph::param(ParamId id) {
  require(params_ != nullptr, "graph has no parameter set");
  Node n;
  n.op = Op::kParam;
  n.aux = static_cast<int>(id.index);
  n.external = &(*params_)[id].value;
  return push(std::move(n));
}

Var Graph::embed(ParamId table, std::span<const int> ids) {
  require(params_ != nullptr, "graph has no parameter set");
  const Matrix& t = (*params_)[table].value;
  Node n;
  n.op = Op::kEmbed;
  n.aux = static_cast<int>(table.index);
  n.ints.assign(ids.begin(), ids.end());
  n.own.resize(t.cols(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t c = 0; c < ids.size(); ++c) {
    require(ids[c] >= 0 && ids[c] < t.rows(), "embedding id out of range");
    n.own.col(static_cast<Eigen::Index>(c)) = t.row(ids[c]).transpose();
  }
  return push(std::move(n));
}

Var Graph::matmul(Var a, Var b) {
  require(value(a).cols() == value(b).rows(), "matmul shape mismatch");
  Node n;
  n.op = Op::kMatMul;
  n.in = {a.index, b.index, -1};
  n.own.noalias() = value(a) * value(b);
  return push(std::move(n));
}

Var Graph::affine(Var w, Var x, Var b) {
  const Matrix& wv = value(w);
  const Matrix& xv = value(x);
  const Matrix& bv = value(b);
  require(wv.cols() == xv.rows(), "affine shape mismatch");
  require(bv.rows() == wv.rows() && bv.cols() == 1, "affine bias shape mismatch");
  Node n;
  n.op = Op::kAffine;
  n.in = {w.index, x.index, b.index};
  n.own.noalias() = wv * xv;
  n.own.colwise() += bv.col(0);
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "add shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.in = {a.index, b.index, -1};
  n.own = value(a) + value(b);
  return push(std::move(n));
}

Var Graph::add_colwise(Var m, Var col) {
  require(value(col).cols() == 1 && value(col).rows() == value(m).rows(),
          "add_colwise shape mismatch");
  Node n;
  n.op = Op::kAddColwise;
  n.in = {m.index, col.index, -1};
  n.own = value(m);
  n.own.colwise() += value(col).col(0);
  return push(std::move(n));
}

Var Graph::sub(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "sub shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.in = {a.index, b.index, -1};
  n.own = value(a) - value(b);
  return push(std::move(n));
}

Var Graph::mul(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "mul shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.in = {a.index, b.index, -1};
  n.own = value(a).cwiseProduct(value(b));
  return push(std::move(n));
}

Var Graph::scale(Var a, double factor) {
  Node n;
  n.op = Op::kScale;
  n.in = {a.index, -1, -1};
  n.factor = factor;
  n.own = value(a) * factor;
  return push(std::move(n));
}

Var Graph::tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.in = {a.index, -1, -1};
  n.own = value(a).array().tanh().matrix();
  return push(std::move(n));
}

Var Graph::sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.in = {a.index, -1, -1};
  n.own = sigmoid_of(value(a));
  return push(std::move(n));
}

Var Graph::relu(Var a) {
  Node n;
  n.op = Op::kRelu;
  n.in = {a.index, -1, -1};
  n.own = value(a).cwiseMax(0.0);
  return push(std::move(n));
}

Var Graph::log(Var a) {
  Node n;
  n.op = Op::kLog;
  n.in = {a.index, -1, -1};
  n.own = value(a).array().log().matrix();
  return push(std::move(n));
}

Var Graph::sum(Var a) {
  Node n;
  n.op = Op::kSum;
  n.in = {a.index, -1, -1};
  n.own.resize(1, 1);
  n.own(0, 0) = value(a).sum();
  return push(std::move(n));
}

Var Graph::transpose(Var a) {
  Node n;
  n.op = Op::kTranspose;
  n.in = {a.index, -1, -1};
  n.own = value(a).transpose();
  return push(std::move(n));
}

Var Graph::concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat of nothing");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    require(value(p).cols() == cols, "concat_rows column mismatch");
    rows += value(p).rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.own.resize(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    n.own.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
    n.ints.push_back(p.index);
  }
  return push(std::move(n));
}

Var Graph::concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat of nothing");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    require(value(p).rows() == rows, "concat_cols row mismatch");
    cols += value(p).cols();
  }
  Node n;
  n.op = Op::kConcatCols;
  n.own.resize(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    n.own.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
    n.ints.push_back(p.index);
  }
  return push(std::move(n));
}

Var Graph::slice_rows(Var a, int start, int count) {
  require(start >= 0 && count >= 0 && start + count <= value(a).rows(), "slice out of range");
  Node n;
  n.op = Op::kSliceRows;
  n.in = {a.index, -1, -1};
  n.aux = start;
  n.aux2 = count;
  n.own = value(a).middleRows(start, count);
  return push(std::move(n));
}

Var Graph::col(Var a, int j) {
  require(j >= 0 && j < value(a).cols(), "column out of range");
  Node n;
  n.op = Op::kCol;
  n.in = {a.index, -1, -1};
  n.aux = j;
  n.own = value(a).col(j);
  return push(std::move(n));
}

Var Graph::pick(Var a, int index) {
  require(index >= 0 && index < value(a).size(), "pick out of range");
  Node n;
  n.op = Op::kPick;
  n.in = {a.index, -1, -1};
  n.aux = index;
  n.own.resize(1, 1);
  n.own(0, 0) = value(a).data()[index];
  return push(std::move(n));
}

Var Graph::softmax(Var a) {
  const Matrix& x = value(a);
  Node n;
  n.op = Op::kSoftmax;
  n.in = {a.index, -1, -1};
  n.own = (x.array() - x.maxCoeff()).exp().matrix();
  n.own /= n.own.sum();
  return push(std::move(n));
}

Var Graph::log_softmax(Var a) {
  const Matrix& x = value(a);
  const double m = x.maxCoeff();
  const double lse = m + std::log((x.array() - m).exp().sum());
  Node n;
  n.op = Op::kLogSoftmax;
  n.in = {a.index, -1, -1};
  n.own = (x.array() - lse).matrix();
  return push(std::move(n));
}

namespace {

double masked_lse(const Matrix& x, const std::vector<bool>& mask) {
  double m = kNegInf;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) m = std::max(m, x.data()[i]);
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (mask[static_cast<std::size_t>(i)]) s += std::exp(x.data()[i] - m);
  return m + std::log(s);
}

}  // namespace

Var Graph::masked_softmax(Var a, const std::vector<bool>& mask) {
  const Matrix& x = value(a);
  require(static_cast<Eigen::Index>(mask.size()) == x.size(), "mask size mismatch");
  bool any = false;
  for (bool b : mask) any |= b;
  require(any, "mask excludes every entry");
  const double lse = masked_lse(x, mask);
  Node n;
  n.op = Op::kMaskedSoftmax;
  n.in = {a.index, -1, -1};
  n.own = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) n.own.data()[i] = std::exp(x.data()[i] - lse);
    n.ints.push_back(mask[static_cast<std::size_t>(i)] ? 1 : 0);
  }
  return push(std::move(n));
}

Var Graph::masked_log_softmax(Var a, const std::vector<bool>& mask) {
  const Matrix& x = value(a);
  require(static_cast<Eigen::Index>(mask.size()) == x.size(), "mask size mismatch");
  bool any = false;
  for (bool b : mask) any |= b;
  require(any, "mask excludes every entry");
  const double lse = masked_lse(x, mask);
  Node n;
  n.op = Op::kMaskedLogSoftmax;
  n.in = {a.index, -1, -1};
  n.own.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool on = mask[static_cast<std::size_t>(i)];
    n.own.data()[i] = on ? x.data()[i] - lse : kNegInf;
    n.ints.push_back(on ? 1 : 0);
  }
  return push(std::move(n));
}

Var Graph::conv_relu_maxpool(Var x, Var w, Var b, int width) {
  const Matrix& xv = value(x);
  const Matrix& wv = value(w);
  const Eigen::Index dim = xv.rows();
  const Eigen::Index len = xv.cols();
  require(width >= 1 && len >= width, "convolution input shorter than its window");
  require(wv.cols() == dim * width, "convolution filter shape mismatch");
  require(value(b).rows() == wv.rows() && value(b).cols() == 1, "convolution bias shape mismatch");
  const Eigen::Index steps = len - width + 1;
  // Column t of `unfolded` is x[:, t..t+width) flattened column-major.
  Matrix unfolded(dim * width, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    for (int k = 0; k < width; ++k) unfolded.block(k * dim, t, dim, 1) = xv.col(t + k);
  }
  Matrix pre = wv * unfolded;
  pre.colwise() += value(b).col(0);
  Node n;
  n.op = Op::kConvMaxPool;
  n.in = {x.index, w.index, b.index};
  n.aux = width;
  n.own.resize(wv.rows(), 1);
  n.ints.resize(static_cast<std::size_t>(wv.rows()));
  for (Eigen::Index f = 0; f < wv.rows(); ++f) {
    Eigen::Index best;
    const double m = pre.row(f).maxCoeff(&best);
    n.ints[static_cast<std::size_t>(f)] = static_cast<int>(best);
    n.own(f, 0) = std::max(0.0, m);
  }
  return push(std::move(n));
}

Var Graph::lstm_cell(Var gates, Var c_prev) {
  const Matrix& g = value(gates);
  const Matrix& c0 = value(c_prev);
  const Eigen::Index h = c0.rows();
  require(c0.cols() == 1 && g.cols() == 1 && g.rows() == 4 * h, "lstm gate shape mismatch");
  const Matrix i = sigmoid_of(g.middleRows(0, h));
  const Matrix f = sigmoid_of(g.middleRows(h, h));
  const Matrix gg = g.middleRows(2 * h, h).array().tanh().matrix();
  const Matrix o = sigmoid_of(g.middleRows(3 * h, h));
  Node n;
  n.op = Op::kLstmCell;
  n.in = {gates.index, c_prev.index, -1};
  n.own.resize(2 * h, 1);
  const Matrix c = f.cwiseProduct(c0) + i.cwiseProduct(gg);
  n.own.middleRows(0, h) = o.cwiseProduct(c.array().tanh().matrix());
  n.own.middleRows(h, h) = c;
  return push(std::move(n));
}

Var Graph::detach(Var a) {
  Node n;
  n.op = Op::kDetach;
  n.own = value(a);
  return push(std::move(n));
}

// ---------------------------------------------------------------------------
// Backward

Matrix& Graph::grad_of(int index) {
  Node& n = nodes_[static_cast<std::size_t>(index)];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value().rows(), n.value().cols());
  return n.grad;
}

void Graph::accumulate(int index, const Matrix& g) {
  Node& n = nodes_[static_cast<std::size_t>(index)];
  // Inputs and detached values never need gradients.
  if (n.op == Op::kInput || n.op == Op::kDetach) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Graph::backward(Var loss, GradSet& grads) {
  require(value(loss).size() == 1, "backward needs a scalar loss");
  require(grads.size() == (params_ ? params_->size() : 0), "gradient set does not match the graph");
  grad_of(loss.index).setConstant(1.0);
  for (std::size_t i = static_cast<std::size_t>(loss.index) + 1; i-- > 0;) {
    if (nodes_[i].grad.size() == 0) continue;
    backward_node(i, grads);
    if (nodes_[i].op != Op::kParam) nodes_[i].grad.resize(0, 0);
  }
}

void Graph::backward_node(std::size_t idx, GradSet& grads) {
  Node& n = nodes_[idx];
  const Matrix& g = n.grad;
  auto in_value = [&](int k) -> const Matrix& { return nodes_[static_cast<std::size_t>(n.in[k])].value(); };
  auto wants = [&](int k) {
    const Node& m = nodes_[static_cast<std::size_t>(n.in[k])];
    return m.op != Op::kInput && m.op != Op::kDetach;
  };

  switch (n.op) {
    case Op::kInput:
    case Op::kDetach:
      break;
    case Op::kParam: {
      Matrix& target = grads.at(ParamId{static_cast<std::size_t>(n.aux)});
      target += g;
      n.grad.resize(0, 0);
      break;
    }
    case Op::kEmbed: {
      Matrix& target = grads.at(ParamId{static_cast<std::size_t>(n.aux)});
      for (std::size_t c = 0; c < n.ints.size(); ++c) {
        target.row(n.ints[c]) += g.col(static_cast<Eigen::Index>(c)).transpose();
      }
      break;
    }
    case Op::kMatMul: {
      if (wants(0)) accumulate(n.in[0], g * in_value(1).transpose());
      if (wants(1)) accumulate(n.in[1], in_value(0).transpose() * g);
      break;
    }
    case Op::kAffine: {
      if (wants(0)) accumulate(n.in[0], g * in_value(1).transpose());
      if (wants(1)) accumulate(n.in[1], in_value(0).transpose() * g);
      if (wants(2)) accumulate(n.in[2], g.rowwise().sum());
      break;
    }
    case Op::kAdd:
      if (wants(0)) accumulate(n.in[0], g);
      if (wants(1)) accumulate(n.in[1], g);
      break;
    case Op::kAddColwise:
      if (wants(0)) accumulate(n.in[0], g);
      if (wants(1)) accumulate(n.in[1], g.rowwise().sum());
      break;
    case Op::kSub:
      if (wants(0)) accumulate(n.in[0], g);
      if (wants(1)) accumulate(n.in[1], -g);
      break;
    case Op::kMul:
      if (wants(0)) accumulate(n.in[0], g.cwiseProduct(in_value(1)));
      if (wants(1)) accumulate(n.in[1], g.cwiseProduct(in_value(0)));
      break;
    case Op::kScale:
      accumulate(n.in[0], g * n.factor);
      break;
    case Op::kTanh:
      accumulate(n.in[0], g.cwiseProduct((1.0 - n.own.array().square()).matrix()));
      break;
    case Op::kSigmoid:
      accumulate(n.in[0], g.cwiseProduct((n.own.array() * (1.0 - n.own.array())).matrix()));
      break;
    case Op::kRelu:
      accumulate(n.in[0], (in_value(0).array() > 0.0).select(g, 0.0).matrix());
      break;
    case Op::kLog:
      accumulate(n.in[0], g.cwiseQuotient(in_value(0)));
      break;
    case Op::kSum:
      accumulate(n.in[0], Matrix::Constant(in_value(0).rows(), in_value(0).cols(), g(0, 0)));
      break;
    case Op::kTranspose:
      accumulate(n.in[0], g.transpose());
      break;
    case Op::kConcatRows: {
      Eigen::Index r = 0;
      for (int part : n.ints) {
        const Eigen::Index rows = nodes_[static_cast<std::size_t>(part)].value().rows();
        accumulate(part, g.middleRows(r, rows));
        r += rows;
      }
      break;
    }
    case Op::kConcatCols: {
      Eigen::Index c = 0;
      for (int part : n.ints) {
        const Eigen::Index cols = nodes_[static_cast<std::size_t>(part)].value().cols();
        accumulate(part, g.middleCols(c, cols));
        c += cols;
      }
      break;
    }
    case Op::kSliceRows: {
      if (!wants(0)) break;
      Matrix& target = grad_of(n.in[0]);
      target.middleRows(n.aux, n.aux2) += g;
      break;
    }
    case Op::kCol: {
      if (!wants(0)) break;
      grad_of(n.in[0]).col(n.aux) += g;
      break;
    }
    case Op::kPick: {
      if (!wants(0)) break;
      grad_of(n.in[0]).data()[n.aux] += g(0, 0);
      break;
    }
    case Op::kSoftmax:
    case Op::kMaskedSoftmax: {
      const double inner = g.cwiseProduct(n.own).sum();
      accumulate(n.in[0], n.own.cwiseProduct((g.array() - inner).matrix()));
      break;
    }
    case Op::kLogSoftmax: {
      const Matrix p = n.own.array().exp().matrix();
      accumulate(n.in[0], g - p * g.sum());
      break;
    }
    case Op::kMaskedLogSoftmax: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < g.size(); ++i)
        if (n.ints[static_cast<std::size_t>(i)]) total += g.data()[i];
      Matrix d = Matrix::Zero(g.rows(), g.cols());
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!n.ints[static_cast<std::size_t>(i)]) continue;
        d.data()[i] = g.data()[i] - std::exp(n.own.data()[i]) * total;
      }
      accumulate(n.in[0], d);
      break;
    }
    case Op::kConvMaxPool: {
      const Matrix& xv = in_value(0);
      const Matrix& wv = in_value(1);
      const Eigen::Index dim = xv.rows();
      const int width = n.aux;
      Matrix dx = Matrix::Zero(xv.rows(), xv.cols());
      Matrix dw = Matrix::Zero(wv.rows(), wv.cols());
      Matrix db = Matrix::Zero(wv.rows(), 1);
      for (Eigen::Index f = 0; f < wv.rows(); ++f) {
        if (n.own(f, 0) <= 0.0) continue;
        const double gf = g(f, 0);
        const Eigen::Index t = n.ints[static_cast<std::size_t>(f)];
        db(f, 0) += gf;
        for (int k = 0; k < width; ++k) {
          dw.block(f, k * dim, 1, dim) += gf * xv.col(t + k).transpose();
          dx.col(t + k) += gf * wv.block(f, k * dim, 1, dim).transpose();
        }
      }
      if (wants(0)) accumulate(n.in[0], dx);
      if (wants(1)) accumulate(n.in[1], dw);
      if (wants(2)) accumulate(n.in[2], db);
      break;
    }
    case Op::kLstmCell: {
      const Matrix& gates = in_value(0);
      const Matrix& c0 = in_value(1);
      const Eigen::Index h = c0.rows();
      const Matrix i = sigmoid_of(gates.middleRows(0, h));
      const Matrix f = sigmoid_of(gates.middleRows(h, h));
      const Matrix gg = gates.middleRows(2 * h, h).array().tanh().matrix();
      const Matrix o = sigmoid_of(gates.middleRows(3 * h, h));
      const Matrix c = n.own.middleRows(h, h);
      const Matrix tc = c.array().tanh().matrix();
      const Matrix gh = g.middleRows(0, h);
      const Matrix dc = g.middleRows(h, h) +
                        gh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix());
      Matrix dgates(4 * h, 1);
      dgates.middleRows(0, h) = dc.cwiseProduct(gg).cwiseProduct((i.array() * (1.0 - i.array())).matrix());
      dgates.middleRows(h, h) = dc.cwiseProduct(c0).cwiseProduct((f.array() * (1.0 - f.array())).matrix());
      dgates.middleRows(2 * h, h) = dc.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
      dgates.middleRows(3 * h, h) = gh.cwiseProduct(tc).cwiseProduct((o.array() * (1.0 - o.array())).matrix());
      if (wants(0)) accumulate(n.in[0], dgates);
      if (wants(1)) accumulate(n.in[1], dc.cwiseProduct(f));
      break;
    }
  }
}

}  // namespace summ
