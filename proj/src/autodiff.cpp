#include "jnel/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jnel/kernels.hpp"

namespace jnel::ad {

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape s) : shape(std::move(s)) {
  values.assign(shape_size(shape), 0.0);
  grad.assign(values.size(), 0.0);
}

Tensor::Tensor(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != shape_size(shape)) {
    throw DimensionError("tensor of shape " + shape_string(shape) + " given " +
                         std::to_string(values.size()) + " values");
  }
  grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

// ---- ParameterSet ---------------------------------------------------------

Parameter& ParameterSet::add(std::string name, Shape shape) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  index_.emplace(name, params_.size());
  params_.push_back(std::make_unique<Parameter>(Parameter{std::move(name), Tensor(std::move(shape))}));
  return *params_.back();
}

Parameter& ParameterSet::add_glorot(std::string name, Shape shape, std::uint64_t seed) {
  const std::uint64_t stream = fnv1a(name, seed ^ 0x9e3779b97f4a7c15ULL);
  Parameter& p = add(std::move(name), std::move(shape));
  glorot_fill(p.tensor, stream);
  return p;
}

Parameter* ParameterSet::find(std::string_view name) {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : params_[it->second].get();
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->tensor.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->tensor.zero_grad();
}

void glorot_fill(Tensor& t, std::uint64_t seed) {
  const double fan_out = static_cast<double>(t.rows());
  const double fan_in = static_cast<double>(t.shape.size() < 2 ? 1 : t.cols());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Rng rng(seed);
  for (double& v : t.values) v = rng.uniform(-limit, limit);
}

// ---- Graph ----------------------------------------------------------------

Graph::Node& Graph::node(Var v) {
  if (v.id >= nodes_.size()) throw std::out_of_range("variable does not belong to this graph");
  return nodes_[v.id];
}

const Graph::Node& Graph::node(Var v) const {
  if (v.id >= nodes_.size()) throw std::out_of_range("variable does not belong to this graph");
  return nodes_[v.id];
}

Var Graph::constant(std::vector<double> values) {
  const std::size_t n = values.size();
  return constant(Shape{n}, std::move(values));
}

Var Graph::constant(Shape shape, std::vector<double> values) {
  if (values.size() != shape_size(shape)) {
    throw DimensionError("constant of shape " + shape_string(shape) + " given " +
                         std::to_string(values.size()) + " values");
  }
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  n.tag = "constant";
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::zeros(std::size_t n) { return constant(std::vector<double>(n, 0.0)); }

Var Graph::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.shape = p.tensor.shape;
  n.param = &p;
  n.tag = "param";
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  Var v{static_cast<std::uint32_t>(nodes_.size() - 1)};
  param_nodes_.emplace(&p, v);
  return v;
}

Var Graph::make(Shape shape, std::vector<double> values, std::vector<Var> inputs,
                std::string_view tag, BackwardFn backward) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  Node n;
  for (Var in : inputs) {
    if (in.id >= id) throw std::logic_error("operation input does not precede its output");
    n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  }
  n.requires_grad = n.requires_grad && record_;
  n.shape = std::move(shape);
  n.value = std::move(values);
  n.tag = tag;
  if (n.requires_grad) {
    n.inputs = std::move(inputs);
    n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{id};
}

std::span<const double> Graph::value(Var v) const {
  const Node& n = node(v);
  if (n.param) return n.param->tensor.values;
  return n.value;
}

double Graph::scalar(Var v) const {
  auto x = value(v);
  if (x.size() != 1) throw DimensionError("expected a scalar, got shape " + shape_string(shape(v)));
  return x[0];
}

std::span<double> Graph::grad(Var v) { return node(v).grad; }

void Graph::backward(Var loss) {
  Node& root = node(loss);
  if (shape_size(root.shape) != 1) {
    throw DimensionError("backward() needs a scalar loss, got shape " + shape_string(root.shape));
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) {
      n.grad.assign(shape_size(n.shape), 0.0);
    } else {
      n.grad.clear();
    }
  }
  root.grad.assign(1, 1.0);
  if (!root.requires_grad) return;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backward) n.backward(*this, Var{static_cast<std::uint32_t>(i)});
  }
  const auto& k = kernels::active();
  for (Node& n : nodes_) {
    if (n.param && n.requires_grad) k.axpy(1.0, n.grad.data(), n.param->tensor.grad.data(), n.grad.size());
  }
}

// ---- operations -----------------------------------------------------------

namespace {

void require_vector(const Graph& g, Var x, std::string_view op) {
  if (g.shape(x).size() != 1) {
    throw DimensionError(std::string(op) + ": expected a vector, got shape " + shape_string(g.shape(x)));
  }
}

void require_same(const Graph& g, Var a, Var b, std::string_view op) {
  if (g.shape(a) != g.shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(g.shape(a)) + " vs " +
                         shape_string(g.shape(b)));
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matvec_cols(Graph& g, Var w, std::size_t col_offset, Var x) {
  require_vector(g, x, "matvec");
  const Shape& ws = g.shape(w);
  const std::size_t n = g.size(x);
  if (ws.size() != 2 || col_offset + n > ws[1]) {
    throw DimensionError("matvec: weight " + shape_string(ws) + " does not accept input " +
                         shape_string(g.shape(x)) + " at column " + std::to_string(col_offset));
  }
  const std::size_t rows = ws[0];
  const std::size_t ld = ws[1];
  std::vector<double> y(rows, 0.0);
  kernels::active().gemv(g.value(w).data() + col_offset, rows, n, ld, g.value(x).data(), y.data());
  return g.make({rows}, std::move(y), {w, x}, "matvec", [w, x, rows, n, ld, col_offset](Graph& g, Var self) {
    const auto& k = kernels::active();
    auto gy = g.grad(self);
    if (g.requires_grad(w)) k.ger(gy.data(), g.value(x).data(), rows, n, ld, g.grad(w).data() + col_offset);
    if (g.requires_grad(x)) k.gemv_t(g.value(w).data() + col_offset, rows, n, ld, gy.data(), g.grad(x).data());
  });
}

Var matvec(Graph& g, Var w, Var x) {
  const Shape& ws = g.shape(w);
  if (ws.size() != 2 || g.shape(x).size() != 1 || ws[1] != g.size(x)) {
    throw DimensionError("matvec: weight " + shape_string(ws) + " incompatible with input " +
                         shape_string(g.shape(x)));
  }
  return matvec_cols(g, w, 0, x);
}

Var affine(Graph& g, Var w, Var x, Var b) {
  const Shape& ws = g.shape(w);
  if (ws.size() != 2 || g.shape(x).size() != 1 || ws[1] != g.size(x)) {
    throw DimensionError("affine: weight " + shape_string(ws) + " incompatible with input " +
                         shape_string(g.shape(x)));
  }
  if (g.shape(b).size() != 1 || g.size(b) != ws[0]) {
    throw DimensionError("affine: weight " + shape_string(ws) + " incompatible with bias " +
                         shape_string(g.shape(b)));
  }
  const std::size_t rows = ws[0];
  const std::size_t cols = ws[1];
  auto bv = g.value(b);
  std::vector<double> y(bv.begin(), bv.end());
  kernels::active().gemv(g.value(w).data(), rows, cols, cols, g.value(x).data(), y.data());
  return g.make({rows}, std::move(y), {w, x, b}, "affine", [w, x, b, rows, cols](Graph& g, Var self) {
    const auto& k = kernels::active();
    auto gy = g.grad(self);
    if (g.requires_grad(w)) k.ger(gy.data(), g.value(x).data(), rows, cols, cols, g.grad(w).data());
    if (g.requires_grad(x)) k.gemv_t(g.value(w).data(), rows, cols, cols, gy.data(), g.grad(x).data());
    if (g.requires_grad(b)) k.axpy(1.0, gy.data(), g.grad(b).data(), rows);
  });
}

Var add(Graph& g, Var a, Var b) {
  require_same(g, a, b, "add");
  auto av = g.value(a);
  auto bv = g.value(b);
  std::vector<double> y(av.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  return g.make(g.shape(a), std::move(y), {a, b}, "add", [a, b](Graph& g, Var self) {
    auto gy = g.grad(self);
    for (Var in : {a, b}) {
      if (!g.requires_grad(in)) continue;
      auto gx = g.grad(in);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    }
  });
}

Var sum(Graph& g, std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("sum: no inputs");
  for (Var x : xs) require_same(g, xs[0], x, "sum");
  std::vector<double> y(g.size(xs[0]), 0.0);
  for (Var x : xs) {
    auto xv = g.value(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += xv[i];
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  return g.make(g.shape(xs[0]), std::move(y), inputs, "sum", [inputs](Graph& g, Var self) {
    auto gy = g.grad(self);
    for (Var in : inputs) {
      if (!g.requires_grad(in)) continue;
      auto gx = g.grad(in);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    }
  });
}

Var mul(Graph& g, Var a, Var b) {
  require_same(g, a, b, "mul");
  auto av = g.value(a);
  auto bv = g.value(b);
  std::vector<double> y(av.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  return g.make(g.shape(a), std::move(y), {a, b}, "mul", [a, b](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto av = g.value(a);
    auto bv = g.value(b);
    if (g.requires_grad(a)) {
      auto ga = g.grad(a);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * bv[i];
    }
    if (g.requires_grad(b)) {
      auto gb = g.grad(b);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * av[i];
    }
  });
}

Var scale(Graph& g, Var a, double k) {
  auto av = g.value(a);
  std::vector<double> y(av.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = k * av[i];
  return g.make(g.shape(a), std::move(y), {a}, "scale", [a, k](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto ga = g.grad(a);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += k * gy[i];
  });
}

Var dot(Graph& g, Var a, Var b) {
  require_same(g, a, b, "dot");
  const double y = kernels::active().dot(g.value(a).data(), g.value(b).data(), g.size(a));
  return g.make({1}, {y}, {a, b}, "dot", [a, b](Graph& g, Var self) {
    const auto& k = kernels::active();
    const double gy = g.grad(self)[0];
    if (g.requires_grad(a)) k.axpy(gy, g.value(b).data(), g.grad(a).data(), g.size(a));
    if (g.requires_grad(b)) k.axpy(gy, g.value(a).data(), g.grad(b).data(), g.size(b));
  });
}

Var tanh(Graph& g, Var x) {
  auto xv = g.value(x);
  std::vector<double> y(xv.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(xv[i]);
  return g.make(g.shape(x), std::move(y), {x}, "tanh", [x](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto yv = g.value(self);
    auto gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * (1.0 - yv[i] * yv[i]);
  });
}

Var sigmoid(Graph& g, Var x) {
  auto xv = g.value(x);
  std::vector<double> y(xv.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = stable_sigmoid(xv[i]);
  return g.make(g.shape(x), std::move(y), {x}, "sigmoid", [x](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto yv = g.value(self);
    auto gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
  });
}

Var softmax(Graph& g, Var z) {
  require_vector(g, z, "softmax");
  auto zv = g.value(z);
  if (zv.empty()) throw DimensionError("softmax: empty input");
  const double hi = *std::max_element(zv.begin(), zv.end());
  std::vector<double> y(zv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::exp(zv[i] - hi);
    total += y[i];
  }
  for (double& v : y) v /= total;
  return g.make(g.shape(z), std::move(y), {z}, "softmax", [z](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto yv = g.value(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < gy.size(); ++i) inner += gy[i] * yv[i];
    auto gz = g.grad(z);
    for (std::size_t i = 0; i < gy.size(); ++i) gz[i] += yv[i] * (gy[i] - inner);
  });
}

Var log(Graph& g, Var x) {
  auto xv = g.value(x);
  std::vector<double> y(xv.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(xv[i]);
  return g.make(g.shape(x), std::move(y), {x}, "log", [x](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto xv = g.value(x);
    auto gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] / xv[i];
  });
}

Var cross_entropy(Graph& g, Var p, std::size_t gold) {
  require_vector(g, p, "cross_entropy");
  auto pv = g.value(p);
  if (gold >= pv.size()) {
    throw std::out_of_range("cross_entropy: gold index " + std::to_string(gold) + " out of range for " +
                            std::to_string(pv.size()) + " classes");
  }
  const double y = -std::log(pv[gold]);
  return g.make({1}, {y}, {p}, "cross_entropy", [p, gold](Graph& g, Var self) {
    g.grad(p)[gold] -= g.grad(self)[0] / g.value(p)[gold];
  });
}

Var binary_cross_entropy(Graph& g, Var d, double target) {
  if (g.size(d) != 1) throw DimensionError("binary_cross_entropy: expected a scalar, got " + shape_string(g.shape(d)));
  const double dv = g.scalar(d);
  const double y = -(target * std::log(dv) + (1.0 - target) * std::log(1.0 - dv));
  return g.make({1}, {y}, {d}, "binary_cross_entropy", [d, target](Graph& g, Var self) {
    const double dv = g.scalar(d);
    g.grad(d)[0] += g.grad(self)[0] * (-(target / dv) + (1.0 - target) / (1.0 - dv));
  });
}

Var concat(Graph& g, std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("concat: no inputs");
  std::vector<double> y;
  for (Var x : xs) {
    require_vector(g, x, "concat");
    auto xv = g.value(x);
    y.insert(y.end(), xv.begin(), xv.end());
  }
  const std::size_t n = y.size();
  std::vector<Var> inputs(xs.begin(), xs.end());
  return g.make({n}, std::move(y), inputs, "concat", [inputs](Graph& g, Var self) {
    auto gy = g.grad(self);
    std::size_t offset = 0;
    for (Var in : inputs) {
      const std::size_t m = g.size(in);
      if (g.requires_grad(in)) {
        auto gx = g.grad(in);
        for (std::size_t i = 0; i < m; ++i) gx[i] += gy[offset + i];
      }
      offset += m;
    }
  });
}

Var slice(Graph& g, Var x, std::size_t offset, std::size_t length) {
  require_vector(g, x, "slice");
  if (offset + length > g.size(x)) {
    throw DimensionError("slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                         ") out of range for " + shape_string(g.shape(x)));
  }
  auto xv = g.value(x);
  std::vector<double> y(xv.begin() + offset, xv.begin() + offset + length);
  return g.make({length}, std::move(y), {x}, "slice", [x, offset](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[offset + i] += gy[i];
  });
}

Var row(Graph& g, Var w, std::size_t index) {
  const Shape& ws = g.shape(w);
  if (ws.size() != 2) throw DimensionError("row: expected a matrix, got " + shape_string(ws));
  if (index >= ws[0]) {
    throw std::out_of_range("row " + std::to_string(index) + " out of range for " + shape_string(ws));
  }
  const std::size_t cols = ws[1];
  auto wv = g.value(w);
  std::vector<double> y(wv.begin() + index * cols, wv.begin() + (index + 1) * cols);
  return g.make({cols}, std::move(y), {w}, "row", [w, index, cols](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto gw = g.grad(w);
    for (std::size_t i = 0; i < cols; ++i) gw[index * cols + i] += gy[i];
  });
}

Var mean(Graph& g, std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("mean: no inputs");
  for (Var x : xs) require_same(g, xs[0], x, "mean");
  std::vector<double> y(g.size(xs[0]), 0.0);
  for (Var x : xs) {
    auto xv = g.value(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += xv[i];
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (double& v : y) v *= inv;
  std::vector<Var> inputs(xs.begin(), xs.end());
  return g.make(g.shape(xs[0]), std::move(y), inputs, "mean", [inputs, inv](Graph& g, Var self) {
    auto gy = g.grad(self);
    for (Var in : inputs) {
      if (!g.requires_grad(in)) continue;
      auto gx = g.grad(in);
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * inv;
    }
  });
}

Var weighted_sum(Graph& g, std::span<const Var> xs, Var weights) {
  if (xs.empty()) throw DimensionError("weighted_sum: no inputs");
  if (g.size(weights) != xs.size()) {
    throw DimensionError("weighted_sum: " + std::to_string(xs.size()) + " vectors but weights of shape " +
                         shape_string(g.shape(weights)));
  }
  for (Var x : xs) require_same(g, xs[0], x, "weighted_sum");
  auto wv = g.value(weights);
  std::vector<double> y(g.size(xs[0]), 0.0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto xv = g.value(xs[k]);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += wv[k] * xv[i];
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  inputs.push_back(weights);
  return g.make(g.shape(xs[0]), std::move(y), inputs, "weighted_sum", [inputs](Graph& g, Var self) {
    const Var weights = inputs.back();
    auto gy = g.grad(self);
    auto wv = g.value(weights);
    const bool wgrad = g.requires_grad(weights);
    for (std::size_t k = 0; k + 1 < inputs.size(); ++k) {
      const Var x = inputs[k];
      auto xv = g.value(x);
      if (g.requires_grad(x)) {
        auto gx = g.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += wv[k] * gy[i];
      }
      if (wgrad) {
        double s = 0.0;
        for (std::size_t i = 0; i < gy.size(); ++i) s += xv[i] * gy[i];
        g.grad(weights)[k] += s;
      }
    }
  });
}

Var lstm_gates(Graph& g, Var z, Var c_prev) {
  const std::size_t h = g.size(c_prev);
  if (g.size(z) != 4 * h) {
    throw DimensionError("lstm_gates: pre-activations " + shape_string(g.shape(z)) + " vs cell " +
                         shape_string(g.shape(c_prev)));
  }
  auto zv = g.value(z);
  auto cp = g.value(c_prev);
  std::vector<double> y(2 * h);
  for (std::size_t k = 0; k < h; ++k) {
    const double i = stable_sigmoid(zv[k]);
    const double f = stable_sigmoid(zv[h + k]);
    const double o = stable_sigmoid(zv[2 * h + k]);
    const double u = std::tanh(zv[3 * h + k]);
    const double c = f * cp[k] + i * u;
    y[h + k] = c;
    y[k] = o * std::tanh(c);
  }
  return g.make({2 * h}, std::move(y), {z, c_prev}, "lstm_gates", [z, c_prev, h](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto yv = g.value(self);
    auto zv = g.value(z);
    auto cp = g.value(c_prev);
    const bool zgrad = g.requires_grad(z);
    const bool cgrad = g.requires_grad(c_prev);
    std::span<double> gz = zgrad ? g.grad(z) : std::span<double>{};
    std::span<double> gc = cgrad ? g.grad(c_prev) : std::span<double>{};
    for (std::size_t k = 0; k < h; ++k) {
      const double i = stable_sigmoid(zv[k]);
      const double f = stable_sigmoid(zv[h + k]);
      const double o = stable_sigmoid(zv[2 * h + k]);
      const double u = std::tanh(zv[3 * h + k]);
      const double tc = std::tanh(yv[h + k]);
      const double dh = gy[k];
      const double dc = gy[h + k] + dh * o * (1.0 - tc * tc);
      if (zgrad) {
        gz[k] += dc * u * i * (1.0 - i);
        gz[h + k] += dc * cp[k] * f * (1.0 - f);
        gz[2 * h + k] += dh * tc * o * (1.0 - o);
        gz[3 * h + k] += dc * i * (1.0 - u * u);
      }
      if (cgrad) gc[k] += dc * f;
    }
  });
}

Var dropout(Graph& g, Var x, double ratio, bool training, Rng& rng) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("dropout ratio must lie in [0, 1), got " + std::to_string(ratio));
  }
  if (!training || ratio == 0.0) return x;
  auto xv = g.value(x);
  const double keep_scale = 1.0 / (1.0 - ratio);
  std::vector<double> mask(xv.size());
  std::vector<double> y(xv.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    mask[i] = rng.uniform() < ratio ? 0.0 : keep_scale;
    y[i] = xv[i] * mask[i];
  }
  return g.make(g.shape(x), std::move(y), {x}, "dropout", [x, mask = std::move(mask)](Graph& g, Var self) {
    auto gy = g.grad(self);
    auto gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * mask[i];
  });
}

}  // namespace jnel::ad
