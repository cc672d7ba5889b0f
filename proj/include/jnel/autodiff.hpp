#pragma once
// Tape-based reverse-mode automatic differentiation over float64 vectors and
// matrices. A Graph is built fresh for every document: operations append
// nodes in evaluation order and backward() walks them in reverse.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jnel/rng.hpp"

namespace jnel::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Tensor {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(Shape s);
  Tensor(Shape s, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  void zero_grad();
};

struct Parameter {
  std::string name;
  Tensor tensor;
};

// Owns every trainable tensor of a model. Addresses are stable for the
// lifetime of the set, and iteration follows insertion order.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  // Zero-initialized parameter. Names must be unique.
  Parameter& add(std::string name, Shape shape);
  // Uniform in +-sqrt(6 / (fan_in + fan_out)), drawn from a stream seeded by
  // (seed, name) so a parameter's initial value does not depend on which
  // other parameters exist.
  Parameter& add_glorot(std::string name, Shape shape, std::uint64_t seed);

  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;

  std::size_t count() const { return params_.size(); }
  std::size_t total_size() const;
  Parameter& at(std::size_t i) { return *params_[i]; }
  const Parameter& at(std::size_t i) const { return *params_[i]; }

  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

void glorot_fill(Tensor& t, std::uint64_t seed);

struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var self)>;

  // With record_backward == false no closures are kept (inference only).
  explicit Graph(bool record_backward = true) : record_(record_backward) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(std::vector<double> values);
  Var constant(Shape shape, std::vector<double> values);
  Var zeros(std::size_t n);
  // One leaf per parameter per graph; repeated calls return the same Var.
  Var param(Parameter& p);

  // Appends an operation node. Inputs must already exist in this graph.
  Var make(Shape shape, std::vector<double> values, std::vector<Var> inputs,
           std::string_view tag, BackwardFn backward);

  std::span<const double> value(Var v) const;
  double scalar(Var v) const;
  const Shape& shape(Var v) const { return node(v).shape; }
  std::size_t size(Var v) const { return shape_size(node(v).shape); }
  bool requires_grad(Var v) const { return node(v).requires_grad; }
  std::string_view tag(Var v) const { return node(v).tag; }
  std::span<const Var> inputs(Var v) const { return node(v).inputs; }
  std::size_t node_count() const { return nodes_.size(); }
  bool recording() const { return record_; }

  // Gradient buffer of a node; only meaningful during and after backward().
  std::span<double> grad(Var v);

  // Seeds d(loss)/d(loss) = 1 and propagates in reverse append order. Node
  // gradients are reset at the start of each call; parameter gradients
  // accumulate across calls.
  void backward(Var loss);

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    Parameter* param = nullptr;
    std::vector<Var> inputs;
    BackwardFn backward;
    std::string_view tag;
    bool requires_grad = false;
  };

  Node& node(Var v);
  const Node& node(Var v) const;

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, Var> param_nodes_;
};

// ---- operations -----------------------------------------------------------

// W[m x n] * x[n] + b[m]
Var affine(Graph& g, Var w, Var x, Var b);
Var matvec(Graph& g, Var w, Var x);
// W[:, offset : offset + |x|] * x
Var matvec_cols(Graph& g, Var w, std::size_t col_offset, Var x);

Var add(Graph& g, Var a, Var b);
Var sum(Graph& g, std::span<const Var> xs);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double k);
Var dot(Graph& g, Var a, Var b);

Var tanh(Graph& g, Var x);
Var sigmoid(Graph& g, Var x);
Var softmax(Graph& g, Var z);
Var log(Graph& g, Var x);

// -log p[gold]
Var cross_entropy(Graph& g, Var p, std::size_t gold);
// -(y log d + (1 - y) log(1 - d)) for scalar d in (0, 1)
Var binary_cross_entropy(Graph& g, Var d, double y);

Var concat(Graph& g, std::span<const Var> xs);
Var slice(Graph& g, Var x, std::size_t offset, std::size_t length);
// Row `index` of a matrix, as a vector.
Var row(Graph& g, Var w, std::size_t index);
// Elementwise mean of equally sized vectors.
Var mean(Graph& g, std::span<const Var> xs);
// sum_i weights[i] * xs[i]
Var weighted_sum(Graph& g, std::span<const Var> xs, Var weights);

// LSTM gate nonlinearity on packed pre-activations z = [i; f; o; g] (4H) and
// the previous cell c (H). Returns [h; c] (2H).
Var lstm_gates(Graph& g, Var z, Var c_prev);

// Inverted dropout. Identity when !training or ratio == 0.
Var dropout(Graph& g, Var x, double ratio, bool training, Rng& rng);

}  // namespace jnel::ad
