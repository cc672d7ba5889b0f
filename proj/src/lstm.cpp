#include "jnel/lstm.hpp"

namespace jnel::ad {

LstmCell LstmCell::create(ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                          std::size_t hidden_dim, std::uint64_t seed) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  cell.weights = &params.add_glorot(prefix + ".W", {4 * hidden_dim, input_dim + hidden_dim}, seed);
  cell.bias = &params.add(prefix + ".b", {4 * hidden_dim});
  return cell;
}

LstmState lstm_step(Graph& g, const LstmCell& cell, Var x, LstmState prev) {
  if (g.size(x) != cell.input_dim) {
    throw DimensionError("lstm_step: input " + shape_string(g.shape(x)) + " vs cell input dim " +
                         std::to_string(cell.input_dim));
  }
  if (g.size(prev.h) != cell.hidden_dim || g.size(prev.c) != cell.hidden_dim) {
    throw DimensionError("lstm_step: state " + shape_string(g.shape(prev.h)) + "/" + shape_string(g.shape(prev.c)) +
                         " vs cell hidden dim " + std::to_string(cell.hidden_dim));
  }
  const Var joined[] = {x, prev.h};
  const Var z = affine(g, g.param(*cell.weights), concat(g, joined), g.param(*cell.bias));
  const Var hc = lstm_gates(g, z, prev.c);
  return {slice(g, hc, 0, cell.hidden_dim), slice(g, hc, cell.hidden_dim, cell.hidden_dim)};
}

std::vector<Var> bilstm_run(Graph& g, const LstmCell& fw, const LstmCell& bw, std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("bilstm_run: empty sequence");
  const std::size_t n = xs.size();
  std::vector<Var> forward(n);
  std::vector<Var> backward(n);
  LstmState s{g.zeros(fw.hidden_dim), g.zeros(fw.hidden_dim)};
  for (std::size_t i = 0; i < n; ++i) {
    s = lstm_step(g, fw, xs[i], s);
    forward[i] = s.h;
  }
  s = {g.zeros(bw.hidden_dim), g.zeros(bw.hidden_dim)};
  for (std::size_t i = n; i-- > 0;) {
    s = lstm_step(g, bw, xs[i], s);
    backward[i] = s.h;
  }
  std::vector<Var> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Var both[] = {forward[i], backward[i]};
    out[i] = concat(g, both);
  }
  return out;
}

}  // namespace jnel::ad
