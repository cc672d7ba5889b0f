#pragma once

#include <span>
#include <string>
#include <vector>

#include "jnel/autodiff.hpp"

namespace jnel::ad {

// Single-layer LSTM cell with gates packed as [input; forget; output; cell]
// in one (4H x (in + H)) weight matrix applied to [x; h_prev].
struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Parameter* weights = nullptr;
  Parameter* bias = nullptr;

  static LstmCell create(ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                         std::size_t hidden_dim, std::uint64_t seed);

  std::size_t parameter_count() const { return 4 * hidden_dim * (input_dim + hidden_dim) + 4 * hidden_dim; }
};

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_step(Graph& g, const LstmCell& cell, Var x, LstmState prev);

// Runs fw left-to-right and bw right-to-left from zero states; output[w] is
// [fw hidden at w; bw hidden at w].
std::vector<Var> bilstm_run(Graph& g, const LstmCell& fw, const LstmCell& bw, std::span<const Var> xs);

}  // namespace jnel::ad
