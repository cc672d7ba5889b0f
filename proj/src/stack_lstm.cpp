#include "jnel/stack_lstm.hpp"

#include <stdexcept>

namespace jnel {

StackLstmParams StackLstmParams::create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                                        std::size_t hidden_dim, std::uint64_t seed) {
  StackLstmParams p;
  p.cell = ad::LstmCell::create(params, prefix, input_dim, hidden_dim, seed);
  p.h0 = &params.add(prefix + ".h0", {hidden_dim});
  p.c0 = &params.add(prefix + ".c0", {hidden_dim});
  return p;
}

StackLstm::StackLstm(ad::Graph& g, const StackLstmParams& params) : graph_(&g), params_(&params) {
  nodes_.push_back({{g.param(*params.h0), g.param(*params.c0)}, 0, 0});
}

void StackLstm::push(ad::Var x) {
  if (graph_->size(x) != params_->input_dim()) {
    throw ad::DimensionError("StackLstm::push: input " + ad::shape_string(graph_->shape(x)) + " vs input dim " +
                             std::to_string(params_->input_dim()));
  }
  const Node& parent = nodes_[pointer_];
  const ad::LstmState next = ad::lstm_step(*graph_, params_->cell, x, parent.state);
  nodes_.push_back({next, pointer_, parent.depth + 1});
  pointer_ = nodes_.size() - 1;
}

void StackLstm::pop() {
  if (pointer_ == 0) throw std::logic_error("StackLstm::pop on an empty stack");
  pointer_ = nodes_[pointer_].parent;
}

void StackLstm::clear() { pointer_ = 0; }

StepContext step_context(const StackLstm& buffer, const StackLstm& stack, const StackLstm& action,
                         const StackLstm& output) {
  return {buffer.top(), stack.top(), action.top(), output.top()};
}

}  // namespace jnel
