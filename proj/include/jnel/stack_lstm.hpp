#pragma once
// LSTM with a movable top pointer. Each push runs one recurrence step from
// the state under the pointer and records that state as the new node's
// parent; pop moves the pointer back to the parent. Popped nodes stay in the
// graph, so gradients still reach them.

#include <string>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/lstm.hpp"

namespace jnel {

struct StackLstmParams {
  ad::LstmCell cell;
  ad::Parameter* h0 = nullptr;  // learned empty-stack state
  ad::Parameter* c0 = nullptr;

  static StackLstmParams create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                                std::size_t hidden_dim, std::uint64_t seed);
  std::size_t input_dim() const { return cell.input_dim; }
  std::size_t hidden_dim() const { return cell.hidden_dim; }
};

class StackLstm {
 public:
  StackLstm(ad::Graph& g, const StackLstmParams& params);

  void push(ad::Var x);
  void pop();
  // Pops back to the empty state.
  void clear();

  ad::Var top() const { return nodes_[pointer_].state.h; }
  std::size_t depth() const { return nodes_[pointer_].depth; }
  bool empty() const { return pointer_ == 0; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    ad::LstmState state;
    std::size_t parent;
    std::size_t depth;
  };

  ad::Graph* graph_;
  const StackLstmParams* params_;
  std::vector<Node> nodes_;
  std::size_t pointer_ = 0;
};

struct StepContext {
  ad::Var b;  // buffer
  ad::Var s;  // stack
  ad::Var a;  // action history
  ad::Var o;  // output
};

StepContext step_context(const StackLstm& buffer, const StackLstm& stack, const StackLstm& action,
                         const StackLstm& output);

}  // namespace jnel
