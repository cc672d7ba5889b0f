#pragma once

#include <cstdint>
#include <vector>

#include "jnel/autodiff.hpp"

namespace jnel::ad {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step_count = 0;
  double lr = 0.001;
  double beta1 = 0.8;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// In-place bias-corrected Adam step on one parameter; zeroes its gradient.
void adam_update(Parameter& param, AdamState& state);

// Adam over every tensor of a ParameterSet, with a shared learning rate.
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterSet& params, double lr, double beta1, double beta2, double eps = 1e-8);

  void step(ParameterSet& params);
  void set_lr(double lr);
  double lr() const { return states_.empty() ? lr_ : states_.front().lr; }
  std::uint64_t step_count() const { return states_.empty() ? 0 : states_.front().step_count; }

  std::vector<AdamState>& states() { return states_; }
  const std::vector<AdamState>& states() const { return states_; }

 private:
  double lr_ = 0.001;
  std::vector<AdamState> states_;
};

double grad_norm(const ParameterSet& params);

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping. max_norm <= 0 disables clipping.
double clip_grad_norm(ParameterSet& params, double max_norm);

}  // namespace jnel::ad
