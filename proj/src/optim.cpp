#include "jnel/optim.hpp"

#include <cmath>

#include "jnel/kernels.hpp"

namespace jnel::ad {

void adam_update(Parameter& param, AdamState& state) {
  Tensor& t = param.tensor;
  if (state.m.size() != t.size()) state.m.assign(t.size(), 0.0);
  if (state.v.size() != t.size()) state.v.assign(t.size(), 0.0);
  ++state.step_count;
  const double n = static_cast<double>(state.step_count);
  const double step_size = state.lr / (1.0 - std::pow(state.beta1, n));
  const double v_scale = 1.0 / (1.0 - std::pow(state.beta2, n));
  kernels::active().adam(t.values.data(), t.grad.data(), state.m.data(), state.v.data(), t.size(), state.beta1,
                         state.beta2, step_size, v_scale, state.eps);
}

Adam::Adam(const ParameterSet& params, double lr, double beta1, double beta2, double eps) : lr_(lr) {
  states_.resize(params.count());
  for (std::size_t i = 0; i < params.count(); ++i) {
    AdamState& s = states_[i];
    s.m.assign(params.at(i).tensor.size(), 0.0);
    s.v.assign(params.at(i).tensor.size(), 0.0);
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
  }
}

void Adam::step(ParameterSet& params) {
  for (std::size_t i = 0; i < params.count(); ++i) adam_update(params.at(i), states_.at(i));
}

void Adam::set_lr(double lr) {
  lr_ = lr;
  for (AdamState& s : states_) s.lr = lr;
}

double grad_norm(const ParameterSet& params) {
  const auto& k = kernels::active();
  double total = 0.0;
  for (std::size_t i = 0; i < params.count(); ++i) {
    const Tensor& t = params.at(i).tensor;
    total += k.sum_squares(t.grad.data(), t.grad.size());
  }
  return std::sqrt(total);
}

double clip_grad_norm(ParameterSet& params, double max_norm) {
  const double norm = grad_norm(params);
  if (max_norm <= 0.0 || norm <= max_norm) return norm;
  const double factor = max_norm / norm;
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < params.count(); ++i) {
    Tensor& t = params.at(i).tensor;
    k.scale(factor, t.grad.data(), t.grad.size());
  }
  return norm;
}

}  // namespace jnel::ad
