#pragma once

#include <cmath>
#include <string>

#include "mfdiff/core/error.hpp"
#include "mfdiff/core/tensor.hpp"

namespace mfdiff {

// Forward variance-exploding SDE  dz = g(t) dw  with the geometric schedule
//   v(t) = sigma_min^2 * (sigma_max/sigma_min)^(2 t / T),
// so g(t) = sqrt(dv/dt). Drift is identically zero.
template <class Real>
struct SdeConfig {
  Real horizon = Real(1);        // T
  Real sigma_min = Real(0.01);   // noise scale at t = 0
  Real sigma_max = Real(50.0);   // noise scale at t = T
  Real t_eps = Real(1e-5);       // smallest usable time; keeps score targets finite

  void validate() const {
    if (!(sigma_min > 0 && sigma_min < sigma_max))
      throw ConfigError("SdeConfig: need 0 < sigma_min < sigma_max");
    if (!(t_eps > 0 && t_eps < horizon)) throw ConfigError("SdeConfig: need 0 < t_eps < T");
  }
};

template <class Real>
struct DiffusionState {
  Tensor<Real> z;
  Real t = Real(0);
};

namespace detail {
template <class Real>
void check_time(const SdeConfig<Real>& cfg, Real t, const char* what) {
  if (!(t >= Real(0) && t <= cfg.horizon))
    throw DomainError(std::string(what) + ": t outside [0, T]");
}
}  // namespace detail

// v(t); strictly increasing on [0, T].
template <class Real>
Real variance(const SdeConfig<Real>& cfg, Real t) {
  detail::check_time(cfg, t, "variance");
  const Real ratio = cfg.sigma_max / cfg.sigma_min;
  return cfg.sigma_min * cfg.sigma_min *
         std::pow(ratio, Real(2) * t / cfg.horizon);
}

// Standard deviation of the perturbation kernel q(z(t)|z(0)) = N(z(0), (v(t)-v(0)) I).
template <class Real>
Real marginal_std(const SdeConfig<Real>& cfg, Real t) {
  detail::check_time(cfg, t, "marginal_std");
  if (t == Real(0)) return Real(0);
  const Real dv = variance(cfg, t) - variance(cfg, Real(0));
  return std::sqrt(dv > Real(0) ? dv : Real(0));
}

// z(t) = z(0) + marginal_std(t) * noise, with caller-supplied standard normal noise.
template <class Real>
DiffusionState<Real> perturb(const SdeConfig<Real>& cfg, const Tensor<Real>& z0, Real t,
                             const Tensor<Real>& noise) {
  check_same_shape(z0, noise, "perturb");
  detail::check_time(cfg, t, "perturb");
  const Real std_t = marginal_std(cfg, t);
  DiffusionState<Real> state;
  state.z = z0;
  state.t = t;
  Real* z = state.z.data();
  const Real* xi = noise.data();
  for (std::size_t i = 0; i < state.z.size(); ++i) z[i] += std_t * xi[i];
  return state;
}

// grad_z log q(z(t)|z(0)) = (z(0) - z(t)) / (v(t) - v(0)); singular at t = 0.
template <class Real>
Tensor<Real> score_target(const SdeConfig<Real>& cfg, const Tensor<Real>& z0, const Tensor<Real>& zt,
                          Real t) {
  check_same_shape(z0, zt, "score_target");
  if (!(t > Real(0)))
    throw DomainError("score_target: t must be strictly positive (kernel variance is zero at t = 0)");
  detail::check_time(cfg, t, "score_target");
  const Real dv = variance(cfg, t) - variance(cfg, Real(0));
  Tensor<Real> out = z0;
  Real* o = out.data();
  const Real* z = zt.data();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] = (o[i] - z[i]) / dv;
  return out;
}

// g(t) = sqrt(dv/dt) = sqrt(v(t) * 2 ln(sigma_max/sigma_min) / T).
template <class Real>
Real diffusion_coeff(const SdeConfig<Real>& cfg, Real t) {
  detail::check_time(cfg, t, "diffusion_coeff");
  const Real log_ratio = std::log(cfg.sigma_max / cfg.sigma_min);
  return std::sqrt(variance(cfg, t) * Real(2) * log_ratio / cfg.horizon);
}

// Reverse-SDE drift f - g^2 * score with f == 0.
template <class Real>
Tensor<Real> reverse_drift(const SdeConfig<Real>& cfg, const Tensor<Real>& z, Real t,
                           const Tensor<Real>& score) {
  check_same_shape(z, score, "reverse_drift");
  const Real g = diffusion_coeff(cfg, t);
  Tensor<Real> out = score;
  Real* o = out.data();
  const Real g2 = g * g;
  for (std::size_t i = 0; i < out.size(); ++i) o[i] = -g2 * o[i];
  return out;
}

}  // namespace mfdiff
