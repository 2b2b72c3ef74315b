#ifndef MRLT_TIME_SCHEMES_HPP_
#define MRLT_TIME_SCHEMES_HPP_

#include <string>
#include <utility>

#include "mrlt/state.hpp"

namespace mrlt {

// Exact-coefficient hook: stage formulas are written once and instantiated
// for floating-point states and for the rational polynomials of the
// amplification harness.
template <class T>
struct ScalarOf {
  static double ratio(long num, long den) { return static_cast<double>(num) / den; }
};

template <class T>
auto ratio(long num, long den) {
  return ScalarOf<T>::ratio(num, den);
}

// Stages take increments k = dt * f so the same code serves both uses.
template <class T>
T rk_stage1_k(const T& qn, const T& k1) {
  return qn + k1;
}
template <class T>
T rk2_stage2_k(const T& qn, const T& qs, const T& k2) {
  const auto h = ratio<T>(1, 2);
  return qn * h + qs * h + k2 * h;
}
template <class T>
T rk3_stage2_k(const T& qn, const T& qs, const T& k2) {
  return qn * ratio<T>(3, 4) + qs * ratio<T>(1, 4) + k2 * ratio<T>(1, 4);
}
template <class T>
T rk3_stage3_k(const T& qn, const T& qdd, const T& k3) {
  const auto tt = ratio<T>(2, 3);
  return qn * ratio<T>(1, 3) + qdd * tt + k3 * tt;
}

inline State rk_stage1(const State& qn, const State& f1, double dt) { return qn + dt * f1; }
inline State rk2_stage2(const State& qn, const State& qs, const State& f2, double dt) {
  return rk2_stage2_k(qn, qs, dt * f2);
}
inline State rk3_stage2(const State& qn, const State& qs, const State& f2, double dt) {
  return rk3_stage2_k(qn, qs, dt * f2);
}
inline State rk3_stage3(const State& qn, const State& qdd, const State& f3, double dt) {
  return rk3_stage3_k(qn, qdd, dt * f3);
}

// Dense-output weights of the two-stage scheme at t + theta dt.
std::pair<double, double> nerk_beta(double theta);

// Quarter-grid thetas used by the schedulers, with exact weights.
enum class NerkPoint { Quarter = 1, Half = 2, ThreeQuarter = 3 };

template <class T>
std::pair<decltype(ratio<T>(1, 1)), decltype(ratio<T>(1, 1))> nerk_beta_exact(NerkPoint p) {
  switch (p) {
    case NerkPoint::Quarter: return {ratio<T>(7, 32), ratio<T>(1, 32)};
    case NerkPoint::Half: return {ratio<T>(3, 8), ratio<T>(1, 8)};
    case NerkPoint::ThreeQuarter: return {ratio<T>(15, 32), ratio<T>(9, 32)};
  }
  return {ratio<T>(0, 1), ratio<T>(0, 1)};
}

// First sub-step fills the slot after stage 1, second one after stage 2.
template <class T>
T nerk_substep1(const T& qn, const T& k1, NerkPoint p) {
  return qn + k1 * nerk_beta_exact<T>(p).first;
}
template <class T>
T nerk_substep2(const T& partial, const T& k2, NerkPoint p) {
  return partial + k2 * nerk_beta_exact<T>(p).second;
}

State nerk2_value(const State& qn, const State& f1, const State& f2, double dt, double theta);

enum class SchemeKind { FV_RK2, FV_RK3, MR_RK2, MR_RK3, MRLT_RK2, MRLT_NERK2, MRLT_NERK3 };

SchemeKind parse_scheme(const std::string& name);
std::string scheme_name(SchemeKind k);
int scheme_order(SchemeKind k);  // number of RK stages
bool scheme_is_adaptive(SchemeKind k);
bool scheme_is_lt(SchemeKind k);

// Explicit step limit on the finest cells: advective sigma dx / s_max,
// and sigma dx^2 / (2 d nu) when diffusion is present.
double cfl_timestep(double max_speed, double dx_finest, double sigma, int dim, double nu,
                    double fallback_dt = 0.0);

class Model;
class GradedTree;
// Same limit with the speed bound taken over the leaves of `tree`.
double cfl_timestep(const Model& model, GradedTree& tree, double sigma, double fallback_dt = 0.0);

}  // namespace mrlt

#endif  // MRLT_TIME_SCHEMES_HPP_
