#ifndef MRLT_SYNC_FORMULAS_HPP_
#define MRLT_SYNC_FORMULAS_HPP_

#include "mrlt/time_schemes.hpp"

// Time-synchronization relations between levels of an LT iteration.
// Notation: qn at the interval start, qs the stage-1 value (first-order at
// the interval end), q14/q12/q34 dense-output values at theta = 1/4, 1/2,
// 3/4, qdd the RK3 stage-2 value.

namespace mrlt::sync {

// Leaf value two fine steps ahead: q* + dt f(q*).
template <class T>
T leaf_extrapolation(const T& qs, const T& k2) {
  return qs + k2;
}

// Internal node stage-1 value carried one interval further.
template <class T>
T node_extrapolation(const T& qn, const T& qs) {
  return qs * ratio<T>(2, 1) - qn;
}

// Stage-1 value of a node from its midpoint average.
template <class T>
T refresh_extrapolation(const T& qn, const T& qmid) {
  return qmid * ratio<T>(2, 1) - qn;
}

template <class T>
T rk3_three_quarter(const T& qn, const T& qs, const T& q14) {
  return qn * ratio<T>(-13, 2) - qs * ratio<T>(3, 2) + q14 * ratio<T>(9, 1);
}

template <class T>
T rk3_dstar(const T& qn, const T& qs, const T& q14) {
  return qn * ratio<T>(-11, 2) - qs * ratio<T>(3, 2) + q14 * ratio<T>(8, 1);
}

// Inverse of rk3_dstar for q14.
template <class T>
T rk3_quarter_from_dstar(const T& qn, const T& qs, const T& qdd) {
  return (qdd + qn * ratio<T>(11, 2) + qs * ratio<T>(3, 2)) * ratio<T>(1, 8);
}

// Dense output through (0, qn), (1/4, q14) with the slope fixed by qs.
inline State nerk_reconstruct(const State& qn, const State& qs, const State& q14, double theta) {
  const double t2 = theta * theta;
  return (1.0 - theta - 12.0 * t2) * qn + (theta - 4.0 * t2) * qs + (16.0 * t2) * q14;
}

template <class T>
T rk3_end(const T& qn, const T& q14, const T& q34) {
  return qn + (q34 - q14) * ratio<T>(2, 1);
}

template <class T>
T post_evolution(const T& qn, const T& qs, const T& q12) {
  return qn * ratio<T>(-2, 1) - qs + q12 * ratio<T>(4, 1);
}

}  // namespace mrlt::sync

#endif  // MRLT_SYNC_FORMULAS_HPP_
