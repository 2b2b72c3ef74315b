#ifndef MRLT_STATE_HPP_
#define MRLT_STATE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrlt {

constexpr int kMaxVars = 4;

// Fixed-capacity vector of conserved averages. Unused trailing
// components stay zero so arithmetic can run over all slots.
struct State {
  std::array<double, kMaxVars> v{};

  State() = default;
  explicit State(double s) { v.fill(s); }
  State(std::initializer_list<double> init) {
    std::size_t k = 0;
    for (double x : init) {
      if (k < v.size()) v[k++] = x;
    }
  }

  double& operator[](int k) { return v[k]; }
  double operator[](int k) const { return v[k]; }

  State& operator+=(const State& o) {
    for (int k = 0; k < kMaxVars; ++k) v[k] += o.v[k];
    return *this;
  }
  State& operator-=(const State& o) {
    for (int k = 0; k < kMaxVars; ++k) v[k] -= o.v[k];
    return *this;
  }
  State& operator*=(double s) {
    for (int k = 0; k < kMaxVars; ++k) v[k] *= s;
    return *this;
  }

  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a -= b; }
  friend State operator-(State a) {
    for (int k = 0; k < kMaxVars; ++k) a.v[k] = -a.v[k];
    return a;
  }
  friend State operator*(State a, double s) { return a *= s; }
  friend State operator*(double s, State a) { return a *= s; }
  friend bool operator==(const State& a, const State& b) { return a.v == b.v; }
};

inline double max_abs(const State& s, int nvars) {
  double m = 0.0;
  for (int k = 0; k < nvars; ++k) m = std::fmax(m, std::fabs(s[k]));
  return m;
}

// Error taxonomy shared by all modules.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct TopologyError : Error {
  using Error::Error;
};

}  // namespace mrlt

#endif  // MRLT_STATE_HPP_
