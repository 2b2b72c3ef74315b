#ifndef MRLT_DIAGNOSTICS_HPP_
#define MRLT_DIAGNOSTICS_HPP_

#include <gmpxx.h>

#include <string>
#include <vector>

#include "mrlt/mr_analysis.hpp"
#include "mrlt/sync_formulas.hpp"
#include "mrlt/time_schemes.hpp"

namespace mrlt {

// Polynomial in z with exact rational coefficients, ascending degree.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<mpq_class> c) : c_(std::move(c)) { trim(); }
  static Poly constant(const mpq_class& v) { return Poly({v}); }
  static Poly monomial(int degree, const mpq_class& v = 1);

  const std::vector<mpq_class>& coeffs() const { return c_; }
  mpq_class coeff(int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : mpq_class(0); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double eval(double z) const;
  // p(z) with z replaced by s * z.
  Poly rescaled(const mpq_class& s) const;
  Poly times_z(const mpq_class& s = 1) const;  // s * z * p
  std::string str() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const mpq_class& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= mpq_class(-1); }
  friend Poly operator*(Poly a, const mpq_class& s) { return a *= s; }
  friend Poly operator*(const mpq_class& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<mpq_class> c_;
};

template <>
struct ScalarOf<Poly> {
  static mpq_class ratio(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
};

enum class Interface { Uniform, CoarseSide, FineSide, FineCycle };

// One-step amplification factor of dq/dt = lambda q. For the interface
// cases a coarse leaf and a fine leaf are coupled through their flux
// partner (each sees lambda times the other's value) and stepped through
// one LT cycle. FineSide is the fine leaf's first step (z = lambda
// dt_fine), CoarseSide the coarse leaf's step (z = lambda dt_coarse) and
// FineCycle both fine steps (z = lambda dt_fine). Global-step schemes
// give the plain RK factor.
Poly amplification_polynomial(SchemeKind scheme, Interface where);

struct InterfaceErrors {
  Poly eps1, eps2, eps3, eps4;  // multiples of the initial value
};
// eps1, eps3 in the fine z; eps2, eps4 in the coarse z.
InterfaceErrors interface_error_terms();

// Floating-point run of the same two-cell iteration at z_fine = w; returns
// {fine leaf after its first step, coarse leaf after its step}.
std::pair<double, double> two_cell_numeric(SchemeKind scheme, double w);

// ------------------------------------------------------------- metrics

// Mean absolute difference per variable over a uniform level.
std::vector<double> l1_error(const UniformField& field, const UniformField& reference, int nvars);

// log2 of the L1 ratio |a - b| / |b - c| for runs at dt, dt/2, dt/4.
double self_convergence_order(const UniformField& a, const UniformField& b, const UniformField& c,
                              int nvars);
double self_convergence_order(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& c);

double cost_mu(double error, double t_method, double t_fv);
double gain_lambda(double mu_other, double mu_nerk);

struct CompressionSeries {
  std::vector<double> percent;
  void record(const GradedTree& tree) { percent.push_back(leaf_statistics(tree).compression_percent); }
  double mean() const;
  double final() const { return percent.empty() ? 0.0 : percent.back(); }
};

}  // namespace mrlt

#endif  // MRLT_DIAGNOSTICS_HPP_
