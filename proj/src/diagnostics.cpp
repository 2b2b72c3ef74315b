#include "mrlt/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace mrlt {

// ------------------------------------------------------------------ Poly

Poly Poly::monomial(int degree, const mpq_class& v) {
  std::vector<mpq_class> c(degree + 1, mpq_class(0));
  c[degree] = v;
  return Poly(std::move(c));
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

double Poly::eval(double z) const {
  double s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * z + it->get_d();
  return s;
}

Poly Poly::rescaled(const mpq_class& s) const {
  Poly r = *this;
  mpq_class f = 1;
  for (auto& c : r.c_) {
    c *= f;
    f *= s;
  }
  r.trim();
  return r;
}

Poly Poly::times_z(const mpq_class& s) const {
  if (c_.empty()) return {};
  std::vector<mpq_class> c(c_.size() + 1, mpq_class(0));
  for (std::size_t k = 0; k < c_.size(); ++k) c[k + 1] = c_[k] * s;
  return Poly(std::move(c));
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), mpq_class(0));
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), mpq_class(0));
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  trim();
  return *this;
}

Poly& Poly::operator*=(const mpq_class& s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpq_class> c(a.c_.size() + b.c_.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Poly(std::move(c));
}

std::string Poly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    mpq_class v = c_[k];
    if (!first) {
      os << (v < 0 ? " - " : " + ");
      if (v < 0) v = -v;
    }
    first = false;
    if (k == 0 || v != 1) os << v.get_str();
    if (k > 0) os << (k == 0 || v != 1 ? " " : "") << "z";
    if (k > 1) os << "^" << k;
  }
  return os.str();
}

// -------------------------------------------------------- two-cell model

namespace {

// Coarse leaf C next to fine leaf F; V is the virtual child of C facing F.
// Each leaf's right-hand side is lambda times its flux partner: F reads
// V, C reads F. Spatial prediction and projection act as the identity on
// this data, so only the time synchronization is exercised. The sequence
// follows LtStepper with L = 1.
template <class T>
struct TwoCell {
  T fine_first, coarse, fine_cycle;
  T v_star, f_ext, v_dstar;  // values read across the interface
};

template <class T, class MulW>
TwoCell<T> two_cell(SchemeKind s, const T& one, MulW zf) {
  const bool rk3 = s == SchemeKind::MRLT_NERK3;
  const bool nerk2 = s == SchemeKind::MRLT_NERK2;
  TwoCell<T> out;

  // Iteration 0: both levels start at t0.
  const T Fn = one, Cn = one, Vn = one;
  const T kF1 = zf(Vn, 1), kC1 = zf(Fn, 2);
  const T Fs = rk_stage1_k(Fn, kF1), Cs = rk_stage1_k(Cn, kC1);
  const T Cmid = (Cn + Cs) * ratio<T>(1, 2);
  T Chalf = nerk_substep1(Cn, kC1, NerkPoint::Half);
  T Cq14 = nerk_substep1(Cn, kC1, NerkPoint::Quarter);
  T Cq34 = nerk_substep1(Cn, kC1, NerkPoint::ThreeQuarter);

  // Virtual q* from the coarse midpoint value.
  const T Vs = Cmid;
  out.v_star = Vs;

  // Stage 2, fine level first.
  const T kF2 = zf(Vs, 1);
  const T Fext = sync::leaf_extrapolation(Fs, kF2);
  out.f_ext = Fext;
  // Coarse stage 2 reads the fine leaf extrapolated to t0 + dt_coarse.
  const T kC2 = zf(Fext, 2);
  T Fend, Cend, Cdd;
  if (!rk3) {
    Fend = rk2_stage2_k(Fn, Fs, kF2);
    Cend = rk2_stage2_k(Cn, Cs, kC2);
    Chalf = nerk_substep2(Chalf, kC2, NerkPoint::Half);
  } else {
    const T Fdd = rk3_stage2_k(Fn, Fs, kF2);
    Cdd = rk3_stage2_k(Cn, Cs, kC2);
    Cq14 = nerk_substep2(Cq14, kC2, NerkPoint::Quarter);
    Cq34 = nerk_substep2(Cq34, kC2, NerkPoint::ThreeQuarter);
    // Virtual q** from the coarse quarter-point value.
    const T Vdd = Cq14;
    out.v_dstar = Vdd;
    Fend = rk3_stage3_k(Fn, Fdd, zf(Vdd, 1));
    Cend = rk3_stage3_k(Cn, Cdd, zf(Fend, 2));
  }
  out.fine_first = Fend;
  out.coarse = Cend;

  // Iteration 1: only the fine level advances; the coarse leaf sits at
  // the middle of its interval.
  const T Fn1 = Fend;
  T Vn1;
  if (rk3) {
    Vn1 = Cdd;
  } else {
    Vn1 = nerk2 ? Chalf : Cmid;
  }
  const T Vend = nerk2 || rk3 ? Cend : Vn1;  // virtual value at the coarse interval end
  const T kG1 = zf(Vn1, 1);
  const T Gs = rk_stage1_k(Fn1, kG1);
  const T kG2 = zf(Vend, 1);
  if (!rk3) {
    out.fine_cycle = rk2_stage2_k(Fn1, Gs, kG2);
  } else {
    const T Gdd = rk3_stage2_k(Fn1, Gs, kG2);
    out.fine_cycle = rk3_stage3_k(Fn1, Gdd, zf(Cq34, 1));
  }
  return out;
}

TwoCell<Poly> symbolic(SchemeKind s) {
  return two_cell(s, Poly::constant(1),
                  [](const Poly& x, int k) { return x.times_z(mpq_class(k)); });
}

Poly uniform_factor(int order) {
  const Poly one = Poly::constant(1);
  auto zf = [](const Poly& x) { return x.times_z(); };
  const Poly qs = rk_stage1_k(one, zf(one));
  if (order == 2) return rk2_stage2_k(one, qs, zf(qs));
  const Poly qdd = rk3_stage2_k(one, qs, zf(qs));
  return rk3_stage3_k(one, qdd, zf(qdd));
}

}  // namespace

Poly amplification_polynomial(SchemeKind scheme, Interface where) {
  if (where == Interface::Uniform || !scheme_is_lt(scheme)) {
    const Poly g = uniform_factor(scheme_order(scheme));
    return where == Interface::FineCycle ? g * g : g;
  }
  const TwoCell<Poly> r = symbolic(scheme);
  switch (where) {
    case Interface::FineSide: return r.fine_first;
    case Interface::CoarseSide: return r.coarse.rescaled(mpq_class(1, 2));
    case Interface::FineCycle: return r.fine_cycle;
    default: return {};
  }
}

InterfaceErrors interface_error_terms() {
  const TwoCell<Poly> r = symbolic(SchemeKind::MRLT_NERK3);
  const Poly one = Poly::constant(1);
  auto hat_star = [&](int k) { return rk_stage1_k(one, one.times_z(mpq_class(k))); };
  auto hat_dstar = [&](int k) {
    const Poly qs = hat_star(k);
    return rk3_stage2_k(one, qs, qs.times_z(mpq_class(k)));
  };
  InterfaceErrors e;
  e.eps1 = hat_star(1) - r.v_star;
  e.eps2 = (hat_star(2) - r.f_ext).rescaled(mpq_class(1, 2));
  e.eps3 = hat_dstar(1) - r.v_dstar;
  e.eps4 = (hat_dstar(2) - r.fine_first).rescaled(mpq_class(1, 2));
  return e;
}

std::pair<double, double> two_cell_numeric(SchemeKind scheme, double w) {
  if (!scheme_is_lt(scheme)) throw ConfigError("two_cell_numeric needs an MRLT scheme");
  const auto r = two_cell(scheme, 1.0, [w](double x, int k) { return k * w * x; });
  return {r.fine_first, r.coarse};
}

// --------------------------------------------------------------- metrics

std::vector<double> l1_error(const UniformField& field, const UniformField& reference,
                             int nvars) {
  if (field.size() != reference.size() || field.level != reference.level ||
      field.dim != reference.dim) {
    throw DomainError("l1_error: field shapes differ");
  }
  std::vector<double> e(nvars, 0.0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (int k = 0; k < nvars; ++k) e[k] += std::fabs(reference.cells[i][k] - field.cells[i][k]);
  }
  for (double& v : e) v /= static_cast<double>(field.size());
  return e;
}

double self_convergence_order(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& c) {
  if (a.size() != b.size() || b.size() != c.size()) {
    throw DomainError("self_convergence_order: sizes differ");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::fabs(a[i] - b[i]);
    den += std::fabs(b[i] - c[i]);
  }
  if (den == 0.0) throw NumericalError("self_convergence_order: finer pair is identical");
  return std::log2(num / den);
}

double self_convergence_order(const UniformField& a, const UniformField& b, const UniformField& c,
                              int nvars) {
  std::vector<double> fa, fb, fc;
  for (const auto* f : {&a, &b, &c}) {
    auto& dst = f == &a ? fa : f == &b ? fb : fc;
    for (const State& s : f->cells) {
      for (int k = 0; k < nvars; ++k) dst.push_back(s[k]);
    }
  }
  return self_convergence_order(fa, fb, fc);
}

double cost_mu(double error, double t_method, double t_fv) {
  if (!(t_fv > 0.0)) throw NumericalError("cost_mu: reference time must be positive");
  return error * t_method / t_fv;
}

double gain_lambda(double mu_other, double mu_nerk) {
  if (!(mu_nerk > 0.0)) throw NumericalError("gain_lambda: mu of the NERK run must be positive");
  return mu_other / mu_nerk;
}

double CompressionSeries::mean() const {
  if (percent.empty()) return 0.0;
  double s = 0.0;
  for (double p : percent) s += p;
  return s / static_cast<double>(percent.size());
}

}  // namespace mrlt
