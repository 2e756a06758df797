#include "chatter/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "chatter/errors.hpp"
#include "chatter/rootfind.hpp"

namespace chatter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <std::size_t N>
using Arr = std::array<double, N>;

template <std::size_t N>
Arr<N> axpy(const Arr<N>& y, double a, const Arr<N>& x) {
  Arr<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + a * x[i];
  return out;
}

template <std::size_t N>
bool all_finite(const Arr<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

double norm4(const Vec4& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]); }

Vec4 matvec(const Mat4& m, const Vec4& x) {
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i] += m[i][j] * x[j];
  }
  return out;
}

// Solution stored on a uniform grid with one-sided derivatives at every node,
// read back by cubic Hermite interpolation. A auxiliary channels are kept the
// same way for quantities that are integrated over a delay interval.
template <std::size_t N, std::size_t A>
class DenseHistory {
 public:
  using State = Arr<N>;
  using Aux = Arr<A>;

  DenseHistory(double step, double eta0) : h_(step), eta0_(eta0) {}

  void push(const State& x, const State& dl, const State& dr) {
    x_.push_back(x);
    dl_.push_back(dl);
    dr_.push_back(dr);
    a_.push_back(Aux{});
    al_.push_back(Aux{});
    ar_.push_back(Aux{});
  }

  void set_node(std::size_t i, const State& x, const State& dl, const State& dr) {
    x_[i] = x;
    dl_[i] = dl;
    dr_[i] = dr;
  }
  void set_aux(std::size_t i, const Aux& a, const Aux& al, const Aux& ar) {
    a_[i] = a;
    al_[i] = al;
    ar_[i] = ar;
  }

  std::size_t size() const { return x_.size(); }
  double eta(std::size_t i) const {
    return eta0_ + static_cast<double>(static_cast<std::ptrdiff_t>(i) + dropped_) * h_;
  }
  const State& node(std::size_t i) const { return x_[i]; }
  const State& node_left_rate(std::size_t i) const { return dl_[i]; }
  const State& node_right_rate(std::size_t i) const { return dr_[i]; }

  State value(double e) const { return interp(x_, dr_, dl_, e, false); }
  State slope(double e) const { return interp(x_, dr_, dl_, e, true); }
  Aux aux_value(double e) const { return interp(a_, ar_, al_, e, false); }

  // Exact integral of the Hermite interpolant of the auxiliary channels
  // between two grid nodes.
  Aux aux_integral(double from, double to) const {
    const auto ia = index_of(from);
    const auto ib = index_of(to);
    Aux sum{};
    for (std::size_t i = ia; i < ib; ++i) {
      for (std::size_t c = 0; c < A; ++c) {
        sum[c] += 0.5 * h_ * (a_[i][c] + a_[i + 1][c]) +
                  h_ * h_ / 12.0 * (ar_[i][c] - al_[i + 1][c]);
      }
    }
    return sum;
  }

  void scale(double f) {
    for (auto* v : {&x_, &dl_, &dr_}) {
      for (auto& s : *v) {
        for (auto& e : s) e *= f;
      }
    }
    for (auto* v : {&a_, &al_, &ar_}) {
      for (auto& s : *v) {
        for (auto& e : s) e *= f;
      }
    }
  }

  // Forgets nodes before `keep_from`; amortized by dropping only once they
  // make up half the store.
  void trim(double keep_from) {
    const double u = std::floor((keep_from - eta(0)) / h_) - 1.0;
    if (u <= 0.0 || u < 0.5 * static_cast<double>(x_.size())) return;
    const auto n = static_cast<std::ptrdiff_t>(u);
    for (auto* v : {&x_, &dl_, &dr_}) v->erase(v->begin(), v->begin() + n);
    for (auto* v : {&a_, &al_, &ar_}) v->erase(v->begin(), v->begin() + n);
    dropped_ += n;
  }

  // Node i with eta(i) <= e < eta(i+1), clamped to the stored range.
  std::size_t segment_of(double e) const {
    const double u = (e - eta0_) / h_ - static_cast<double>(dropped_);
    const double fl = std::floor(u + 1e-9);
    std::size_t i = fl <= 0.0 ? 0 : static_cast<std::size_t>(fl);
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return i;
  }

 private:
  std::size_t index_of(double e) const {
    return static_cast<std::size_t>(std::llround((e - eta0_) / h_) - dropped_);
  }

  template <class V>
  V interp(const std::vector<V>& x, const std::vector<V>& dr, const std::vector<V>& dl, double e,
           bool derivative) const {
    const std::size_t i = segment_of(e);
    const double t = (e - eta(i)) / h_;
    const double t2 = t * t;
    const double t3 = t2 * t;
    double b0, b1, b2, b3;
    if (!derivative) {
      b0 = 2 * t3 - 3 * t2 + 1;
      b1 = (t3 - 2 * t2 + t) * h_;
      b2 = -2 * t3 + 3 * t2;
      b3 = (t3 - t2) * h_;
    } else {
      b0 = (6 * t2 - 6 * t) / h_;
      b1 = 3 * t2 - 4 * t + 1;
      b2 = (-6 * t2 + 6 * t) / h_;
      b3 = 3 * t2 - 2 * t;
    }
    V out;
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = b0 * x[i][c] + b1 * dr[i][c] + b2 * x[i + 1][c] + b3 * dl[i + 1][c];
    }
    return out;
  }

  double h_;
  double eta0_;
  std::ptrdiff_t dropped_ = 0;
  std::vector<State> x_, dl_, dr_;
  std::vector<Aux> a_, al_, ar_;
};

int steps_per_unit(double step) {
  if (!(step > 0.0) || step > 1.0) throw DomainError("step must lie in (0, 1]");
  const long n = std::lround(1.0 / step);
  if (n < 1 || std::abs(static_cast<double>(n) * step - 1.0) > 1e-9) {
    throw DomainError("step must divide the unit delay exactly");
  }
  return static_cast<int>(n);
}

// ---- models ---------------------------------------------------------------
//
// A model supplies: N (state size), A (auxiliary channels), depth (history
// length in delay units), aux_depth (how far back the auxiliary channels are
// needed), lift (history vector to state), rhs, aux, project, observe, delay.

// Linear system; state (x, int_{-1}^0 x(eta+s) ds, int_{-1}^0 x(eta+s-1) ds).
struct LinearModel {
  static constexpr std::size_t N = 12;
  static constexpr std::size_t A = 4;
  static constexpr int depth = 2;
  static constexpr int aux_depth = 2;
  using State = Arr<N>;
  using Aux = Arr<A>;
  using Hist = DenseHistory<N, A>;

  const LinearizedSystem& sys;
  bool delayed;

  static Vec4 head(const State& y) { return {y[0], y[1], y[2], y[3]}; }
  static Vec4 part(const State& y, int k) { return {y[4 * k], y[4 * k + 1], y[4 * k + 2], y[4 * k + 3]}; }

  State lift(const Vec4& x) const {
    State y{};
    std::copy(x.begin(), x.end(), y.begin());
    return y;
  }

  State rhs(double eta, const State& y, const Hist& h) const {
    const Vec4 x = head(y);
    const Vec4 x1 = head(h.value(eta - 1.0));
    const Vec4 a = matvec(sys.A0, x);
    const Vec4 b = matvec(sys.A1, x1);
    const Vec4 c = matvec(sys.B0, part(y, 1));
    const Vec4 d = matvec(sys.B1, part(y, 2));
    State out{};
    for (int i = 0; i < 4; ++i) {
      out[i] = a[i] + b[i] + c[i] + d[i];
      out[4 + i] = x[i] - x1[i];
    }
    if (delayed) {
      const Vec4 x2 = head(h.value(eta - 2.0));
      for (int i = 0; i < 4; ++i) out[8 + i] = x1[i] - x2[i];
    }
    return out;
  }

  std::pair<Aux, Aux> aux(double, const State& y, const State& dy, const Hist&) const {
    return {head(y), head(dy)};
  }

  void project(State& y, const Hist& h, double eta) const {
    const Aux i1 = h.aux_integral(eta - 1.0, eta);
    std::copy(i1.begin(), i1.end(), y.begin() + 4);
    if (delayed) {
      const Aux i2 = h.aux_integral(eta - 2.0, eta - 1.0);
      std::copy(i2.begin(), i2.end(), y.begin() + 8);
    }
  }

  Vec4 observe(const State& y) const { return head(y); }
  double delay(const State&) const { return kNaN; }
};

// Transformed nonlinear system; state (r, rho, j, l, k), auxiliary channel
// g = deta-to-dt factor whose delay-interval integral is k.
struct NonlinearModel {
  static constexpr std::size_t N = 5;
  static constexpr std::size_t A = 1;
  static constexpr int depth = 2;
  static constexpr int aux_depth = 1;
  using State = Arr<N>;
  using Aux = Arr<A>;
  using Hist = DenseHistory<N, A>;

  Variant variant;
  const PhysicalParams& p;
  double c;
  StationaryState st;

  State lift(const Vec4& x) const { return {x[0], x[1], x[2], x[3], 0.0}; }

  double g_of(double eta, double r_lag, double j_now, double r_now) const {
    if (variant == Variant::Delayed) {
      const double den = c * r_lag - j_now;
      if (!(den > 0.0)) throw TransformViolated("c r(eta-1) - j(eta) <= 0", eta);
      return kTwoPi * p.R / den;
    }
    if (!(r_now > 0.0)) throw TransformViolated("r(eta) <= 0", eta);
    return kTwoPi * p.R / (c * r_now);
  }

  State rhs(double eta, const State& y, const Hist& h) const {
    const State lag = h.value(eta - 1.0);
    const double g = g_of(eta, lag[0], y[2], y[0]);
    const double chip = p.nu * y[4] + y[1] - lag[1];
    if (!(chip > 0.0)) throw NegativeChipThickness(eta);
    const double force = p.omega_cut * std::pow(chip, p.q);
    State out;
    out[0] = y[2] * g;
    out[1] = y[3] * g;
    out[2] = (-p.c_x / p.m * y[2] - p.k_x / p.m * y[0] + p.K_x * force / p.m) * g;
    out[3] = (-p.c_y / p.m * y[3] - p.k_y / p.m * y[1] - p.K_y * force / p.m) * g;
    out[4] = g - h.aux_value(eta - 1.0)[0];
    return out;
  }

  std::pair<Aux, Aux> aux(double eta, const State& y, const State& dy, const Hist& h) const {
    if (variant == Variant::Delayed) {
      const double r_lag = h.value(eta - 1.0)[0];
      const double dr_lag = h.slope(eta - 1.0)[0];
      const double g = g_of(eta, r_lag, y[2], y[0]);
      const double dg = -g * g / (kTwoPi * p.R) * (c * dr_lag - dy[2]);
      return {{g}, {dg}};
    }
    const double g = g_of(eta, 0.0, 0.0, y[0]);
    return {{g}, {-g * dy[0] / y[0]}};
  }

  void project(State& y, const Hist& h, double eta) const {
    y[4] = h.aux_integral(eta - 1.0, eta)[0];
  }

  Vec4 observe(const State& y) const {
    return {y[0] - st.r_star, y[1] - st.rho_star, y[2], y[3]};
  }
  double delay(const State& y) const { return y[4]; }
};

template <class Model>
Trajectory run_model(const Model& m, const History& init, double eta_end, double step,
                     bool renorm) {
  using State = typename Model::State;
  constexpr std::size_t N = Model::N;
  const int spu = steps_per_unit(step);
  if (!(eta_end > 0.0)) throw DomainError("eta_end must be positive");
  const long nsteps = std::lround(eta_end * spu);
  const int lead = Model::depth * spu;

  typename Model::Hist hist(step, -static_cast<double>(Model::depth));
  for (int i = 0; i <= lead; ++i) {
    const double e = -Model::depth + static_cast<double>(i) / spu;
    const State y = m.lift(init.value(e));
    const State d = m.lift(init.derivative(e));
    hist.push(y, d, d);
  }
  for (int i = (Model::depth - Model::aux_depth) * spu; i <= lead; ++i) {
    const double e = hist.eta(i);
    const auto [a, da] = m.aux(e, hist.node(i), hist.node_left_rate(i), hist);
    hist.set_aux(i, a, da, da);
  }

  // Node at eta = 0: fill the integral components, then the right-hand rate.
  const auto i0 = static_cast<std::size_t>(lead);
  State y = hist.node(i0);
  m.project(y, hist, 0.0);
  const State dl0 = hist.node_left_rate(i0);
  State dy = m.rhs(0.0, y, hist);
  hist.set_node(i0, y, dl0, dy);
  {
    const auto [a, dal] = m.aux(0.0, y, dl0, hist);
    const auto [a2, dar] = m.aux(0.0, y, dy, hist);
    (void)a2;
    hist.set_aux(i0, a, dal, dar);
  }

  Trajectory tr;
  double log_scale = 0.0;
  auto record = [&](double e, const State& s) {
    tr.eta.push_back(e);
    tr.states.push_back(m.observe(s));
    const double k = m.delay(s);
    if (!std::isnan(k)) tr.k_values.push_back(k);
    tr.log_scale.push_back(log_scale);
  };
  record(0.0, y);

  const double hh = step;
  for (long k = 0; k < nsteps; ++k) {
    const double e = static_cast<double>(k) / spu;
    const State& k1 = dy;
    const State k2 = m.rhs(e + 0.5 * hh, axpy<N>(y, 0.5 * hh, k1), hist);
    const State k3 = m.rhs(e + 0.5 * hh, axpy<N>(y, 0.5 * hh, k2), hist);
    const State k4 = m.rhs(e + hh, axpy<N>(y, hh, k3), hist);
    State yn;
    for (std::size_t i = 0; i < N; ++i) {
      yn[i] = y[i] + hh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!all_finite<N>(yn)) throw Diverged("non-finite state at eta=" + std::to_string(e + hh));
    const double en = static_cast<double>(k + 1) / spu;

    State dn = m.rhs(en, yn, hist);
    hist.push(yn, dn, dn);
    const std::size_t last = hist.size() - 1;
    {
      const auto [a, da] = m.aux(en, yn, dn, hist);
      hist.set_aux(last, a, da, da);
    }
    m.project(yn, hist, en);
    dn = m.rhs(en, yn, hist);
    hist.set_node(last, yn, dn, dn);
    {
      const auto [a, da] = m.aux(en, yn, dn, hist);
      hist.set_aux(last, a, da, da);
    }
    y = yn;
    dy = dn;
    hist.trim(en - static_cast<double>(Model::depth) - 1.0);

    const double nx = norm4(m.observe(y));
    if (renorm) {
      if (nx > 1e3 || (nx > 0.0 && nx < 1e-3)) {
        hist.scale(1.0 / nx);
        for (auto& v : y) v /= nx;
        for (auto& v : dy) v /= nx;
        log_scale += std::log(nx);
      }
    } else if (nx > 1e12) {
      throw Diverged("state norm exceeded 1e12 at eta=" + std::to_string(en));
    }
    record(en, y);
  }
  tr.growth_rate = fit_growth_rate(tr);
  return tr;
}

}  // namespace

History constant_history(const Vec4& x) {
  return {[x](double) { return x; }, [](double) { return Vec4{}; }};
}

LinearizedSystem linearize(Variant v, const PhysicalParams& phys) {
  const double c = spindle_gain(phys);
  const double ks = stationary_delay(phys, c);
  const double gx = phys.q * phys.K_x * phys.omega_cut * std::pow(phys.nu * ks, phys.q - 1.0) / phys.m;
  const double gy = phys.q * phys.K_y * phys.omega_cut * std::pow(phys.nu * ks, phys.q - 1.0) / phys.m;
  Mat4 M{}, Nm{}, P{}, Q{};
  M[0][2] = 1.0;
  M[1][3] = 1.0;
  M[2] = {-phys.k_x / phys.m, gx, -phys.c_x / phys.m, 0.0};
  M[3] = {0.0, -phys.k_y / phys.m - gy, 0.0, -phys.c_y / phys.m};
  Nm[2][1] = -gx;
  Nm[3][1] = gy;
  P[2][2] = -gx;
  P[3][2] = gy;
  Q[2][0] = -gx;
  Q[3][0] = gy;

  LinearizedSystem s;
  s.variant = v;
  s.k_star = ks;
  const double w = ks * ks * ks * phys.nu / (kTwoPi * phys.R);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      s.A0[i][j] = ks * M[i][j];
      s.A1[i][j] = ks * Nm[i][j];
      if (v == Variant::Delayed) {
        s.B0[i][j] = -w * P[i][j];
        s.B1[i][j] = c * w * Q[i][j];
      } else {
        s.B0[i][j] = c * w * Q[i][j];
      }
    }
  }
  return s;
}

LinearizedSystem linearize(const CharParams& p) {
  validate(p);
  const double d = p.delta;
  double h2 = p.h;
  double pf = 0.0;
  if (p.variant == Variant::Delayed) {
    // h1 = h2 (1 - p) with k_r = 1; pick p so that h2 stays nonnegative.
    pf = p.h >= 0.0 ? 0.5 : 1.5;
    h2 = p.h / (1.0 - pf);
  }
  const double g = p.coupling * d * h2;
  LinearizedSystem s;
  s.variant = p.variant;
  s.k_star = 1.0;
  s.A0[0][2] = 1.0;
  s.A0[1][3] = 1.0;
  s.A0[2] = {-d, g, -p.xi, 0.0};
  s.A0[3] = {0.0, -d - g, 0.0, -p.xi};
  s.A1[2][1] = -g;
  s.A1[3][1] = g;
  const double qd = p.coupling * p.q * d;
  if (p.variant == Variant::Delayed) {
    s.B0[2][2] = pf * g;
    s.B0[3][2] = -pf * g;
    s.B1[2][0] = -qd;
    s.B1[3][0] = qd;
  } else {
    s.B0[2][0] = -qd;
    s.B0[3][0] = qd;
  }
  return s;
}

Trajectory integrate_linear(const LinearizedSystem& sys, const History& initial,
                            const LinearOptions& opt) {
  const LinearModel m{sys, sys.variant == Variant::Delayed};
  return run_model(m, initial, opt.eta_end, opt.step, opt.renormalize);
}

Trajectory integrate_linear(const LinearizedSystem& sys, const History& initial, double eta_end,
                            double step) {
  return integrate_linear(sys, initial, LinearOptions{eta_end, step, false});
}

Vec5 transformed_field(Variant v, const PhysicalParams& phys, double c, const Vec5& now,
                       const Vec5& lag1, const Vec5& lag2) {
  validate(phys);
  auto g_at = [&](double r_lag, const Vec5& s) {
    if (v == Variant::Delayed) {
      const double den = c * r_lag - s[2];
      if (!(den > 0.0)) throw TransformViolated("c r(eta-1) - j(eta) <= 0", 0.0);
      return kTwoPi * phys.R / den;
    }
    if (!(s[0] > 0.0)) throw TransformViolated("r(eta) <= 0", 0.0);
    return kTwoPi * phys.R / (c * s[0]);
  };
  const double g = g_at(lag1[0], now);
  const double g_lag = g_at(lag2[0], lag1);
  const double chip = phys.nu * now[4] + now[1] - lag1[1];
  if (!(chip > 0.0)) throw NegativeChipThickness(0.0);
  const double force = phys.omega_cut * std::pow(chip, phys.q);
  Vec5 out;
  out[0] = now[2] * g;
  out[1] = now[3] * g;
  out[2] = (-phys.c_x / phys.m * now[2] - phys.k_x / phys.m * now[0] + phys.K_x * force / phys.m) * g;
  out[3] = (-phys.c_y / phys.m * now[3] - phys.k_y / phys.m * now[1] - phys.K_y * force / phys.m) * g;
  out[4] = g - g_lag;
  return out;
}

Trajectory integrate_nonlinear_transformed(Variant v, const PhysicalParams& phys, double c,
                                           const History& initial, double eta_end, double step) {
  validate(phys);
  const NonlinearModel m{v, phys, c, stationary_state(phys, c)};
  return run_model(m, initial, eta_end, step, false);
}

Trajectory integrate_original_instant(const PhysicalParams& phys, double c,
                                      const History& initial, double t_end, double step) {
  validate(phys);
  if (!(step > 0.0) || !(t_end > 0.0)) throw DomainError("step and t_end must be positive");
  using State = Arr<5>;
  using Hist = DenseHistory<5, 0>;
  const double scale = c / (kTwoPi * phys.R);
  const StationaryState st = stationary_state(phys, c);

  // Sample the initial function backward from t = 0 until the cumulative
  // integral H drops below -1.05, then store it forward.
  std::vector<State> back_vals, back_rates;
  double Hc = 0.0;
  for (long i = 0;; ++i) {
    const double t = -static_cast<double>(i) * step;
    const Vec4 x = initial.value(t);
    const Vec4 d = initial.derivative(t);
    if (!(x[0] > 0.0)) throw TransformViolated("x(t) <= 0 in the initial function", t);
    if (i > 0) {
      const State& nxt = back_vals.back();
      const State& nrt = back_rates.back();
      Hc -= 0.5 * step * scale * (x[0] + nxt[0]) +
            step * step / 12.0 * scale * (d[0] - nrt[0]);
    }
    back_vals.push_back({x[0], x[1], x[2], x[3], Hc});
    back_rates.push_back({d[0], d[1], d[2], d[3], scale * x[0]});
    if (Hc < -1.05) break;
    if (i > 100000000) throw DomainError("initial function too short");
  }
  const std::size_t lead = back_vals.size() - 1;
  Hist hist(step, -static_cast<double>(lead) * step);
  for (std::size_t i = lead + 1; i-- > 0;) hist.push(back_vals[i], back_rates[i], back_rates[i]);

  auto tau_of = [&](double t, double H) {
    const double target = H - 1.0;
    // Binary search on node values (H is increasing), then Brent inside.
    std::size_t lo = 0;
    std::size_t hi = hist.size() - 1;
    if (!(hist.node(lo)[4] <= target) || !(hist.node(hi)[4] >= target)) {
      throw DomainError("threshold delay outside the stored history; reduce the step");
    }
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (hist.node(mid)[4] <= target ? lo : hi) = mid;
    }
    double s;
    const double a = hist.eta(lo);
    const double b = hist.eta(hi);
    auto f = [&](double u) { return hist.value(u)[4] - target; };
    const double fa = hist.node(lo)[4] - target;
    const double fb = hist.node(hi)[4] - target;
    if (fa == 0.0) {
      s = a;
    } else if (fb == 0.0) {
      s = b;
    } else {
      s = solve_bracketed(f, Bracket{a, b, fa, fb}, 1e-15 * std::max(1.0, std::abs(b)), 0.0);
    }
    return std::pair{t - s, s};
  };

  auto rhs = [&](double t, const State& y) {
    if (!(y[0] > 0.0)) throw TransformViolated("x(t) <= 0", y[4]);
    const auto [tau, s] = tau_of(t, y[4]);
    const State lag = hist.value(s);
    const double chip = phys.nu * tau + y[1] - lag[1];
    if (!(chip > 0.0)) throw NegativeChipThickness(y[4]);
    const double force = phys.omega_cut * std::pow(chip, phys.q);
    State out;
    out[0] = y[2];
    out[1] = y[3];
    out[2] = -phys.c_x / phys.m * y[2] - phys.k_x / phys.m * y[0] + phys.K_x * force / phys.m;
    out[3] = -phys.c_y / phys.m * y[3] - phys.k_y / phys.m * y[1] - phys.K_y * force / phys.m;
    out[4] = scale * y[0];
    return out;
  };

  Trajectory tr;
  State y = hist.node(lead);
  State dy = rhs(0.0, y);
  hist.set_node(lead, y, hist.node_left_rate(lead), dy);
  auto record = [&](double t, const State& s) {
    tr.eta.push_back(t);
    tr.states.push_back({s[0] - st.r_star, s[1] - st.rho_star, s[2], s[3]});
    tr.k_values.push_back(tau_of(t, s[4]).first);
    tr.warp.push_back(s[4]);
    tr.log_scale.push_back(0.0);
  };
  record(0.0, y);
  const long nsteps = std::lround(t_end / step);
  for (long k = 0; k < nsteps; ++k) {
    const double t = static_cast<double>(k) * step;
    const State k2 = rhs(t + 0.5 * step, axpy<5>(y, 0.5 * step, dy));
    const State k3 = rhs(t + 0.5 * step, axpy<5>(y, 0.5 * step, k2));
    const State k4 = rhs(t + step, axpy<5>(y, step, k3));
    for (std::size_t i = 0; i < 5; ++i) {
      y[i] += step / 6.0 * (dy[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!all_finite<5>(y)) throw Diverged("non-finite state at t=" + std::to_string(t + step));
    const double tn = static_cast<double>(k + 1) * step;
    dy = rhs(tn, y);
    hist.push(y, dy, dy);
    record(tn, y);
  }
  tr.growth_rate = fit_growth_rate(tr);
  return tr;
}

double fit_growth_rate(const Trajectory& traj) {
  if (traj.eta.size() < 3) return kNaN;
  const double t_end = traj.eta.back();
  const double t_start = traj.eta.front() + 2.0 * (t_end - traj.eta.front()) / 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (std::size_t i = 0; i < traj.eta.size(); ++i) {
    if (traj.eta[i] < t_start) continue;
    const double nx = norm4(traj.states[i]);
    if (!(nx > 0.0)) continue;
    const double x = traj.eta[i];
    const double yv = std::log(nx) + traj.log_scale[i];
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++n;
  }
  if (n < 2) return kNaN;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return kNaN;
  return (n * sxy - sx * sy) / den;
}

namespace {

// Four-point Lagrange interpolation of a uniformly sampled series, with the
// stencil kept inside [unit, unit+1] where the solution is smooth.
template <class Get>
double lagrange_within_unit(const std::vector<double>& grid, double x, Get get) {
  const double h = grid[1] - grid[0];
  const double unit = std::floor(x + 1e-12);
  const long first = std::lround((unit - grid.front()) / h);
  const long last = std::lround((unit + 1.0 - grid.front()) / h);
  long i = static_cast<long>(std::floor((x - grid.front()) / h)) - 1;
  i = std::clamp(i, first, std::max(first, last - 3));
  i = std::clamp(i, 0L, static_cast<long>(grid.size()) - 4);
  double sum = 0.0;
  for (long a = i; a < i + 4; ++a) {
    double w = 1.0;
    for (long b = i; b < i + 4; ++b) {
      if (b != a) w *= (x - grid[b]) / (grid[a] - grid[b]);
    }
    sum += w * get(a);
  }
  return sum;
}

}  // namespace

TransformDiscrepancy compare_transform(const PhysicalParams& phys, const Vec4& offset,
                                       double eta_end, double eta_step, double t_step) {
  const double c = spindle_gain(phys);
  const StationaryState st = stationary_state(phys, c);
  const Vec4 x0{st.r_star + offset[0], st.rho_star + offset[1], 0.0, 0.0};
  const History hist = constant_history(x0);

  const Trajectory te = integrate_nonlinear_transformed(Variant::Instant, phys, c, hist, eta_end,
                                                        eta_step);
  // Physical time needed to reach eta_end, from the mean rate of eta.
  const double t_end = 1.05 * eta_end * kTwoPi * phys.R / (c * x0[0]);
  const Trajectory tt = integrate_original_instant(phys, c, hist, t_end, t_step);

  TransformDiscrepancy out;
  double dev = 0.0;
  for (const auto& s : te.states) dev = std::max(dev, norm4(s));
  if (!(dev > 0.0)) dev = 1.0;
  for (std::size_t i = 0; i < tt.eta.size(); ++i) {
    const double e = tt.warp[i];
    if (e <= 0.0 || e >= eta_end) continue;
    Vec4 s;
    for (int c4 = 0; c4 < 4; ++c4) {
      s[c4] = lagrange_within_unit(te.eta, e, [&](long a) { return te.states[a][c4]; });
    }
    const double k = lagrange_within_unit(te.eta, e, [&](long a) { return te.k_values[a]; });
    Vec4 d;
    for (int c4 = 0; c4 < 4; ++c4) d[c4] = s[c4] - tt.states[i][c4];
    out.state = std::max(out.state, norm4(d) / dev);
    out.delay = std::max(out.delay, std::abs(k - tt.k_values[i]) / st.k_star);
    ++out.compared;
  }
  return out;
}

}  // namespace chatter
