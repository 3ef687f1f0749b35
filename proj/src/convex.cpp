#include "supneu/convex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace supneu {

namespace {

// Locate the table segment containing tau (tau within [t_front, t_back]).
std::size_t segment_of(const std::vector<double>& nodes, double tau) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), tau);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (i == 0) return 0;
  if (i >= nodes.size()) return nodes.size() - 2;
  return i - 1;
}

double table_f(const Nonlinearity& nl, double t) {
  const auto& tn = nl.t_nodes;
  const auto& fn = nl.f_nodes;
  const std::size_t last = tn.size() - 1;
  if (t >= tn[last]) {
    // Continue past the table with the last segment's slope.
    const double slope = (fn[last] - fn[last - 1]) / (tn[last] - tn[last - 1]);
    return fn[last] + slope * (t - tn[last]);
  }
  const std::size_t i = segment_of(tn, t);
  const double w = (t - tn[i]) / (tn[i + 1] - tn[i]);
  return fn[i] + w * (fn[i + 1] - fn[i]);
}

double table_F(const Nonlinearity& nl, double tau) {
  const auto& tn = nl.t_nodes;
  const auto& fn = nl.f_nodes;
  const auto& Fn = nl.F_nodes;
  const std::size_t last = tn.size() - 1;
  if (tau >= tn[last]) {
    const double fe = table_f(nl, tau);
    return Fn[last] + 0.5 * (tau - tn[last]) * (fn[last] + fe);
  }
  const std::size_t i = segment_of(tn, tau);
  const double fi = table_f(nl, tau);
  return Fn[i] + 0.5 * (tau - tn[i]) * (nl.f_nodes[i] + fi);
}

void validate_table(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size())
    throw std::invalid_argument("tabulated: column lengths differ");
  if (t.size() < 2)
    throw std::invalid_argument("tabulated: need at least two nodes");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw std::invalid_argument("tabulated: t column must be strictly increasing");
    if (!(f[i] > f[i - 1]))
      throw std::invalid_argument("tabulated: f column must be strictly increasing");
  }
  if (t.front() < 0)
    throw std::invalid_argument("tabulated: nodes must start at t >= 0");
}

}  // namespace

Nonlinearity make_power(double p) {
  if (!(p > 2.0))
    throw std::invalid_argument("power nonlinearity requires p > 2");
  Nonlinearity nl;
  nl.kind = NonlinKind::Power;
  nl.p = p;
  nl.mu = p;
  nl.ell = std::pow(2.0, 1.0 / (p - 1.0));  // equality case of the doubling bound
  nl.growth_C = 1.0;
  return nl;
}

Nonlinearity make_tabulated(std::vector<double> t, std::vector<double> f,
                            double p, double mu, double ell, double growth_C) {
  validate_table(t, f);
  if (t.front() > 0.0) {
    // f(0) = 0 is part of the structural assumptions; anchor the table there.
    if (!(f.front() > 0.0))
      throw std::invalid_argument("tabulated: f must be positive for t > 0");
    t.insert(t.begin(), 0.0);
    f.insert(f.begin(), 0.0);
  } else if (f.front() != 0.0) {
    throw std::invalid_argument("tabulated: f(0) must be 0");
  }
  if (!(p > 2.0)) throw std::invalid_argument("tabulated: p must be > 2");
  if (!(mu > 2.0)) throw std::invalid_argument("tabulated: mu must be > 2");
  if (!(ell > 1.0)) throw std::invalid_argument("tabulated: ell must be > 1");
  if (!(growth_C > 0.0)) throw std::invalid_argument("tabulated: growth_C must be > 0");
  Nonlinearity nl;
  nl.kind = NonlinKind::Tabulated;
  nl.p = p;
  nl.mu = mu;
  nl.ell = ell;
  nl.growth_C = growth_C;
  nl.t_nodes = std::move(t);
  nl.f_nodes = std::move(f);
  // Cache the cumulative trapezoid primitive at the nodes.
  nl.F_nodes.resize(nl.t_nodes.size());
  nl.F_nodes[0] = 0.0;
  for (std::size_t i = 1; i < nl.t_nodes.size(); ++i)
    nl.F_nodes[i] = nl.F_nodes[i - 1] +
                    0.5 * (nl.t_nodes[i] - nl.t_nodes[i - 1]) *
                        (nl.f_nodes[i] + nl.f_nodes[i - 1]);
  return nl;
}

Nonlinearity load_tabulated(const std::string& path, double p, double mu,
                            double ell, double growth_C) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table: " + path);
  std::vector<double> t, f;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double ti, fi;
    if (ss >> ti >> fi) {
      t.push_back(ti);
      f.push_back(fi);
    }
  }
  return make_tabulated(std::move(t), std::move(f), p, mu, ell, growth_C);
}

double eval_f(const Nonlinearity& nl, double t) {
  if (t < 0.0) throw std::domain_error("eval_f: t must be >= 0");
  if (nl.kind == NonlinKind::Power) return std::pow(t, nl.p - 1.0);
  return table_f(nl, t);
}

double eval_F(const Nonlinearity& nl, double t) {
  const double tau = std::abs(t);
  if (nl.kind == NonlinKind::Power) return std::pow(tau, nl.p) / nl.p;
  return table_F(nl, tau);
}

double f_inverse(const Nonlinearity& nl, double s) {
  if (s < 0.0) throw std::domain_error("f_inverse: s must be >= 0");
  if (nl.kind == NonlinKind::Power) return std::pow(s, 1.0 / (nl.p - 1.0));
  if (s > nl.f_nodes.back())
    throw std::domain_error("f_inverse: s exceeds the tabulated range of f");
  // Bisection on the table range; f is strictly increasing and continuous.
  double lo = 0.0, hi = nl.t_nodes.back();
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (table_f(nl, mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double eval_Fstar(const Nonlinearity& nl, double s) {
  const double sig = std::abs(s);
  if (nl.kind == NonlinKind::Power) {
    const double q = nl.p / (nl.p - 1.0);
    return std::pow(sig, q) / q;
  }
  // The supremum of st - F(t) is attained at t0 = f^{-1}(sigma).
  const double t0 = f_inverse(nl, sig);
  return sig * t0 - table_F(nl, t0);
}

double eval_Fstar_prime(const Nonlinearity& nl, double s) {
  const double sig = std::abs(s);
  const double sign = (s < 0.0) ? -1.0 : 1.0;
  if (nl.kind == NonlinKind::Power)
    return sign * std::pow(sig, 1.0 / (nl.p - 1.0));
  return sign * f_inverse(nl, sig);
}

AssumptionReport check_assumptions(const Nonlinearity& nl, int samples) {
  if (samples < 2) throw std::invalid_argument("check_assumptions: samples >= 2");
  AssumptionReport rep;
  rep.samples = samples;
  const double t_hi =
      (nl.kind == NonlinKind::Power) ? 10.0 : nl.t_nodes.back();
  const double flt_tol = 1e-12;

  double prev_f = 0.0;
  rep.slack_monotone = 1e300;  // shrinks to the worst increment below
  rep.slack_growth = 1e300;
  rep.slack_superquadratic = 1e300;
  rep.slack_doubling_F = 1e300;
  for (int i = 1; i <= samples; ++i) {
    const double t = t_hi * i / samples;
    const double ft = eval_f(nl, t);
    const double Ft = eval_F(nl, t);
    rep.slack_monotone = std::min(rep.slack_monotone, ft - prev_f);
    prev_f = ft;
    rep.slack_growth = std::min(
        rep.slack_growth, nl.growth_C * (1.0 + std::pow(t, nl.p - 1.0)) - ft);
    rep.slack_superquadratic =
        std::min(rep.slack_superquadratic, t * ft - nl.mu * Ft);
    // Keep ell*t inside the sampled range so tabulated data stays exact.
    const double tl = t / nl.ell;
    rep.slack_doubling_F = std::min(
        rep.slack_doubling_F,
        eval_F(nl, nl.ell * tl) - 2.0 * nl.ell * eval_F(nl, tl));
  }
  rep.monotone_f = rep.slack_monotone > 0.0;
  rep.growth = rep.slack_growth >= -flt_tol;
  rep.superquadratic = rep.slack_superquadratic >=
                       -flt_tol * std::max(1.0, t_hi * eval_f(nl, t_hi));
  rep.doubling_F = rep.slack_doubling_F >=
                   -flt_tol * std::max(1.0, eval_F(nl, t_hi));

  // Measured doubling constant of the conjugate: sup F*(2s)/F*(s) over a
  // positive sample range kept inside the invertible window.
  const double s_hi = eval_f(nl, t_hi) / 2.0;
  double L = 0.0;
  bool ok = true;
  for (int i = 1; i <= samples; ++i) {
    const double s = s_hi * i / samples;
    const double den = eval_Fstar(nl, s);
    if (!(den > 0.0)) { ok = false; break; }
    L = std::max(L, eval_Fstar(nl, 2.0 * s) / den);
  }
  rep.doubling_L = L;
  rep.doubling_Fstar = ok && std::isfinite(L) && L >= 1.0;
  return rep;
}

}  // namespace supneu
