#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace chns {

/// Sequences and constants of the discrete Gronwall inequalities:
/// a (length M+1), b (length M+1), c (length M), step tau, the budget
/// tau * sum(c) <= C1, the starting constant C2, and (weighted variant only)
/// the geometric decay factor alpha in (0, 1).
struct GronwallInput {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  double tau = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha = 0.0;
};

struct GronwallReport {
  bool sum_hypothesis_ok = false;      // tau * sum(c) <= C1
  std::vector<char> hypothesis_holds;  // index ell - 1, for ell = 1..M
  std::vector<char> conclusion_holds;
  std::vector<double> bound;           // bound value checked at each ell

  bool all_conclusions_hold() const {
    for (std::size_t i = 0; i < hypothesis_holds.size(); ++i)
      if (hypothesis_holds[i] && !conclusion_holds[i]) return false;
    return true;
  }
};

/// 1/(1 - alpha) with a one-step correction for the rounding of 1 - alpha,
/// so rational alpha like 1/3 produce the exact weight (3/2).
inline double alpha_weight(double alpha) {
  const double r = 1.0 - alpha;
  const double t = (1.0 - r) - alpha;  // exact residual of the subtraction
  const double q = 1.0 / r;
  return q - t * q * q;
}

namespace detail {

inline void validate_gronwall(const GronwallInput& in, bool weighted) {
  if (in.a.empty() || in.a.size() != in.b.size() || in.c.size() + 1 != in.a.size())
    throw std::invalid_argument("gronwall: need |a| = |b| = M+1 and |c| = M");
  if (!(in.tau > 0.0)) throw std::invalid_argument("gronwall: tau must be positive");
  if (in.c1 < 0.0 || in.c2 < 0.0) throw std::invalid_argument("gronwall: C1, C2 must be nonnegative");
  for (double v : in.a)
    if (v < 0.0) throw std::invalid_argument("gronwall: negative entry in a");
  for (double v : in.b)
    if (v < 0.0) throw std::invalid_argument("gronwall: negative entry in b");
  for (double v : in.c)
    if (v < 0.0) throw std::invalid_argument("gronwall: negative entry in c");
  if (weighted && !(in.alpha > 0.0 && in.alpha < 1.0))
    throw std::invalid_argument("gronwall: alpha must lie in (0, 1)");
}

constexpr double kSlack = 1e-12;  // roundoff slack on inequality comparisons

inline bool leq(double lhs, double rhs) { return lhs <= rhs + kSlack * std::max(std::abs(rhs), 1.0); }

}  // namespace detail

/// Standard discrete Gronwall check. Where the hypothesis
///   a_l + tau sum_{m<=l} b_m <= C2 + tau sum_{m<l} a_m c_m
/// holds, verifies the conclusion
///   a_l + tau sum_{m<=l} b_m <= C2 exp(tau sum_{m<l} c_m) <= C2 exp(C1).
inline GronwallReport check_gronwall_standard(const GronwallInput& in) {
  detail::validate_gronwall(in, false);
  const std::size_t big_m = in.c.size();
  GronwallReport rep;

  double csum = 0.0;
  for (double v : in.c) csum += v;
  rep.sum_hypothesis_ok = detail::leq(in.tau * csum, in.c1);

  double bsum = in.tau * in.b[0];
  double acsum = 0.0;  // tau sum_{m<l} a_m c_m
  double cpart = 0.0;  // tau sum_{m<l} c_m
  for (std::size_t ell = 1; ell <= big_m; ++ell) {
    acsum += in.tau * in.a[ell - 1] * in.c[ell - 1];
    cpart += in.tau * in.c[ell - 1];
    bsum += in.tau * in.b[ell];
    const double lhs = in.a[ell] + bsum;
    rep.hypothesis_holds.push_back(detail::leq(lhs, in.c2 + acsum));
    const double bound = in.c2 * std::exp(cpart);
    rep.bound.push_back(bound);
    rep.conclusion_holds.push_back(detail::leq(lhs, bound));
  }
  return rep;
}

/// Weighted variant with geometrically decaying history. Where
///   a_l + tau sum_{m<=l} b_m <= C2 + tau sum_{m<l} c_m sum_{j<=m} alpha^{m-j} a_j
/// holds, verifies
///   a_l + tau sum_{m<=l} b_m <= (C2 + a_0 C1) exp(C1 / (1 - alpha)).
inline GronwallReport check_gronwall_weighted(const GronwallInput& in) {
  detail::validate_gronwall(in, true);
  const std::size_t big_m = in.c.size();
  GronwallReport rep;

  double csum = 0.0;
  for (double v : in.c) csum += v;
  rep.sum_hypothesis_ok = detail::leq(in.tau * csum, in.c1);

  const double bound = (in.c2 + in.a[0] * in.c1) * std::exp(in.c1 * alpha_weight(in.alpha));

  double bsum = in.tau * in.b[0];
  double history = 0.0;  // tau sum_{m<l} c_m sum_{j<=m} alpha^{m-j} a_j
  double decayed = 0.0;  // sum_{j<=m} alpha^{m-j} a_j, updated incrementally
  for (std::size_t ell = 1; ell <= big_m; ++ell) {
    decayed = in.alpha * decayed + in.a[ell - 1];
    history += in.tau * in.c[ell - 1] * decayed;
    bsum += in.tau * in.b[ell];
    const double lhs = in.a[ell] + bsum;
    rep.hypothesis_holds.push_back(detail::leq(lhs, in.c2 + history));
    rep.bound.push_back(bound);
    rep.conclusion_holds.push_back(detail::leq(lhs, bound));
  }
  return rep;
}

}  // namespace chns
