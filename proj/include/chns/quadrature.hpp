#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace chns {

/// Quadrature rule on the reference triangle with the measure normalized:
/// weights sum to one and an integral over a physical triangle K is
/// |K| * sum_q w_q f(x_q).
struct Quadrature {
  std::vector<std::array<double, 3>> points;  // barycentric coordinates
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }

  /// 12-point rule exact for all polynomials of total degree <= 6. One rule
  /// is used for every form in the project so that the algebraic identities
  /// behind the discrete energy law hold to roundoff.
  static const Quadrature& degree6() {
    static const Quadrature rule = [] {
      Quadrature q;
      q.degree = 6;
      const auto orbit3 = [&q](double a, double w) {
        const double b = 1.0 - 2.0 * a;
        q.points.push_back({b, a, a});
        q.points.push_back({a, b, a});
        q.points.push_back({a, a, b});
        q.weights.insert(q.weights.end(), 3, w);
      };
      const auto orbit6 = [&q](double a, double b, double w) {
        const double c = 1.0 - a - b;
        q.points.push_back({a, b, c});
        q.points.push_back({a, c, b});
        q.points.push_back({b, a, c});
        q.points.push_back({b, c, a});
        q.points.push_back({c, a, b});
        q.points.push_back({c, b, a});
        q.weights.insert(q.weights.end(), 6, w);
      };
      orbit3(0.063089014491502228340331602870819, 0.050844906370206816920936809106869);
      orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
      orbit6(0.053145049844816947353249671631398, 0.31035245103378440541660773395655,
             0.082851075618373575193553456420442);
      return q;
    }();
    return rule;
  }
};

/// Exact mean value of the barycentric monomial l0^a l1^b l2^c over the
/// reference triangle: 2 a! b! c! / (a+b+c+2)!. Used to verify quadrature
/// exactness degree.
inline double barycentric_monomial_mean(int a, int b, int c) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

}  // namespace chns
