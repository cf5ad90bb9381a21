#include "succdec/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace succdec {

namespace {

double series(double a, double b, double c, double z) {
  double term = 1, sum = 1;
  for (int n = 0; n < 5000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
  }
  throw std::runtime_error("hyp2f1: series did not converge");
}

} // namespace

double hyp2f1(double a, double b, double c, double z) {
  if (z < -1 || z > 0.5) throw std::domain_error("hyp2f1: z must lie in [-1, 1/2]");
  if (c <= 0 && c == std::floor(c)) throw std::domain_error("hyp2f1: c must not be a non-positive integer");
  if (z >= 0) return series(a, b, c, z);
  // 2F1(a, b; c; z) = (1 - z)^-b 2F1(c - a, b; c; z / (z - 1)).
  return std::pow(1 - z, -b) * series(c - a, b, c, z / (z - 1));
}

double j_function(double s) {
  if (s <= 0) return 0.0;
  if (s > 60) return 1.0;
  const double m = s * s / 2;
  auto f = [&](double u) {
    const double l = m + s * u;
    const double loss = l > 0 ? std::log1p(std::exp(-l)) : -l + std::log1p(std::exp(l));
    return std::exp(-u * u / 2) * loss;
  };
  const double e = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -40.0, 40.0, 15, 1e-14) /
                   std::sqrt(2 * std::numbers::pi);
  return 1.0 - e / std::numbers::ln2;
}

double j_inverse(double info) {
  if (info <= 0) return 0.0;
  if (info >= 1) return std::numeric_limits<double>::infinity();
  double a = 0, b = 1;
  while (j_function(b) < info) b *= 2;
  for (int i = 0; i < 100 && b - a > 1e-13 * b; ++i) {
    const double m = 0.5 * (a + b);
    (j_function(m) < info ? a : b) = m;
  }
  return 0.5 * (a + b);
}

} // namespace succdec
