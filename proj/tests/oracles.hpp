#pragma once

// Quadrature oracles written independently of the library's integrators.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

// E f(L) for L ~ N(m, s^2), composite Simpson over m +- 12 s.
template <class F>
double gaussian_mean(double m, double s, F &&f, int n = 20000) {
  const double a = m - 12 * s, h = 24 * s / n;
  auto g = [&](double l) { return std::exp(-0.5 * (l - m) * (l - m) / (s * s)) * f(l); };
  double acc = g(a) + g(a + n * h);
  for (int i = 1; i < n; ++i) acc += g(a + i * h) * (i % 2 ? 4 : 2);
  return acc * h / 3 / (s * std::sqrt(2 * std::numbers::pi));
}

inline double softplus_log2(double v) {
  return (v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v))) / std::numbers::ln2;
}

// BPSK over complex AWGN with a known real unit gain and noise N0: the LLR
// is N(s^2 / 2, s^2) with s^2 = 8 / N0.
inline double biawgn_capacity(double n0) {
  const double s = std::sqrt(8.0 / n0);
  return 1.0 - gaussian_mean(s * s / 2, s, [](double l) { return softplus_log2(-l); });
}

// Gallager E0 at rho for the same channel (bits), uniform inputs.
inline double biawgn_e0(double n0, double rho) {
  // integral of (p+^a / 2 + p-^a / 2)^(1+rho), a = 1/(1+rho), written as an
  // expectation under x = +1 of (1/2 + e^{-aL}/2)^(1+rho)
  const double s = std::sqrt(8.0 / n0);
  const double e = gaussian_mean(s * s / 2, s, [&](double l) {
    return std::pow(0.5 * (1.0 + std::exp(-l / (1 + rho))), 1 + rho);
  });
  return -std::log2(e);
}

} // namespace oracle
