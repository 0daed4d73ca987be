// Independent reference computations used to derive expected values in tests.
// Nothing here calls into the code under test.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace vibronoise::oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<double> sine(double hz, double amplitude, std::size_t n, double rate,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(kTwoPi * hz * static_cast<double>(i) / rate + phase);
  return x;
}

/// Zero-crossing instants of sin(2 pi f t) lie at t = m / (2 f); count those in [0, n / rate).
inline std::size_t analytic_sine_crossings(double hz, std::size_t n, double rate) {
  const double span = static_cast<double>(n) / rate;
  std::size_t count = 0;
  for (std::size_t m = 0;; ++m) {
    const double t = static_cast<double>(m) / (2.0 * hz);
    if (t >= span - 1e-12) break;
    ++count;
  }
  return count;
}

/// Band of `hz` by walking band edges one at a time.
inline long brute_force_band(double hz, double f_lo = 100.0, double f_hi = 20000.0,
                             double width = 20.0) {
  long index = 0;
  for (double edge = f_lo; edge < f_hi; edge += width, ++index) {
    if (hz >= edge && hz < edge + width) return index;
  }
  return -1;
}

/// Single-frequency DFT amplitude (peak) of x at `hz`.
inline double dft_amplitude(const std::vector<double>& x, double hz, double rate) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = kTwoPi * hz * static_cast<double>(i) / rate;
    acc += x[i] * std::complex<double>(std::cos(w), -std::sin(w));
  }
  return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

/// Scalar damped-update recurrence F <- F + (I - F)(F / I)^2 applied `steps` times.
inline double damped_recurrence(double f0, double input, int steps) {
  double f = f0;
  for (int k = 0; k < steps; ++k) {
    if (input > f) f = f + (input - f) * (f / input) * (f / input);
  }
  return f;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double energy(const std::vector<double>& x) {
  double e = 0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace vibronoise::oracle
