#include "vibronoise/emd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace detail {

void find_extrema(std::span<const double> x, Extrema& out) {
  out.maxima.clear();
  out.minima.clear();
  const std::size_t n = x.size();
  if (n < 3) return;
  std::size_t i = 1;
  while (i + 1 < n) {
    const double xi = x[i];
    if (x[i + 1] != xi) {
      const double prev = x[i - 1], next = x[i + 1];
      if (prev < xi && next < xi) out.maxima.push_back(i);
      else if (prev > xi && next > xi) out.minima.push_back(i);
      ++i;
      continue;
    }
    // Walk to the end of a run of equal samples starting at i.
    std::size_t j = i + 1;
    while (j + 1 < n && x[j + 1] == xi) ++j;
    if (j + 1 >= n) break;  // plateau reaches the right edge
    const double prev = x[i - 1];
    const double next = x[j + 1];
    if (prev < xi && next < xi) {
      out.maxima.push_back((i + j) / 2);
    } else if (prev > xi && next > xi) {
      out.minima.push_back((i + j) / 2);
    }
    i = j + 1;
  }
}

std::size_t sign_changes(std::span<const double> x) {
  if (x.empty()) return 0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v - mean));
  if (peak == 0.0) return 0;
  const double tol = peak * 1e-12;

  // A window that opens on a zero sample opens on a crossing; [0, N) is left-closed.
  std::size_t changes = std::abs(x.front() - mean) <= tol ? 1 : 0;
  int last_sign = 0;
  for (double v : x) {
    const double d = v - mean;
    if (std::abs(d) <= tol) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

std::size_t zero_crossings(std::span<const double> x) {
  std::size_t changes = 0;
  int last = 0;
  for (double v : x) {
    if (v == 0.0) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

namespace {

constexpr int kMirrorCount = 2;
constexpr double kNegligibleImfRatio = 1e-12;

/// Natural cubic spline through (t, y), evaluated at 0, 1, ..., out.size()-1.
/// Outside the knot range the end cubic pieces are extended.
class SplineEnvelope {
 public:
  void evaluate(std::span<const double> t, std::span<const double> y, std::span<double> out) {
    const std::size_t k = t.size();
    if (k == 1) {
      std::fill(out.begin(), out.end(), y[0]);
      return;
    }
    m_.assign(k, 0.0);
    if (k > 2) {
      // Thomas algorithm on the interior second derivatives.
      c_.assign(k, 0.0);
      d_.assign(k, 0.0);
      for (std::size_t i = 1; i + 1 < k; ++i) {
        const double h0 = t[i] - t[i - 1];
        const double h1 = t[i + 1] - t[i];
        const double a = h0;
        const double b = 2.0 * (h0 + h1);
        const double rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        const double denom = b - a * c_[i - 1];
        c_[i] = h1 / denom;
        d_[i] = (rhs - a * d_[i - 1]) / denom;
      }
      for (std::size_t i = k - 2; i >= 1; --i) {
        m_[i] = d_[i] - c_[i] * m_[i + 1];
      }
    }
    // Knots sit on integer (possibly mirrored, negative) sample positions. Segment
    // `seg` covers samples in (t[seg], t[seg + 1]]; the end pieces extend outward.
    const auto last = static_cast<std::ptrdiff_t>(out.size()) - 1;
    std::ptrdiff_t n = 0;
    for (std::size_t seg = 0; seg + 1 < k && n <= last; ++seg) {
      const std::ptrdiff_t end =
          seg + 2 == k ? last : std::min(last, static_cast<std::ptrdiff_t>(std::floor(t[seg + 1])));
      if (end < n) continue;
      const double h = t[seg + 1] - t[seg];
      const double m0 = m_[seg], m1 = m_[seg + 1];
      // Power form in d = x - t[seg].
      const double c1 = (y[seg + 1] - y[seg]) / h - h * (2.0 * m0 + m1) / 6.0;
      const double c2 = 0.5 * m0;
      const double c3 = (m1 - m0) / (6.0 * h);
      for (; n <= end; ++n) {
        const double d = static_cast<double>(n) - t[seg];
        out[static_cast<std::size_t>(n)] = y[seg] + d * (c1 + d * (c2 + d * c3));
      }
    }
  }

 private:
  std::vector<double> m_, c_, d_;
};

/// Reusable buffers for one decomposition.
class Sifter {
 public:
  Sifter(std::size_t n, const SiftParams& params)
      : params_(params), upper_(n), lower_(n) {}

  /// Locates the extrema of `h`; must precede envelope_mean and balanced.
  std::size_t find_extrema(std::span<const double> h) {
    detail::find_extrema(h, extrema_);
    return extrema_.maxima.size() + extrema_.minima.size();
  }

  /// |#extrema - #zero crossings| <= 1 for the `h` last passed to find_extrema.
  bool balanced(std::span<const double> h) const {
    const auto extrema = static_cast<long>(extrema_.maxima.size() + extrema_.minima.size());
    return std::labs(extrema - static_cast<long>(detail::zero_crossings(h))) <= 1;
  }

  /// Returns false when `h` has too few extrema to build both envelopes.
  bool envelope_mean(std::span<const double> h, std::span<double> mean) {
    if (extrema_.maxima.empty() || extrema_.minima.empty() ||
        extrema_.maxima.size() + extrema_.minima.size() < 2) {
      return false;
    }
    build_knots(h);
    spline_.evaluate(max_t_, max_y_, upper_);
    spline_.evaluate(min_t_, min_y_, lower_);
    for (std::size_t i = 0; i < h.size(); ++i) mean[i] = 0.5 * (upper_[i] + lower_[i]);
    return true;
  }

  const detail::Extrema& extrema() const { return extrema_; }

 private:
  using Index = std::vector<std::size_t>;

  void build_knots(std::span<const double> h) {
    const auto& mx = extrema_.maxima;
    const auto& mn = extrema_.minima;
    const std::size_t last = h.size() - 1;

    max_pts_.clear();
    min_pts_.clear();
    for (auto i : mx) max_pts_.push_back({static_cast<double>(i), h[i]});
    for (auto i : mn) min_pts_.push_back({static_cast<double>(i), h[i]});

    if (params_.boundary == BoundaryMode::endpoint) {
      max_pts_.push_back({0.0, h[0]});
      max_pts_.push_back({static_cast<double>(last), h[last]});
      min_pts_.push_back({0.0, h[0]});
      min_pts_.push_back({static_cast<double>(last), h[last]});
    } else {
      mirror_left(h);
      mirror_right(h);
    }
    finalize(max_pts_, max_t_, max_y_);
    finalize(min_pts_, min_t_, min_y_);
  }

  // Boundary extension after Rilling, Flandrin & Goncalves: reflect the nearest
  // extrema either about the edge extremum or about the edge sample itself,
  // whichever keeps the envelopes bracketing the signal.
  void mirror_left(std::span<const double> h) {
    const auto& mx = extrema_.maxima;
    const auto& mn = extrema_.minima;
    Index lmax, lmin;
    std::size_t sym = 0;
    auto take = [](const Index& src, std::size_t from, std::size_t count, Index& dst) {
      for (std::size_t i = from; i < std::min(src.size(), from + count); ++i) dst.push_back(src[i]);
    };
    bool edge_in_min = false, edge_in_max = false;
    if (mx.front() < mn.front()) {
      if (h[0] > h[mn.front()]) {
        take(mx, 1, kMirrorCount, lmax);
        take(mn, 0, kMirrorCount, lmin);
        sym = mx.front();
      } else {
        take(mx, 0, kMirrorCount, lmax);
        take(mn, 0, kMirrorCount - 1, lmin);
        edge_in_min = true;
        sym = 0;
      }
    } else {
      if (h[0] < h[mx.front()]) {
        take(mx, 0, kMirrorCount, lmax);
        take(mn, 1, kMirrorCount, lmin);
        sym = mn.front();
      } else {
        take(mx, 0, kMirrorCount - 1, lmax);
        take(mn, 0, kMirrorCount, lmin);
        edge_in_max = true;
        sym = 0;
      }
    }
    if (edge_in_min) lmin.push_back(0);
    if (edge_in_max) lmax.push_back(0);

    auto reaches = [&](const Index& idx) {
      double far = 0.0;
      for (auto i : idx) far = std::min(far, 2.0 * static_cast<double>(sym) - static_cast<double>(i));
      return idx.empty() || far < 0.0;
    };
    if (sym != 0 && (!reaches(lmax) || !reaches(lmin))) {
      // Mirrored points would not pass the edge; reflect about the first sample instead.
      if (sym == mx.front()) {
        lmax.clear();
        take(mx, 0, kMirrorCount, lmax);
      } else {
        lmin.clear();
        take(mn, 0, kMirrorCount, lmin);
      }
      sym = 0;
    }
    for (auto i : lmax) push_mirrored(max_pts_, h, i, sym);
    for (auto i : lmin) push_mirrored(min_pts_, h, i, sym);
  }

  void mirror_right(std::span<const double> h) {
    const auto& mx = extrema_.maxima;
    const auto& mn = extrema_.minima;
    const std::size_t last = h.size() - 1;
    Index rmax, rmin;
    std::size_t sym = last;
    // Collect up to `count` entries walking backwards from position src.size()-1-skip.
    auto take_back = [](const Index& src, std::size_t skip, std::size_t count, Index& dst) {
      for (std::size_t k = 0; k < count; ++k) {
        if (skip + k >= src.size()) break;
        dst.push_back(src[src.size() - 1 - skip - k]);
      }
    };
    bool edge_in_min = false, edge_in_max = false;
    if (mx.back() < mn.back()) {
      if (h[last] < h[mx.back()]) {
        take_back(mx, 0, kMirrorCount, rmax);
        take_back(mn, 1, kMirrorCount, rmin);
        sym = mn.back();
      } else {
        take_back(mx, 0, kMirrorCount - 1, rmax);
        take_back(mn, 0, kMirrorCount, rmin);
        edge_in_max = true;
        sym = last;
      }
    } else {
      if (h[last] > h[mn.back()]) {
        take_back(mx, 1, kMirrorCount, rmax);
        take_back(mn, 0, kMirrorCount, rmin);
        sym = mx.back();
      } else {
        take_back(mx, 0, kMirrorCount, rmax);
        take_back(mn, 0, kMirrorCount - 1, rmin);
        edge_in_min = true;
        sym = last;
      }
    }
    if (edge_in_min) rmin.push_back(last);
    if (edge_in_max) rmax.push_back(last);

    const double end = static_cast<double>(last);
    auto reaches = [&](const Index& idx) {
      double far = end;
      for (auto i : idx) far = std::max(far, 2.0 * static_cast<double>(sym) - static_cast<double>(i));
      return idx.empty() || far > end;
    };
    if (sym != last && (!reaches(rmax) || !reaches(rmin))) {
      if (sym == mx.back()) {
        rmax.clear();
        take_back(mx, 0, kMirrorCount, rmax);
      } else {
        rmin.clear();
        take_back(mn, 0, kMirrorCount, rmin);
      }
      sym = last;
    }
    for (auto i : rmax) push_mirrored(max_pts_, h, i, sym);
    for (auto i : rmin) push_mirrored(min_pts_, h, i, sym);
  }

  struct Point {
    double t;
    double y;
  };

  static void push_mirrored(std::vector<Point>& pts, std::span<const double> h, std::size_t i,
                            std::size_t sym) {
    pts.push_back({2.0 * static_cast<double>(sym) - static_cast<double>(i), h[i]});
  }

  static void finalize(std::vector<Point>& pts, std::vector<double>& t, std::vector<double>& y) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });
    t.clear();
    y.clear();
    for (const auto& p : pts) {
      if (!t.empty() && p.t == t.back()) continue;
      t.push_back(p.t);
      y.push_back(p.y);
    }
  }

  const SiftParams& params_;
  detail::Extrema extrema_;
  std::vector<Point> max_pts_, min_pts_;
  std::vector<double> max_t_, max_y_, min_t_, min_y_;
  std::vector<double> upper_, lower_;
  SplineEnvelope spline_;
};

}  // namespace

void SiftParams::validate() const {
  std::vector<std::string> failures;
  if (max_imfs < 1) failures.push_back("emd.max_imfs must be >= 1");
  if (max_sift_iterations < 1) failures.push_back("emd.max_sift_iterations must be >= 1");
  if (!(sd_threshold > 0.0) || !std::isfinite(sd_threshold))
    failures.push_back("emd.sd_threshold must be > 0");
  if (!failures.empty()) throw ValidationError(std::move(failures));
}

SiftParams load_sift_params(const nlohmann::json& section) {
  SiftParams p;
  if (section.is_null()) return p;
  if (!section.is_object()) throw ValidationError("emd: section must be an object");
  std::vector<std::string> failures;
  auto read_int = [&](const char* key, int& dst) {
    if (auto it = section.find(key); it != section.end()) {
      if (it->is_number_integer()) dst = it->get<int>();
      else failures.push_back(std::string("emd.") + key + " must be an integer");
    }
  };
  read_int("max_imfs", p.max_imfs);
  read_int("max_sift_iterations", p.max_sift_iterations);
  if (auto it = section.find("sd_threshold"); it != section.end()) {
    if (it->is_number()) p.sd_threshold = it->get<double>();
    else failures.push_back("emd.sd_threshold must be a number");
  }
  if (auto it = section.find("boundary"); it != section.end()) {
    const auto mode = it->is_string() ? it->get<std::string>() : std::string();
    if (mode == "mirror") p.boundary = BoundaryMode::mirror;
    else if (mode == "endpoint") p.boundary = BoundaryMode::endpoint;
    else failures.push_back("emd.boundary must be \"mirror\" or \"endpoint\"");
  }
  if (!failures.empty()) throw ValidationError(std::move(failures));
  p.validate();
  return p;
}

nlohmann::json to_json(const SiftParams& p) {
  return {{"max_imfs", p.max_imfs},
          {"max_sift_iterations", p.max_sift_iterations},
          {"sd_threshold", p.sd_threshold},
          {"boundary", p.boundary == BoundaryMode::mirror ? "mirror" : "endpoint"}};
}

ImfSet decompose(std::span<const double> window, const SiftParams& params) {
  params.validate();
  const std::size_t n = window.size();
  if (n < kMinWindowSamples) {
    throw DomainError("EMD window needs at least 16 samples, got " + std::to_string(n));
  }
  for (double v : window) {
    if (!std::isfinite(v)) throw DomainError("EMD window contains non-finite samples");
  }

  ImfSet out;
  out.residual.assign(window.begin(), window.end());

  Sifter sifter(n, params);
  std::vector<double> h(n), mean(n);
  double window_energy = 0.0;
  for (double v : window) window_energy += v * v;
  // Candidates below this energy are rounding ripple on a trend, not oscillations.
  const double negligible = kNegligibleImfRatio * kNegligibleImfRatio * window_energy;

  bool trend_only = false;
  for (int k = 0; k < params.max_imfs && !trend_only; ++k) {
    h = out.residual;
    if (sifter.find_extrema(h) < 2) break;
    int sifts = 0;
    for (int it = 0; it < params.max_sift_iterations; ++it) {
      if (!sifter.envelope_mean(h, mean)) break;
      ++sifts;
      double num = 0.0, den = 0.0, left = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += mean[i] * mean[i];
        den += h[i] * h[i];
        h[i] -= mean[i];
        left += h[i] * h[i];
      }
      if (it == 0 && left <= negligible) {
        trend_only = true;
        break;
      }
      if (den == 0.0) break;
      sifter.find_extrema(h);
      // Stop once the update is small and the candidate is a proper IMF.
      if (num / den < params.sd_threshold && sifter.balanced(h)) break;
    }
    if (trend_only) break;
    for (std::size_t i = 0; i < n; ++i) out.residual[i] -= h[i];
    out.imfs.push_back(h);
    out.sift_iterations.push_back(sifts);
  }
  return out;
}

double dominant_frequency(std::span<const double> imf, double sample_rate) {
  if (imf.size() < kMinWindowSamples) {
    throw DomainError("dominant_frequency needs at least 16 samples");
  }
  const auto z = detail::sign_changes(imf);
  return static_cast<double>(z) * sample_rate / (2.0 * static_cast<double>(imf.size()));
}

double imf_amplitude(std::span<const double> imf) {
  if (imf.empty()) throw DomainError("imf_amplitude of empty IMF");
  double sum_sq = 0.0;
  for (double v : imf) sum_sq += v * v;
  return std::sqrt(2.0 * sum_sq / static_cast<double>(imf.size()));
}

}  // namespace vibronoise
