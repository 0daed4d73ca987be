#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vibronoise {

/// How envelopes are continued past the window edges during sifting.
enum class BoundaryMode {
  mirror,    ///< reflect the two nearest extrema of each kind about the edge
  endpoint,  ///< pin both envelopes to the edge samples
};

struct SiftParams {
  int max_imfs = 8;
  int max_sift_iterations = 10;
  double sd_threshold = 0.2;
  BoundaryMode boundary = BoundaryMode::mirror;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;
};

SiftParams load_sift_params(const nlohmann::json& section);
nlohmann::json to_json(const SiftParams& params);

using Imf = std::vector<double>;

/// Intrinsic mode functions ordered highest frequency first, plus the residual trend.
struct ImfSet {
  std::vector<Imf> imfs;
  std::vector<double> residual;
  std::vector<int> sift_iterations;  ///< per IMF; equals max_sift_iterations when capped
};

inline constexpr std::size_t kMinWindowSamples = 16;

/// Empirical mode decomposition of one analysis window.
///
/// Each IMF is sifted until the Cauchy-type criterion
///   SD = sum (h_prev - h_new)^2 / sum h_prev^2
/// drops below `sd_threshold` with the candidate's extrema and zero-crossing
/// counts differing by at most one, or until `max_sift_iterations` is reached. Extraction stops
/// after `max_imfs`, once the residual has fewer than two interior extrema, or
/// when the first sift of a new IMF leaves less than 1e-12 of the window's RMS
/// (rounding ripple on a smooth trend).
/// The residual is the input minus the extracted IMFs, so the set always sums
/// back to the input up to rounding.
ImfSet decompose(std::span<const double> window, const SiftParams& params = {});

/// Z * sample_rate / (2 N), where Z counts sign changes of the mean-removed IMF.
/// Returns 0 when Z = 0.
double dominant_frequency(std::span<const double> imf, double sample_rate);

/// Peak-equivalent amplitude, sqrt(2) * RMS.
double imf_amplitude(std::span<const double> imf);

namespace detail {

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

/// Interior local extrema; a plateau counts once, at its centre.
void find_extrema(std::span<const double> x, Extrema& out);

/// Sign changes after mean removal. Samples within 1e-12 of the peak magnitude
/// count as zero: they are skipped, except that a zero first sample counts as a
/// crossing at the window start.
std::size_t sign_changes(std::span<const double> x);

/// Zero crossings of the raw samples, used for the IMF extrema/zero-crossing balance.
std::size_t zero_crossings(std::span<const double> x);

}  // namespace detail

}  // namespace vibronoise
