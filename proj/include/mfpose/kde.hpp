#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfpose {

inline constexpr int kKdeGridSize = 512;
inline constexpr int kWrapImages = 3;

/// Gaussian KDE of one scalar pose coordinate, tabulated on a uniform grid.
struct MarginalDensity {
  std::string coordinate;
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  bool circular = false;

  /// Trapezoid rule (rectangle rule on the periodic grid when circular).
  double integral() const;
};

/// Scott's rule bandwidth: std * n^(-1/5). Circular data use the circular
/// standard deviation, capped at pi.
double scott_bandwidth(std::span<const double> samples, bool circular);

/// Density at x. Circular kernels are wrapped with kWrapImages images per side.
double kde_evaluate(std::span<const double> samples, double x, double bandwidth, bool circular);

/// Throws TooFewSamples for fewer than 2 samples. The grid spans [-pi, pi)
/// for circular data and the data range widened by 4 bandwidths otherwise;
/// the bandwidth is never narrower than the grid spacing.
MarginalDensity kde_marginal(std::span<const double> samples, const std::string& coordinate, bool circular,
                             std::optional<double> bandwidth = std::nullopt);

double mean(std::span<const double> samples);
double stddev(std::span<const double> samples);  // n - 1 denominator
double circular_mean(std::span<const double> angles);
/// sqrt(-2 ln R) with R the mean resultant length; +inf when R == 0.
double circular_std(std::span<const double> angles);
/// Wraps to [-pi, pi).
double wrap_angle(double a);
/// Kolmogorov-Smirnov statistic of angles against the uniform law on [-pi, pi).
double ks_uniform_circle(std::span<const double> angles);

}  // namespace mfpose
