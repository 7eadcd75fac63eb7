#include "mfpose/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

}  // namespace

double MarginalDensity::integral() const {
  if (grid.size() < 2) return 0.0;
  if (circular) {
    const double step = kTwoPi / static_cast<double>(grid.size());
    double s = 0.0;
    for (double d : density) s += d;
    return s * step;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  return s;
}

double mean(std::span<const double> samples) {
  double s = 0.0;
  for (double x : samples) s += x;
  return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
}

double stddev(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  const double m = mean(samples);
  double s = 0.0;
  for (double x : samples) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(samples.size() - 1));
}

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w - kPi;
}

double circular_mean(std::span<const double> angles) {
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  return std::atan2(s, c);
}

double circular_std(std::span<const double> angles) {
  if (angles.empty()) return 0.0;
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  const double r = std::hypot(c, s) / static_cast<double>(angles.size());
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(std::min(r, 1.0)));
}

double ks_uniform_circle(std::span<const double> angles) {
  std::vector<double> u;
  u.reserve(angles.size());
  for (double a : angles) u.push_back((wrap_angle(a) + kPi) / kTwoPi);
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - u[i]);
    d = std::max(d, u[i] - static_cast<double>(i) / n);
  }
  return d;
}

double scott_bandwidth(std::span<const double> samples, bool circular) {
  const double n = static_cast<double>(samples.size());
  const double sigma = circular ? std::min(circular_std(samples), kPi) : stddev(samples);
  return sigma * std::pow(n, -0.2);
}

double kde_evaluate(std::span<const double> samples, double x, double bandwidth, bool circular) {
  const double inv_h = 1.0 / bandwidth;
  double acc = 0.0;
  for (double s : samples) {
    if (circular) {
      const double base = wrap_angle(x - s);
      for (int k = -kWrapImages; k <= kWrapImages; ++k) {
        const double u = (base + k * kTwoPi) * inv_h;
        acc += std::exp(-0.5 * u * u);
      }
    } else {
      const double u = (x - s) * inv_h;
      acc += std::exp(-0.5 * u * u);
    }
  }
  return acc * kInvSqrt2Pi * inv_h / static_cast<double>(samples.size());
}

MarginalDensity kde_marginal(std::span<const double> samples, const std::string& coordinate, bool circular,
                             std::optional<double> bandwidth) {
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "KDE needs at least 2 samples");
  MarginalDensity out;
  out.coordinate = coordinate;
  out.circular = circular;

  double h = bandwidth.value_or(scott_bandwidth(samples, circular));
  if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * std::max(1.0, std::abs(mean(samples)));

  out.grid.resize(kKdeGridSize);
  if (circular) {
    const double step = kTwoPi / kKdeGridSize;
    if (!bandwidth) h = std::max(h, step);
    for (int i = 0; i < kKdeGridSize; ++i) out.grid[static_cast<std::size_t>(i)] = -kPi + i * step;
  } else {
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double range = *hi_it - *lo_it;
    if (!bandwidth) h = std::max(h, range / (kKdeGridSize - 1 - 8));
    const double lo = *lo_it - 4.0 * h;
    const double step = (range + 8.0 * h) / (kKdeGridSize - 1);
    for (int i = 0; i < kKdeGridSize; ++i) out.grid[static_cast<std::size_t>(i)] = lo + i * step;
  }
  out.bandwidth = h;
  out.density.resize(out.grid.size());
  for (std::size_t i = 0; i < out.grid.size(); ++i) out.density[i] = kde_evaluate(samples, out.grid[i], h, circular);
  return out;
}

}  // namespace mfpose
