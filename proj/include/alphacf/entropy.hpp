#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "alphacf/alphamap.hpp"
#include "alphacf/matching.hpp"
#include "alphacf/parallel.hpp"
#include "alphacf/tree.hpp"

namespace alphacf {

enum class RestartPolicy { RestartPoint, DiscardOrbit };

struct EstimatorConfig {
  std::uint64_t N = 10000;  // iterations per orbit
  std::uint64_t M = 1000;   // samples
  double epsilon = 1e-16;
  std::uint64_t rng_seed = 1;
  RestartPolicy restart_policy = RestartPolicy::RestartPoint;
  unsigned threads = 1;
};

struct EntropyEstimate {
  double alpha = 0;
  double mean = 0;
  double std = 0;  // spread of the per-sample Birkhoff averages
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  std::uint64_t restarts = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(index + 1))};
  return std::mt19937_64(seq);
}

inline double uniform_point(std::mt19937_64& rng, double alpha) {
  return (alpha - 1.0) + std::generate_canonical<double, 53>(rng);
}

inline double step(double alpha, double x) {
  const double inv = 1.0 / std::fabs(x);
  return inv - std::floor(inv + 1.0 - alpha);
}

inline void check_config(const EstimatorConfig& cfg) {
  if (cfg.N < 1 || cfg.M < 1) throw error(errc::invalid_argument, "N and M must be >= 1");
  if (!(cfg.epsilon > 0)) throw error(errc::invalid_argument, "epsilon must be positive");
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw error(errc::out_of_domain, "alpha must lie in (0, 1]");
}

struct BirkhoffSample {
  double average = 0;
  std::uint64_t restarts = 0;
};

// (1/N) sum of -2 log|x| along the orbit; logs are taken of running products
inline BirkhoffSample birkhoff_sample(double alpha, const EstimatorConfig& cfg, std::mt19937_64& rng) {
  BirkhoffSample out;
  double x = uniform_point(rng, alpha);
  double logsum = 0, prod = 1;
  int pending = 0;
  for (std::uint64_t j = 0; j < cfg.N;) {
    if (std::fabs(x) <= cfg.epsilon) {
      ++out.restarts;
      if (cfg.restart_policy == RestartPolicy::DiscardOrbit) {
        logsum = 0;
        prod = 1;
        pending = 0;
        j = 0;
      } else {
        ++j;  // the point contributes 0
      }
      x = uniform_point(rng, alpha);
      continue;
    }
    prod *= std::fabs(x);
    if (++pending == 16) {
      logsum += std::log(prod);
      prod = 1;
      pending = 0;
    }
    x = step(alpha, x);
    ++j;
  }
  logsum += std::log(prod);
  out.average = -2.0 * logsum / static_cast<double>(cfg.N);
  return out;
}

}  // namespace detail

inline EntropyEstimate birkhoff_entropy(double alpha, const EstimatorConfig& cfg) {
  detail::check_alpha(alpha);
  detail::check_config(cfg);
  std::vector<detail::BirkhoffSample> samples(cfg.M);
  parallel_for(cfg.M, cfg.threads, [&](std::size_t i) {
    auto rng = detail::stream(cfg.rng_seed, i);
    samples[i] = detail::birkhoff_sample(alpha, cfg, rng);
  });
  EntropyEstimate e;
  e.alpha = alpha;
  e.N = cfg.N;
  e.M = cfg.M;
  long double sum = 0;
  for (const auto& s : samples) {
    sum += s.average;
    e.restarts += s.restarts;
  }
  const long double mean = sum / static_cast<long double>(cfg.M);
  long double sq = 0;
  for (const auto& s : samples) sq += (s.average - mean) * (s.average - mean);
  e.mean = static_cast<double>(mean);
  e.std = static_cast<double>(std::sqrt(sq / static_cast<long double>(cfg.M)));
  return e;
}

inline std::vector<double> grid_points(double lo, double hi, int grid) {
  if (grid < 1) throw error(errc::invalid_argument, "grid must be >= 1");
  if (grid == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < grid; ++i) out.push_back(lo + (hi - lo) * i / (grid - 1));
  return out;
}

inline std::vector<EntropyEstimate> sigma_profile(double lo, double hi, int grid, const EstimatorConfig& cfg) {
  if (!(0 < lo && lo <= hi && hi <= 1)) throw error(errc::out_of_domain, "window must lie in (0, 1]");
  std::vector<EntropyEstimate> out;
  for (double a : grid_points(lo, hi, grid)) out.push_back(birkhoff_entropy(a, cfg));
  return out;
}

struct Histogram {
  double lo = 0;  // alpha - 1
  double hi = 1;  // alpha
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_lo(std::size_t i) const { return lo + width() * static_cast<double>(i); }
  double bin_hi(std::size_t i) const { return lo + width() * static_cast<double>(i + 1); }
  double center(std::size_t i) const { return lo + width() * (static_cast<double>(i) + 0.5); }
  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * width());
  }
  double mass() const {
    double m = 0;
    for (std::size_t i = 0; i < bins(); ++i) m += density(i) * width();
    return m;
  }
};

inline constexpr std::uint64_t histogram_burn_in = 1000;
inline constexpr std::size_t histogram_chunks = 64;

/// Occupation frequencies of N orbit points, split into a fixed number of
/// independent orbits so the result does not depend on the thread count.
inline Histogram density_histogram(double alpha, std::uint64_t N, std::size_t bins, std::uint64_t seed,
                                   unsigned threads = 1, double epsilon = 1e-16) {
  detail::check_alpha(alpha);
  if (bins < 10) throw error(errc::invalid_argument, "bins must be >= 10");
  if (N < 1) throw error(errc::invalid_argument, "N must be >= 1");
  Histogram h;
  h.lo = alpha - 1.0;
  h.hi = alpha;
  std::vector<std::vector<std::uint64_t>> parts(histogram_chunks, std::vector<std::uint64_t>(bins, 0));
  parallel_for(histogram_chunks, threads, [&](std::size_t c) {
    auto rng = detail::stream(seed, c);
    const std::uint64_t n = N / histogram_chunks + (c < N % histogram_chunks ? 1 : 0);
    const double scale = static_cast<double>(bins);
    auto& cnt = parts[c];
    double x = detail::uniform_point(rng, alpha);
    std::uint64_t warm = 0;
    for (std::uint64_t j = 0; j < n;) {
      if (std::fabs(x) <= epsilon) {
        x = detail::uniform_point(rng, alpha);
        warm = 0;
        continue;
      }
      if (warm < histogram_burn_in) {
        ++warm;
      } else {
        auto b = static_cast<std::size_t>((x - h.lo) * scale);
        cnt[std::min(b, bins - 1)]++;
        ++j;
      }
      x = detail::step(alpha, x);
    }
  });
  h.counts.assign(bins, 0);
  for (const auto& p : parts)
    for (std::size_t i = 0; i < bins; ++i) h.counts[i] += p[i];
  for (auto c : h.counts) h.total += c;
  return h;
}

struct HyperbolaFit {
  double A = 0;
  double B = 0;
  double window_lo = 0;
  double window_hi = 0;
  double residual = 0;  // relative rms of density against A/(x+B)
  std::size_t bins_used = 0;
};

inline constexpr double hyperbola_residual_limit = 0.02;

/// A/(x+B) through bins fully inside the window, from the line 1/rho = x/A + B/A
/// weighted by counts.
inline HyperbolaFit fit_hyperbola(const Histogram& h, double lo, double hi) {
  if (!(h.lo <= lo && lo < hi && hi <= h.hi)) throw error(errc::invalid_argument, "window outside the histogram");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.bin_lo(i) < lo || h.bin_hi(i) > hi || h.counts[i] == 0) continue;
    const double w = static_cast<double>(h.counts[i]);
    const double x = h.center(i), y = 1.0 / h.density(i);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
    used.push_back(i);
  }
  if (used.size() < 5) throw error(errc::ill_conditioned, "fewer than 5 bins in the fit window");
  const double den = sw * sxx - sx * sx;
  if (!(std::fabs(den) > 0)) throw error(errc::ill_conditioned, "degenerate fit window");
  const double slope = (sw * sxy - sx * sy) / den;
  const double icpt = (sy - slope * sx) / sw;
  HyperbolaFit f;
  f.A = 1.0 / slope;
  f.B = icpt / slope;
  f.window_lo = lo;
  f.window_hi = hi;
  f.bins_used = used.size();
  if (!(f.B > -lo)) throw error(errc::ill_conditioned, "pole inside the fit window");
  double r = 0;
  for (auto i : used) {
    const double model = f.A / (h.center(i) + f.B);
    const double d = (h.density(i) - model) / model;
    r += d * d;
  }
  f.residual = std::sqrt(r / static_cast<double>(used.size()));
  if (f.residual > hyperbola_residual_limit)
    throw error(errc::ill_conditioned, "residual " + std::to_string(f.residual) + " suggests a density jump");
  return f;
}

struct FitWindows {
  int k1 = 0;
  int k2 = 0;
  std::vector<double> orbit_set;  // T^m(alpha), 1 <= m < k1, and T^n(alpha - 1), 1 <= n < k2
  double right_lo = 0;            // max of the orbit set; the right window is [right_lo, alpha]
  double left_hi = 0;             // min of the orbit set; the left window is [alpha - 1, left_hi]
};

/// Fit windows from the exact orbit set at a matching parameter.
inline FitWindows fit_windows(const BigRational& alpha, int kmax = 40) {
  const QuadSurd a(alpha);
  auto k = find_matching_exponents(a, kmax);
  if (!k) throw error(errc::verification_failed, "no matching found up to kmax at " + rational_to_string(alpha));
  FitWindows w;
  w.k1 = k->first;
  w.k2 = k->second;
  AlphaParam p(a);
  auto xa = expand(p, a, static_cast<std::size_t>(w.k1 - 1));
  auto xb = expand(p, a - QuadSurd(1), static_cast<std::size_t>(w.k2 - 1));
  for (std::size_t m = 1; m < xa.points.size(); ++m) w.orbit_set.push_back(xa.points[m].to_double());
  for (std::size_t n = 1; n < xb.points.size(); ++n) w.orbit_set.push_back(xb.points[n].to_double());
  if (w.orbit_set.empty()) throw error(errc::invalid_argument, "empty orbit set");
  w.right_lo = *std::max_element(w.orbit_set.begin(), w.orbit_set.end());
  w.left_hi = *std::min_element(w.orbit_set.begin(), w.orbit_set.end());
  return w;
}

struct ExtrapolationModel {
  double alpha0 = 0;
  double h0 = 0;
  int k1 = 0;
  int k2 = 0;
  double A = 0;
  double B = 0;
  Interval interval;  // matching interval containing alpha0
};

inline BigRational exact_rational(double x) {
  BigRational r(x);
  r.canonicalize();
  return r;
}

/// h(x) = h0 / (1 + (k2 - k1) A log((B + alpha0)/(B + x))).
inline double entropy_extrapolate(const ExtrapolationModel& m, double x) {
  if (!m.interval.contains(QuadSurd(exact_rational(x))))
    throw error(errc::outside_matching_interval, std::to_string(x) + " not in " + m.interval.to_string());
  if (m.k1 == m.k2) return m.h0;
  return m.h0 / (1.0 + (m.k2 - m.k1) * m.A * std::log((m.B + m.alpha0) / (m.B + x)));
}

/// Least-squares h0 for fixed A, B over (alpha, entropy) data.
inline double fit_h0(const ExtrapolationModel& m, const std::vector<double>& xs, const std::vector<double>& hs) {
  ExtrapolationModel unit = m;
  unit.h0 = 1.0;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double g = entropy_extrapolate(unit, xs[i]);
    num += g * hs[i];
    den += g * g;
  }
  if (!(den > 0)) throw error(errc::ill_conditioned, "no data for h0");
  return num / den;
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double operator()(double x) const { return intercept + slope * x; }
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (xs.size() < 2 || !(std::fabs(den) > 0)) throw error(errc::ill_conditioned, "line fit needs two distinct x");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

/// Matching interval and exponents around a rational parameter, via the float scan.
inline MatchingInterval matching_interval_at(const BigRational& alpha, int kmax = 40) {
  auto c = scan_candidate(alpha, kmax);
  if (!c) throw error(errc::verification_failed, "no matching candidate at " + rational_to_string(alpha));
  return solve_matching(*c);
}

inline double golden_plateau_entropy() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  return std::numbers::pi * std::numbers::pi / (6.0 * std::log(phi));
}

/// pi^2/(6 log phi) on [cluster point, (sqrt5 - 1)/2]; none elsewhere.
inline std::optional<double> closed_form_entropy(const QuadSurd& alpha) {
  static const ClusterPoint hat = cluster_point({1}, 10);
  if (surd_cmp(alpha, label_value({1})) > 0) return std::nullopt;
  if (surd_cmp(alpha, QuadSurd(hat.hi)) >= 0) return golden_plateau_entropy();
  // at or left of the enclosure: undecided values count as outside
  return std::nullopt;
}

struct DerivativeReport {
  int k1 = 0;
  int k2 = 0;
  double h = 0;
  double slope_left = 0;  // finite differences of Birkhoff means
  double slope_right = 0;
  double predicted_left = 0;  // h (k2 - k1) rho near alpha
  double predicted_right = 0;  // h (k2 - k1) rho near alpha - 1
  double noise = 0;            // standard error of a slope
  double ratio_left = 0;
  double ratio_right = 0;
};

/// One-sided slopes of the entropy at alpha against the density prediction.
/// All three estimates share the sample seeds, which cancels most of the noise.
inline DerivativeReport derivative_check(const BigRational& alpha, double h_step, const EstimatorConfig& cfg,
                                         std::uint64_t hist_points = 10'000'000, std::size_t bins = 1000) {
  MatchingInterval mi = matching_interval_at(alpha);
  const double a = alpha.get_d();
  DerivativeReport r;
  r.k1 = mi.k1;
  r.k2 = mi.k2;
  auto e0 = birkhoff_entropy(a, cfg);
  auto el = birkhoff_entropy(a - h_step, cfg);
  auto er = birkhoff_entropy(a + h_step, cfg);
  r.h = e0.mean;
  r.slope_left = (e0.mean - el.mean) / h_step;
  r.slope_right = (er.mean - e0.mean) / h_step;
  r.noise = std::sqrt(2.0) * e0.std / std::sqrt(static_cast<double>(cfg.M)) / h_step;
  Histogram hist = density_histogram(a, hist_points, bins, cfg.rng_seed, cfg.threads, cfg.epsilon);
  // density averaged over the bins closest to each end
  const std::size_t k = std::max<std::size_t>(1, bins / 100);
  double top = 0, bottom = 0;
  for (std::size_t i = 0; i < k; ++i) {
    top += hist.density(bins - 1 - i);
    bottom += hist.density(i);
  }
  top /= static_cast<double>(k);
  bottom /= static_cast<double>(k);
  r.predicted_left = r.h * (r.k2 - r.k1) * top;
  r.predicted_right = r.h * (r.k2 - r.k1) * bottom;
  r.ratio_left = r.predicted_left != 0 ? r.slope_left / r.predicted_left : 0;
  r.ratio_right = r.predicted_right != 0 ? r.slope_right / r.predicted_right : 0;
  return r;
}

}  // namespace alphacf
