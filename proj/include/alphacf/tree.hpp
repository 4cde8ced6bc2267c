#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alphacf/cfrac.hpp"
#include "alphacf/matching.hpp"
#include "alphacf/parallel.hpp"

namespace alphacf {

/// A closed gap [lo, hi]; endpoint labels S mean [0; S S S ...], the empty label means 0.
struct Gap {
  Interval interval;
  int level = 0;
  bool is_point = false;
  CFString label_lo;
  CFString label_hi;
};

/// Raised when a pseudocenter interval fails exact verification.
class counterexample : public error {
 public:
  counterexample(std::string certificate)
      : error(errc::verification_failed, "pseudocenter interval is not a matching interval"),
        certificate_(std::move(certificate)) {}
  const std::string& certificate() const { return certificate_; }

 private:
  std::string certificate_;
};

inline std::string format_endpoint(const CFString& label) {
  return label.empty() ? "0" : format_cf({{}, label});
}

inline Gap initial_gap() {
  Gap g;
  g.interval = Interval(QuadSurd(0), label_value({1}), true, true);
  g.label_hi = {1};
  return g;
}

/// ((sqrt5 - 1)/2, 1], the interval to the right of the initial gap.
inline MatchingInterval rightmost_interval() {
  MatchingInterval mi = solve_matching({QuadSurd(BigRational(7, 10)), 2, 1});
  mi.label_lo = {1};
  return mi;
}

struct Refinement {
  BigRational pseudocenter;
  MatchingInterval interval;
  Gap left;
  Gap right;
};

namespace detail {

inline Gap make_gap(const QuadSurd& lo, const QuadSurd& hi, const CFString& llo, const CFString& lhi, int level) {
  Gap g;
  g.interval = Interval(lo, hi, true, true);
  g.level = level;
  g.is_point = g.interval.is_point();
  g.label_lo = llo;
  g.label_hi = lhi;
  return g;
}

inline std::string certificate(const Interval& where, const BigRational& r, const RationalInterval& ir,
                               std::pair<int, int> k, const std::string& reason) {
  std::ostringstream os;
  os << "gap " << where.to_string() << "\n"
     << "gap_exact " << where.lo.to_string() << " " << where.hi.to_string() << "\n"
     << "pseudocenter " << rational_to_string(r) << "\n"
     << "candidate " << ir.interval.to_string() << "\n"
     << "labels " << format_label(ir.label_lo) << " | " << format_label(ir.label_hi) << "\n"
     << "k " << k.first << " " << k.second << "\n"
     << "reason " << reason << "\n";
  return os.str();
}

/// I_r checked as a matching interval with exponents from the labels.
inline MatchingInterval verified_rational_interval(const BigRational& r, const Interval& where) {
  RationalInterval ir = interval_for_rational(r);
  const auto k = k_from_label(ir.label_lo, EndpointSide::Left);
  if (k_from_label(ir.label_hi, EndpointSide::Right) != k)
    throw counterexample(certificate(where, r, ir, k, "endpoint labels give different exponents"));
  const QuadSurd seed = (ir.interval.lo + QuadSurd(r)) / QuadSurd(2);
  MatchingInterval mi;
  try {
    mi = solve_matching({seed, k.first, k.second});
  } catch (const error& e) {
    throw counterexample(certificate(where, r, ir, k, e.what()));
  }
  if (!(mi.interval.lo == ir.interval.lo && mi.interval.hi == ir.interval.hi))
    throw counterexample(certificate(where, r, ir, k, "solved interval " + mi.interval.to_string()));
  mi.label_lo = ir.label_lo;
  mi.label_hi = ir.label_hi;
  return mi;
}

}  // namespace detail

inline Refinement refine_gap(const Gap& j) {
  if (j.is_point) throw error(errc::point_interval, j.interval.to_string());
  Refinement out;
  out.pseudocenter = pseudocenter(j.interval);
  out.interval = detail::verified_rational_interval(out.pseudocenter, j.interval);
  const Interval& ir = out.interval.interval;
  out.left = detail::make_gap(j.interval.lo, ir.lo, j.label_lo, out.interval.label_lo, j.level + 1);
  out.right = detail::make_gap(ir.hi, j.interval.hi, out.interval.label_hi, j.label_hi, j.level + 1);
  return out;
}

struct Tree {
  std::vector<MatchingInterval> intervals;  // sorted by left endpoint
  std::vector<std::vector<Gap>> levels;     // levels[n] is the gap family of level n
  const std::vector<Gap>& gaps() const { return levels.back(); }
};

namespace detail {

inline bool lo_less(const QuadSurd& a, const QuadSurd& b) { return surd_cmp(a, b) < 0; }

inline bool overlaps(const Gap& g, const std::optional<Interval>& window) {
  if (!window) return true;
  return surd_cmp(g.interval.lo, window->hi) < 0 && surd_cmp(window->lo, g.interval.hi) < 0;
}

}  // namespace detail

/// Gaps outside `window` and point gaps are carried to the next level unchanged.
inline Tree generate_tree(int depth, unsigned threads = 1, const std::optional<Interval>& window = std::nullopt) {
  if (depth < 0) throw error(errc::invalid_argument, "depth must be >= 0");
  Tree t;
  t.levels.push_back({initial_gap()});
  for (int n = 0; n < depth; ++n) {
    const std::vector<Gap>& cur = t.levels.back();
    std::vector<std::optional<Refinement>> refined(cur.size());
    parallel_for(cur.size(), threads, [&](std::size_t i) {
      if (!cur[i].is_point && detail::overlaps(cur[i], window)) refined[i] = refine_gap(cur[i]);
    });
    std::vector<Gap> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (refined[i]) {
        next.push_back(refined[i]->left);
        next.push_back(refined[i]->right);
        t.intervals.push_back(std::move(refined[i]->interval));
      } else {
        next.push_back(cur[i]);
        next.back().level = n + 1;
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const Gap& a, const Gap& b) { return detail::lo_less(a.interval.lo, b.interval.lo); });
    t.levels.push_back(std::move(next));
  }
  std::stable_sort(t.intervals.begin(), t.intervals.end(), [](const MatchingInterval& a, const MatchingInterval& b) {
    return detail::lo_less(a.interval.lo, b.interval.lo);
  });
  return t;
}

/// Tree intervals plus the rightmost one.
inline std::vector<MatchingInterval> all_intervals(const Tree& t) {
  std::vector<MatchingInterval> out = t.intervals;
  out.push_back(rightmost_interval());
  return out;
}

/// Every label quotient is at most the first one, i.e. endpoints of a gap in
/// (1/(n+1), 1/n] have quotients bounded by n.
inline bool bounded_type(const CFString& label) {
  return label.empty() || *std::max_element(label.begin(), label.end()) <= label.front();
}

/// A rational r' in I_r with I_r' not inside I_r, scanning denominators up to qmax.
inline std::optional<BigRational> maximality_witness(const BigRational& r, long qmax) {
  if (r <= 0 || r >= 1) throw error(errc::invalid_argument, "r must lie in (0, 1)");
  const Interval ir = interval_for_rational(r).interval;
  const double lo = ir.lo.to_double(), hi = ir.hi.to_double();
  for (long q = 2; q <= qmax; ++q) {
    const long pmin = std::max(1L, static_cast<long>(lo * static_cast<double>(q)) - 1);
    const long pmax = std::min(q - 1, static_cast<long>(hi * static_cast<double>(q)) + 1);
    for (long p = pmin; p <= pmax; ++p) {
      if (std::gcd(p, q) != 1) continue;
      BigRational s(p, q);
      if (s == r || !ir.contains(QuadSurd(s))) continue;
      const Interval is = interval_for_rational(s).interval;
      if (surd_cmp(is.lo, ir.lo) < 0 || surd_cmp(ir.hi, is.hi) < 0) return s;
    }
  }
  return std::nullopt;
}

/// Maximal up to denominators qmax.
inline bool is_maximal(const BigRational& r, long qmax = 1000) { return !maximality_witness(r, qmax); }

struct ChainState {
  CFString s;
  int level = 1;
};

inline ChainState next_chain_state(const ChainState& c) {
  CFString ss = c.s;
  ss.insert(ss.end(), c.s.begin(), c.s.end());
  return {conjugate_string(ss), c.level + 1};
}

/// Links I_n = I_r with r = [0; S_n S_n], n = 1..levels; each link is adjacent to the previous one on its left.
inline std::vector<MatchingInterval> doubling_chain(const CFString& s0, int levels) {
  if (s0.empty() || s0.size() % 2 == 0) throw error(errc::invalid_string, "S0 must have odd length");
  if (levels < 0) throw error(errc::invalid_argument, "levels must be >= 0");
  std::vector<MatchingInterval> out;
  ChainState c{s0, 1};
  for (int n = 1; n <= levels; ++n, c = next_chain_state(c)) {
    CFString ss = c.s;
    ss.insert(ss.end(), c.s.begin(), c.s.end());
    const BigRational r = cf_finite_value(ss);
    MatchingInterval mi = detail::verified_rational_interval(r, interval_for_rational(r).interval);
    if (!out.empty() && !(mi.interval.hi == out.back().interval.lo))
      throw error(errc::verification_failed, "link " + std::to_string(n) + " is not adjacent to link " +
                                                 std::to_string(n - 1));
    out.push_back(std::move(mi));
  }
  return out;
}

struct ClusterPoint {
  std::string decimal;  // certified digits, truncated
  CFString prefix;
  BigRational lo;       // enclosure of the cluster point
  BigRational hi;
};

namespace detail {

inline std::string scaled_digits(const BigRational& x, unsigned long n) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, n);
  BigInt v = floor_div(BigInt(x.get_num() * scale), x.get_den());
  std::string s = v.get_str();
  if (s.size() < n) s.insert(0, n - s.size(), '0');
  return s;
}

}  // namespace detail

inline ClusterPoint cluster_point(const CFString& s0, int levels, unsigned long max_digits = 1000) {
  if (s0.empty() || s0.size() % 2 == 0) throw error(errc::invalid_string, "S0 must have odd length");
  ChainState c{s0, 1};
  while (c.level < levels) c = next_chain_state(c);
  ClusterPoint out;
  out.prefix = c.s;
  // every number whose expansion starts with S lies between [0;S] and [0;S,1]
  CFString s1 = c.s;
  s1.push_back(1);
  out.lo = cf_finite_value(c.s);
  out.hi = cf_finite_value(s1);
  if (out.lo > out.hi) std::swap(out.lo, out.hi);
  if (out.lo < 0 || out.hi >= 1) throw error(errc::invalid_string, "prefix does not lie in (0, 1)");
  const std::string a = detail::scaled_digits(out.lo, max_digits), b = detail::scaled_digits(out.hi, max_digits);
  std::size_t k = 0;
  while (k < a.size() && a[k] == b[k]) ++k;
  out.decimal = "0." + a.substr(0, k);
  return out;
}

/// Measure of the union of the intervals inside `window`, over the window length.
inline double coverage(const std::vector<MatchingInterval>& intervals, const Interval& window) {
  if (window.is_point()) throw error(errc::point_interval, window.to_string());
  std::vector<std::pair<QuadSurd, QuadSurd>> parts;
  for (const auto& mi : intervals) {
    const QuadSurd& lo = surd_cmp(mi.interval.lo, window.lo) > 0 ? mi.interval.lo : window.lo;
    const QuadSurd& hi = surd_cmp(mi.interval.hi, window.hi) < 0 ? mi.interval.hi : window.hi;
    if (surd_cmp(lo, hi) < 0) parts.emplace_back(lo, hi);
  }
  std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return surd_cmp(x.first, y.first) < 0; });
  const unsigned long bits = 256;
  mpf_class total(0, bits);
  std::optional<std::pair<QuadSurd, QuadSurd>> cur;
  auto flush = [&] {
    if (cur) total += Interval(cur->first, cur->second).length_mpf(bits);
  };
  for (auto& p : parts) {
    if (cur && surd_cmp(p.first, cur->second) <= 0) {
      if (surd_cmp(p.second, cur->second) > 0) cur->second = p.second;
    } else {
      flush();
      cur = p;
    }
  }
  flush();
  mpf_class w = window.length_mpf(bits);
  mpf_class frac(0, bits);
  frac = total / w;
  return frac.get_d();
}

}  // namespace alphacf
