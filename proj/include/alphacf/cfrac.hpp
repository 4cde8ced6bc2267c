#pragma once

// Regular continued fractions of quadratic surds and rationals: expansion with
// period detection, evaluation, conjugate strings, I_r and pseudocenters.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "alphacf/exactnum.hpp"

namespace alphacf {

using CFString = std::vector<std::uint64_t>;

/// [0; preperiod, period, period, ...]; an empty period means a finite expansion.
struct PeriodicCF {
  CFString preperiod;
  CFString period;

  bool is_finite() const { return period.empty(); }
  friend bool operator==(const PeriodicCF&, const PeriodicCF&) = default;
};

struct Interval {
  QuadSurd lo;
  QuadSurd hi;
  bool lo_closed = false;
  bool hi_closed = false;

  Interval() = default;
  Interval(QuadSurd l, QuadSurd h, bool lc = false, bool hc = false)
      : lo(std::move(l)), hi(std::move(h)), lo_closed(lc), hi_closed(hc) {
    if (lo > hi) throw error(errc::empty_interval, lo.pretty() + " > " + hi.pretty());
  }

  bool is_point() const { return lo == hi; }

  bool contains(const QuadSurd& x) const {
    const int a = surd_cmp(lo, x), b = surd_cmp(x, hi);
    return (a < 0 || (a == 0 && lo_closed)) && (b < 0 || (b == 0 && hi_closed));
  }

  /// hi - lo at `bits` of precision; exact endpoints may live in different fields.
  mpf_class length_mpf(unsigned long bits = 256) const {
    mpf_class h = hi.to_mpf(bits), l = lo.to_mpf(bits);
    mpf_class out(0, h.get_prec());
    out = h - l;
    return out;
  }

  double length() const { return length_mpf(128).get_d(); }

  std::string to_string() const {
    return std::string(lo_closed ? "[" : "(") + lo.pretty() + ", " + hi.pretty() +
           (hi_closed ? "]" : ")");
  }

  friend bool operator==(const Interval& x, const Interval& y) {
    return x.lo == y.lo && x.hi == y.hi && x.lo_closed == y.lo_closed && x.hi_closed == y.hi_closed;
  }
};

namespace detail {

inline std::uint64_t to_quotient(const BigInt& a) {
  if (a < 1 || !a.fits_ulong_p()) throw error(errc::invalid_argument, "partial quotient out of range: " + a.get_str());
  return a.get_ui();
}

// [[0,1],[1,a]] products: x -> 1/(a + x)
inline IntMatrix2 cf_matrix(const CFString& s) {
  IntMatrix2 m;
  for (auto a : s) m = m * IntMatrix2{0, 1, 1, BigInt(a)};
  return m;
}

}  // namespace detail

/// Regular continued fraction of a rational in [0, 1): quotients after the leading 0.
inline CFString cf_of_rational(const BigRational& x) {
  if (x < 0 || x >= 1) throw error(errc::out_of_domain, "expected 0 <= x < 1");
  CFString out;
  BigInt num = x.get_num(), den = x.get_den();
  // x = num/den; step to den/num
  while (num != 0) {
    BigInt q = detail::floor_div(den, num);
    BigInt rem = den - q * num;
    out.push_back(detail::to_quotient(q));
    den = num;
    num = rem;
  }
  return out;
}

/// Expansion of x in (0, 1). Rationals give a finite preperiod and an empty period.
inline PeriodicCF cf_expand(const QuadSurd& x) {
  if (x.sign() < 0 || surd_cmp(x, QuadSurd(1)) >= 0)
    throw error(errc::out_of_domain, "cf_expand expects 0 <= x < 1, got " + x.pretty());
  if (x.is_rational()) return {cf_of_rational(x.rational()), {}};

  // x = (P + sqrt(D))/Q with Q | D - P^2
  BigInt p = x.p(), q = x.q(), r = x.r();
  if (q < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  BigInt ar = abs(r);
  BigInt P = p * ar;
  BigInt D = q * q * x.d() * r * r;
  BigInt Q = r * ar;
  const BigInt root = detail::isqrt(D);

  auto floor_state = [&](const BigInt& P0, const BigInt& Q0) {
    if (Q0 > 0) return detail::floor_div(P0 + root, Q0);
    return detail::floor_div(-P0 - root - 1, -Q0);
  };
  auto advance = [&](BigInt& P0, BigInt& Q0, const BigInt& a) {
    BigInt Pn = a * Q0 - P0;
    BigInt Qn = (D - Pn * Pn) / Q0;
    P0 = std::move(Pn);
    Q0 = std::move(Qn);
  };

  advance(P, Q, BigInt(0));  // skip the integer part 0
  CFString quotients;
  std::map<std::pair<BigInt, BigInt>, std::size_t> seen;
  while (true) {
    auto key = std::make_pair(P, Q);
    auto it = seen.find(key);
    if (it != seen.end()) {
      PeriodicCF out;
      out.preperiod.assign(quotients.begin(), quotients.begin() + static_cast<long>(it->second));
      out.period.assign(quotients.begin() + static_cast<long>(it->second), quotients.end());
      return out;
    }
    seen.emplace(std::move(key), quotients.size());
    BigInt a = floor_state(P, Q);
    quotients.push_back(detail::to_quotient(a));
    advance(P, Q, a);
  }
}

/// Exact value of [0; preperiod, period^inf].
inline QuadSurd cf_value(const PeriodicCF& c) {
  const IntMatrix2 pre = detail::cf_matrix(c.preperiod);
  if (c.period.empty()) return mobius_apply(pre, QuadSurd(0));
  // z = M(z) with z in (0, 1): C z^2 + (D - A) z - B = 0, take the positive root
  const IntMatrix2 m = detail::cf_matrix(c.period);
  const QuadSurd z = quadratic_roots(m.c, m.d - m.a, -m.b).first;
  return mobius_apply(pre, z);
}

/// Value of the finite continued fraction [0; s].
inline BigRational cf_finite_value(const CFString& s) {
  return cf_value({s, {}}).rational();
}

/// Value of the purely periodic [0; s, s, ...].
inline QuadSurd label_value(const CFString& s) {
  if (s.empty()) return QuadSurd(0);
  return cf_value({{}, s});
}

/// {a1..am,1} <-> {a1..am+1}; the singleton {1} maps to {2}.
inline CFString conjugate_string(const CFString& s) {
  if (s.empty()) throw error(errc::invalid_string, "empty string");
  for (auto a : s)
    if (a == 0) throw error(errc::invalid_string, "zero quotient");
  if (s.size() == 1 && s[0] == 1) return {2};
  CFString out = s;
  if (out.back() == 1) {
    out.pop_back();
    out.back() += 1;
  } else {
    out.back() -= 1;
    out.push_back(1);
  }
  return out;
}

/// Alternating-order comparison of finite expansions [0; a] and [0; b]; an
/// exhausted string behaves as if its next quotient were +infinity.
inline int cf_compare(const CFString& a, const CFString& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) continue;
    const int c = a[i] < b[i] ? 1 : -1;  // larger quotient at odd depth means smaller value
    return (i % 2 == 0) ? c : -c;
  }
  if (a.size() == b.size()) return 0;
  const int c = a.size() < b.size() ? -1 : 1;  // a has +inf at position n
  return (n % 2 == 0) ? c : -c;
}

struct RationalInterval {
  Interval interval;
  CFString label_lo;
  CFString label_hi;
};

/// I_r with endpoints [0; S^inf] and [0; S'^inf], S and S' the two expansions of r.
inline RationalInterval interval_for_rational(const BigRational& r) {
  if (r <= 0 || r >= 1) throw error(errc::out_of_domain, "expected 0 < r < 1");
  CFString s2 = cf_of_rational(r);
  CFString s1 = s2;
  s1.back() -= 1;
  s1.push_back(1);
  QuadSurd v1 = label_value(s1), v2 = label_value(s2);
  if (v1 < v2) return {Interval(v1, v2), s1, s2};
  return {Interval(v2, v1), s2, s1};
}

namespace detail {

// simplest rational strictly inside (lo, hi); hi == nullopt stands for +infinity
inline BigRational simplest_between(const QuadSurd& lo, const std::optional<QuadSurd>& hi) {
  const BigInt m = surd_floor(lo);
  const BigInt n = m + 1;
  if (!hi || surd_cmp(QuadSurd(n), *hi) < 0) return BigRational(n);
  // lo and hi both lie in [m, m + 1]
  const QuadSurd hi_frac = *hi - QuadSurd(m);
  const QuadSurd lo_frac = lo - QuadSurd(m);
  const QuadSurd inv_hi = surd_inv(hi_frac);
  std::optional<QuadSurd> inv_lo;
  if (!lo_frac.is_zero()) inv_lo = surd_inv(lo_frac);
  BigRational t = simplest_between(inv_hi, inv_lo);
  BigRational out = BigRational(m) + 1 / t;
  out.canonicalize();
  return out;
}

}  // namespace detail

/// Rational of minimal denominator in the open interval J.
inline BigRational pseudocenter(const Interval& j) {
  const int c = surd_cmp(j.lo, j.hi);
  if (c > 0) throw error(errc::empty_interval, j.to_string());
  if (c == 0) throw error(errc::point_interval, j.to_string());
  return detail::simplest_between(j.lo, j.hi);
}

/// "2,1,1"
inline std::string format_label(const CFString& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out;
}

inline CFString parse_label(const std::string& text) {
  CFString out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw error(errc::parse_error, "bad label '" + text + "'");
    }
  }
  return out;
}

/// "[0;3,(2,1,1)^inf]" or "[0;2,2]"
inline std::string format_cf(const PeriodicCF& c) {
  std::string out = "[0;" + format_label(c.preperiod);
  if (!c.period.empty()) {
    if (!c.preperiod.empty()) out += ",";
    out += "(" + format_label(c.period) + ")^inf";
  }
  return out + "]";
}

}  // namespace alphacf
