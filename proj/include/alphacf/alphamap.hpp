#pragma once

// The alpha-continued-fraction map T(x) = 1/|x| - floor(1/|x| + 1 - alpha) on
// [alpha - 1, alpha): exact and floating orbits, codings, convergents, matrices.

#include <cmath>
#include <cstdint>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "alphacf/exactnum.hpp"

namespace alphacf {

/// One step (a, eps). a == 0 marks the orbit having reached 0.
struct Digit {
  std::uint64_t a = 0;
  int eps = 0;

  static Digit zero() { return {}; }
  bool is_zero() const { return a == 0; }
  friend bool operator==(const Digit&, const Digit&) = default;
};

using Coding = std::vector<Digit>;

struct AlphaParam {
  QuadSurd value;
  double approx = 0;

  AlphaParam() = default;
  explicit AlphaParam(QuadSurd v) : value(std::move(v)) {
    if (value.sign() <= 0 || surd_cmp(value, QuadSurd(1)) > 0)
      throw error(errc::out_of_domain, "alpha must lie in (0, 1], got " + value.pretty());
    approx = value.to_double();
  }
};

struct OrbitRecord {
  std::vector<QuadSurd> points;
  Coding digits;
};

struct FloatOrbit {
  std::vector<double> points;
  Coding digits;
};

inline constexpr double float_zero_cutoff = 1e-16;

/// One exact step; 0 is a fixed point reported with the zero digit.
inline std::pair<QuadSurd, Digit> t_alpha_step(const AlphaParam& alpha, const QuadSurd& x) {
  const QuadSurd lower = alpha.value - QuadSurd(1);
  if (surd_cmp(x, lower) < 0 || surd_cmp(x, alpha.value) > 0)
    throw error(errc::out_of_domain, x.pretty() + " outside [alpha-1, alpha]");
  const int s = x.sign();
  if (s == 0) return {QuadSurd(0), Digit::zero()};
  const QuadSurd inv = surd_inv(s > 0 ? x : surd_neg(x));
  const BigInt a = surd_floor(inv + QuadSurd(1) - alpha.value);
  if (!a.fits_ulong_p()) throw error(errc::invalid_argument, "digit overflow");
  return {inv - QuadSurd(a), Digit{a.get_ui(), s}};
}

/// Exact orbit of x for up to n steps, stopping early when it reaches 0.
inline OrbitRecord expand(const AlphaParam& alpha, const QuadSurd& x, std::size_t n) {
  OrbitRecord out;
  out.points.push_back(x);
  QuadSurd cur = x;
  for (std::size_t i = 0; i < n && !cur.is_zero(); ++i) {
    auto [next, digit] = t_alpha_step(alpha, cur);
    out.digits.push_back(digit);
    out.points.push_back(next);
    cur = std::move(next);
  }
  return out;
}

inline std::pair<double, Digit> t_alpha_step_float(double alpha, double x) {
  if (std::fabs(x) <= float_zero_cutoff) return {0.0, Digit::zero()};
  const double inv = 1.0 / std::fabs(x);
  const double a = std::floor(inv + 1.0 - alpha);
  return {inv - a, Digit{static_cast<std::uint64_t>(a), x > 0 ? 1 : -1}};
}

inline FloatOrbit expand_float(double alpha, double x, std::size_t n) {
  FloatOrbit out;
  out.points.push_back(x);
  for (std::size_t i = 0; i < n && std::fabs(x) > float_zero_cutoff; ++i) {
    auto [next, digit] = t_alpha_step_float(alpha, x);
    out.digits.push_back(digit);
    out.points.push_back(next);
    x = next;
  }
  return out;
}

/// (p_n, q_n) for n = 0..len from p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1.
inline std::vector<std::pair<BigInt, BigInt>> convergent_pairs(const Coding& digits) {
  std::vector<std::pair<BigInt, BigInt>> out;
  BigInt pm1 = 1, p = 0, qm1 = 0, q = 1;
  out.emplace_back(p, q);
  for (const Digit& d : digits) {
    if (d.is_zero()) break;
    BigInt pn = d.eps * pm1 + BigInt(d.a) * p;
    BigInt qn = d.eps * qm1 + BigInt(d.a) * q;
    pm1 = std::move(p);
    qm1 = std::move(q);
    p = std::move(pn);
    q = std::move(qn);
    out.emplace_back(p, q);
  }
  return out;
}

inline std::vector<BigRational> convergents(const Coding& digits) {
  std::vector<BigRational> out;
  for (auto& [p, q] : convergent_pairs(digits)) {
    BigRational v(p, q);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

inline IntMatrix2 digit_matrix(const Digit& d) { return {0, d.eps, 1, BigInt(d.a)}; }

/// Product of [[0, eps_i], [1, a_i]]; T^n(x) = M^{-1}(x).
inline IntMatrix2 orbit_matrix(const Coding& digits) {
  IntMatrix2 m;
  for (const Digit& d : digits) {
    if (d.is_zero()) break;
    m = m * digit_matrix(d);
  }
  return m;
}

inline std::string format_digit(const Digit& d) {
  if (d.is_zero()) return "(0,0)";
  return "(" + std::to_string(d.a) + (d.eps > 0 ? ",+)" : ",-)");
}

/// Run-length text, e.g. "(3,+)(4,-)^2(2,-)".
inline std::string format_coding(const Coding& digits) {
  std::string out;
  for (std::size_t i = 0; i < digits.size();) {
    std::size_t j = i;
    while (j < digits.size() && digits[j] == digits[i]) ++j;
    out += format_digit(digits[i]);
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

inline Coding parse_coding(const std::string& text) {
  static const std::regex item(R"(\(\s*(\d+)\s*,\s*([+-])\s*\)(?:\^(\d+))?)");
  Coding out;
  std::size_t pos = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), item); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (static_cast<std::size_t>(m.position()) != pos) break;
    pos += static_cast<std::size_t>(m.length());
    Digit d{std::stoull(m[1].str()), m[2].str() == "+" ? 1 : -1};
    std::size_t reps = m[3].matched ? std::stoul(m[3].str()) : 1;
    out.insert(out.end(), reps, d);
  }
  if (pos != text.size()) throw error(errc::parse_error, "bad coding '" + text + "'");
  return out;
}

}  // namespace alphacf
