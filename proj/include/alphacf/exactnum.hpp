#pragma once

// Exact arithmetic substrate: big integers and rationals (GMP), real quadratic
// surds (p + q*sqrt(d))/r, and integer 2x2 matrices acting as Moebius maps.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <ostream>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "alphacf/error.hpp"

namespace alphacf {

using BigInt = mpz_class;
using BigRational = mpq_class;

namespace detail {

inline int sgn(const BigInt& v) { return ::sgn(v); }

inline const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned bound = 1000;
    std::vector<bool> sieve(bound + 1, true);
    std::vector<unsigned> out;
    for (unsigned i = 2; i <= bound; ++i) {
      if (!sieve[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j <= bound; j += i) sieve[j] = false;
    }
    return out;
  }();
  return primes;
}

inline BigInt isqrt(const BigInt& n) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_perfect_square(const BigInt& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

/// Sign of P + Q*sqrt(d) for integers P, Q and a non-square d >= 0.
inline int sign_of(const BigInt& P, const BigInt& Q, const BigInt& d) {
  const int sp = sgn(P);
  const int sq = (d == 0) ? 0 : sgn(Q);
  if (sq == 0) return sp;
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  const BigInt lhs = P * P;
  const BigInt rhs = Q * Q * d;
  // p^2 == q^2 d is impossible when d is not a perfect square
  return lhs > rhs ? sp : sq;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace detail

/// Splits n >= 0 as s^2 * core. Trial division by primes below 1000 followed by
/// a perfect-square test on the cofactor; core is guaranteed squarefree when
/// n < 10^9 and is otherwise squarefree up to that trial bound.
inline std::pair<BigInt, BigInt> squarefree_split(BigInt n) {
  if (n < 0) throw error(errc::invalid_argument, "squarefree_split of a negative integer");
  if (n == 0) return {BigInt(0), BigInt(0)};
  BigInt s = 1, core = 1;
  for (unsigned p : detail::small_primes()) {
    if (n == 1) break;
    BigInt cube = BigInt(p) * p * p;
    if (cube > n) break;
    if (!mpz_divisible_ui_p(n.get_mpz_t(), p)) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    for (unsigned i = 0; i < e / 2; ++i) s *= p;
    if (e % 2) core *= p;
  }
  if (detail::is_perfect_square(n)) {
    s *= detail::isqrt(n);
  } else {
    core *= n;
  }
  return {s, core};
}

/// Real quadratic surd (p + q*sqrt(d))/r.
///
/// Canonical form: r > 0, gcd(p, q, r) = 1, d not a perfect square; rationals
/// are stored with q = d = 0. Within one radicand the representation is
/// unique, so structural equality is value equality.
class QuadSurd {
 public:
  QuadSurd() : p_(0), q_(0), d_(0), r_(1) {}
  QuadSurd(long v) : p_(v), q_(0), d_(0), r_(1) {}  // NOLINT(google-explicit-constructor)
  QuadSurd(const BigInt& v) : p_(v), q_(0), d_(0), r_(1) {}  // NOLINT
  QuadSurd(const BigRational& v)  // NOLINT
      : p_(v.get_num()), q_(0), d_(0), r_(v.get_den()) {}

  /// Builds (p + q*sqrt(d))/r, extracting square factors from d.
  static QuadSurd make(BigInt p, BigInt q, const BigInt& d, BigInt r) {
    if (d < 0) throw error(errc::invalid_argument, "negative radicand");
    auto [s, core] = squarefree_split(d);
    q *= s;
    if (core == 1) {
      p += q;
      q = 0;
      core = 0;
    }
    return raw(std::move(p), std::move(q), std::move(core), std::move(r));
  }

  /// Builds from parts whose radicand is already known not to be a perfect square.
  static QuadSurd raw(BigInt p, BigInt q, BigInt d, BigInt r) {
    QuadSurd x;
    x.p_ = std::move(p);
    x.q_ = std::move(q);
    x.d_ = std::move(d);
    x.r_ = std::move(r);
    x.canon();
    return x;
  }

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  const BigInt& d() const { return d_; }
  const BigInt& r() const { return r_; }

  bool is_rational() const { return q_ == 0; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }
  BigRational rational() const {
    if (!is_rational()) throw error(errc::invalid_argument, "surd is irrational");
    BigRational v(p_, r_);
    v.canonicalize();
    return v;
  }

  int sign() const { return detail::sign_of(p_, q_, d_); }

  /// Value to `bits` bits of relative precision beyond the magnitude of the parts.
  mpf_class to_mpf(unsigned long bits = 128) const {
    const unsigned long extra =
        mpz_sizeinbase(p_.get_mpz_t(), 2) + mpz_sizeinbase(q_.get_mpz_t(), 2) +
        mpz_sizeinbase(d_.get_mpz_t(), 2) / 2 + 64;
    const unsigned long prec = bits + extra;
    mpf_class out(p_, prec);
    if (!is_rational()) {
      mpf_class root(d_, prec);
      root = sqrt(root);
      mpf_class qq(q_, prec);
      out += qq * root;
    }
    mpf_class rr(r_, prec);
    out /= rr;
    return out;
  }

  double to_double() const { return to_mpf(80).get_d(); }

  /// "(p+q*sqrt(d))/r"; parsed back losslessly by parse_surd.
  std::string to_string() const {
    std::string s = "(" + p_.get_str();
    s += (q_ < 0) ? "-" : "+";
    BigInt aq = abs(q_);
    s += aq.get_str() + "*sqrt(" + d_.get_str() + "))/" + r_.get_str();
    return s;
  }

  /// Human-oriented form, e.g. "(-2+sqrt(10))/3" or "2/5".
  std::string pretty() const {
    if (is_rational()) return r_ == 1 ? p_.get_str() : p_.get_str() + "/" + r_.get_str();
    std::string s = p_ == 0 ? std::string() : p_.get_str();
    if (q_ < 0) s += "-";
    else if (!s.empty()) s += "+";
    BigInt aq = abs(q_);
    if (aq != 1) s += aq.get_str() + "*";
    s += "sqrt(" + d_.get_str() + ")";
    if (r_ == 1) return s;
    return "(" + s + ")/" + r_.get_str();
  }

  friend bool operator==(const QuadSurd& x, const QuadSurd& y);

 private:
  void canon() {
    if (r_ == 0) throw error(errc::division_by_zero, "zero denominator");
    if (q_ == 0 || d_ == 0) {
      q_ = 0;
      d_ = 0;
    }
    if (r_ < 0) {
      p_ = -p_;
      q_ = -q_;
      r_ = -r_;
    }
    BigInt g = gcd(gcd(p_, q_), r_);
    if (g != 1) {
      mpz_divexact(p_.get_mpz_t(), p_.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(q_.get_mpz_t(), q_.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(r_.get_mpz_t(), r_.get_mpz_t(), g.get_mpz_t());
    }
  }

  BigInt p_, q_, d_, r_;
};

namespace detail {

/// Rewrites y into x's radicand when both describe the same field with
/// different square factors. Throws MixedRadicand for genuinely distinct fields.
inline bool same_field(const QuadSurd& x, const QuadSurd& y) {
  return x.is_rational() || y.is_rational() || x.d() == y.d();
}

inline QuadSurd into_field(const QuadSurd& y, const BigInt& d) {
  // q*sqrt(dy) = q*g/d * sqrt(d) where g = sqrt(d*dy)
  BigInt prod = d * y.d();
  if (!is_perfect_square(prod)) {
    throw error(errc::mixed_radicand,
                "radicands " + d.get_str() + " and " + y.d().get_str() + " differ");
  }
  BigInt g = isqrt(prod);
  return QuadSurd::raw(y.p() * d, y.q() * g, d, y.r() * d);
}

inline std::pair<QuadSurd, QuadSurd> unify(const QuadSurd& x, const QuadSurd& y) {
  if (x.d() <= y.d()) return {x, into_field(y, x.d())};
  return {into_field(x, y.d()), y};
}

}  // namespace detail

inline bool operator==(const QuadSurd& x, const QuadSurd& y) {
  if (x.d_ == y.d_ || x.is_rational() || y.is_rational())
    return x.p_ == y.p_ && x.q_ == y.q_ && x.d_ == y.d_ && x.r_ == y.r_;
  // same value with differently reduced radicands
  BigInt prod = x.d_ * y.d_;
  if (!detail::is_perfect_square(prod)) return false;
  auto [a, b] = detail::unify(x, y);
  return a.p() == b.p() && a.q() == b.q() && a.r() == b.r();
}

inline QuadSurd surd_neg(const QuadSurd& x) { return QuadSurd::raw(-x.p(), -x.q(), x.d(), x.r()); }

inline QuadSurd surd_add(const QuadSurd& x, const QuadSurd& y) {
  if (!detail::same_field(x, y)) {
    auto [a, b] = detail::unify(x, y);
    return surd_add(a, b);
  }
  const BigInt& d = x.is_rational() ? y.d() : x.d();
  return QuadSurd::raw(x.p() * y.r() + y.p() * x.r(), x.q() * y.r() + y.q() * x.r(), d,
                       x.r() * y.r());
}

inline QuadSurd surd_mul(const QuadSurd& x, const QuadSurd& y) {
  if (!detail::same_field(x, y)) {
    auto [a, b] = detail::unify(x, y);
    return surd_mul(a, b);
  }
  const BigInt& d = x.is_rational() ? y.d() : x.d();
  return QuadSurd::raw(x.p() * y.p() + x.q() * y.q() * d, x.p() * y.q() + y.p() * x.q(), d,
                       x.r() * y.r());
}

inline QuadSurd surd_inv(const QuadSurd& x) {
  if (x.is_zero()) throw error(errc::division_by_zero, "inverse of zero");
  BigInt norm = x.p() * x.p() - x.q() * x.q() * x.d();
  return QuadSurd::raw(x.r() * x.p(), -x.r() * x.q(), x.d(), norm);
}

/// Exact three-way comparison; handles distinct radicands by squaring.
inline int surd_cmp(const QuadSurd& x, const QuadSurd& y) {
  const BigInt P = x.p() * y.r() - y.p() * x.r();
  if (detail::same_field(x, y)) {
    const BigInt& d = x.is_rational() ? y.d() : x.d();
    return detail::sign_of(P, x.q() * y.r() - y.q() * x.r(), d);
  }
  // sign of a - b with a = P + Q1*sqrt(d1), b = Q2*sqrt(d2)
  const BigInt Q1 = x.q() * y.r();
  const BigInt Q2 = y.q() * x.r();
  const int sa = detail::sign_of(P, Q1, x.d());
  const int sb = detail::sgn(Q2);
  if (sa != sb) return sa > sb ? 1 : -1;
  if (sa == 0) return 0;
  const int c = detail::sign_of(P * P + Q1 * Q1 * x.d() - Q2 * Q2 * y.d(), 2 * P * Q1, x.d());
  return sa > 0 ? c : -c;
}

/// Greatest integer <= x, by integer square roots only.
inline BigInt surd_floor(const QuadSurd& x) {
  if (x.is_rational()) return detail::floor_div(x.p(), x.r());
  BigInt s = detail::isqrt(x.q() * x.q() * x.d());
  BigInt m = x.q() > 0 ? s : BigInt(-s - 1);
  return detail::floor_div(x.p() + m, x.r());
}

inline QuadSurd operator-(const QuadSurd& x) { return surd_neg(x); }
inline QuadSurd operator+(const QuadSurd& x, const QuadSurd& y) { return surd_add(x, y); }
inline QuadSurd operator-(const QuadSurd& x, const QuadSurd& y) { return surd_add(x, surd_neg(y)); }
inline QuadSurd operator*(const QuadSurd& x, const QuadSurd& y) { return surd_mul(x, y); }
inline QuadSurd operator/(const QuadSurd& x, const QuadSurd& y) { return surd_mul(x, surd_inv(y)); }
inline std::strong_ordering operator<=>(const QuadSurd& x, const QuadSurd& y) {
  const int c = surd_cmp(x, y);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

inline QuadSurd abs(const QuadSurd& x) { return x.sign() < 0 ? surd_neg(x) : x; }

inline std::ostream& operator<<(std::ostream& os, const QuadSurd& x) { return os << x.pretty(); }

namespace detail {

inline BigInt parse_int(std::string s) {
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

}  // namespace detail

/// Parses "(p+q*sqrt(d))/r", "(p-q*sqrt(d))/r", "p/r" or "p".
inline QuadSurd parse_surd(const std::string& text) {
  static const std::regex full(R"(\s*\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(\d+)\s*)");
  static const std::regex ratio(R"(\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, full)) {
    BigInt q = detail::parse_int(m[3].str());
    if (m[2].str() == "-") q = -q;
    return QuadSurd::make(detail::parse_int(m[1].str()), q, detail::parse_int(m[4].str()), detail::parse_int(m[5].str()));
  }
  if (std::regex_match(text, m, ratio)) {
    BigInt den = m[2].matched ? detail::parse_int(m[2].str()) : BigInt(1);
    if (den == 0) throw error(errc::parse_error, "zero denominator in '" + text + "'");
    return QuadSurd::raw(detail::parse_int(m[1].str()), 0, 0, den);
  }
  throw error(errc::parse_error, "not a surd: '" + text + "'");
}

/// Parses a decimal such as "0.295" or "-1.5e-3" exactly.
inline BigRational parse_decimal(const std::string& text) {
  static const std::regex dec(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, dec) || (m[2].length() == 0 && m[3].length() == 0))
    throw error(errc::parse_error, "not a decimal: '" + text + "'");
  std::string digits = m[2].str() + m[3].str();
  long exp10 = -static_cast<long>(m[3].length());
  if (m[4].matched) exp10 += std::stol(m[4].str());
  BigInt num(digits.empty() ? "0" : digits, 10);
  if (m[1].str() == "-") num = -num;
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  BigRational out = exp10 < 0 ? BigRational(num, scale) : BigRational(num * scale, 1);
  out.canonicalize();
  return out;
}

/// Integer 2x2 matrix [[a, b], [c, d]] acting by x -> (a x + b)/(c x + d).
struct IntMatrix2 {
  BigInt a{1}, b{0}, c{0}, d{1};

  static IntMatrix2 identity() { return {}; }
  static IntMatrix2 of(long a, long b, long c, long d) {
    return {BigInt(a), BigInt(b), BigInt(c), BigInt(d)};
  }

  BigInt det() const { return a * d - b * c; }

  /// Inverse of a unimodular matrix.
  IntMatrix2 inverse() const {
    BigInt dt = det();
    if (dt != 1 && dt != -1) throw error(errc::invalid_argument, "matrix is not unimodular");
    return {dt * d, -dt * b, -dt * c, dt * a};
  }

  IntMatrix2 negated() const { return {-a, -b, -c, -d}; }

  /// Representative of {M, -M} whose first nonzero entry is positive.
  IntMatrix2 sign_normalized() const {
    for (const BigInt* e : {&a, &b, &c, &d}) {
      if (*e != 0) return (*e > 0) ? *this : negated();
    }
    return *this;
  }

  bool equal_up_to_sign(const IntMatrix2& o) const { return *this == o || *this == o.negated(); }

  friend bool operator==(const IntMatrix2& x, const IntMatrix2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }

  std::string to_string() const {
    return "[[" + a.get_str() + "," + b.get_str() + "],[" + c.get_str() + "," + d.get_str() + "]]";
  }
};

/// (a x + b)/(c x + d), exact and in the radicand of x.
inline QuadSurd mobius_apply(const IntMatrix2& m, const QuadSurd& x) {
  // numerator (A + B sqrt(d))/r, denominator (C + D sqrt(d))/r
  BigInt A = m.a * x.p() + m.b * x.r();
  BigInt B = m.a * x.q();
  BigInt C = m.c * x.p() + m.d * x.r();
  BigInt D = m.c * x.q();
  if (C == 0 && D == 0) throw error(errc::pole_at_input, m.to_string() + " at " + x.pretty());
  if (x.is_rational()) return QuadSurd::raw(A, 0, 0, C);
  return QuadSurd::raw(A * C - B * D * x.d(), B * C - A * D, x.d(), C * C - D * D * x.d());
}

/// Roots of A x^2 + B x + C = 0, returned as ((-B + sqrt(D))/2A, (-B - sqrt(D))/2A).
/// With A = 0 and B != 0 both entries hold the single rational root.
inline std::pair<QuadSurd, QuadSurd> quadratic_roots(const BigInt& A, const BigInt& B,
                                                     const BigInt& C) {
  if (A == 0) {
    if (B == 0) throw error(errc::degenerate_linear, "A = B = 0");
    QuadSurd root = QuadSurd::raw(-C, 0, 0, B);
    return {root, root};
  }
  BigInt disc = B * B - 4 * A * C;
  if (disc < 0) throw error(errc::negative_discriminant, disc.get_str());
  auto [s, core] = squarefree_split(disc);
  if (core <= 1) {
    // perfect square discriminant (core == 0 only when disc == 0)
    return {QuadSurd::raw(-B + s, 0, 0, 2 * A), QuadSurd::raw(-B - s, 0, 0, 2 * A)};
  }
  return {QuadSurd::raw(-B, s, core, 2 * A), QuadSurd::raw(-B, -s, core, 2 * A)};
}

/// Decimal digits of a multiprecision float, e.g. "0.3867499..." or "2.04e-1".
inline std::string mpf_to_string(const mpf_class& v, int significant) {
  mp_exp_t e = 0;
  std::string digits = v.get_str(e, 10, static_cast<size_t>(significant));
  if (digits.empty() || digits == "0") return "0";
  bool neg = digits[0] == '-';
  if (neg) digits.erase(0, 1);
  while (static_cast<int>(digits.size()) < significant) digits += '0';
  std::string out = neg ? "-" : "";
  out += digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  out += "e" + std::to_string(static_cast<long>(e) - 1);
  return out;
}

inline std::string rational_to_string(const BigRational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace alphacf
