#pragma once

// Matching intervals: conditions (I) and (II'), exact cylinder solving,
// candidate scanning, the star transform, the k-from-label rule, algebraic
// matching in PGL(2,Z) and the family accumulating at (sqrt(3)-1)/2.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alphacf/alphamap.hpp"
#include "alphacf/cfrac.hpp"
#include "alphacf/group_word.hpp"

namespace alphacf {

enum class Side { Alpha, AlphaMinusOne };
enum class EndpointSide { Left, Right };
enum class Monotonicity { Increasing, Constant, Decreasing };

inline std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "Increasing";
    case Monotonicity::Constant: return "Constant";
    case Monotonicity::Decreasing: return "Decreasing";
  }
  return "";
}

inline Monotonicity classify(int k1, int k2) {
  if (k1 < k2) return Monotonicity::Increasing;
  if (k1 == k2) return Monotonicity::Constant;
  return Monotonicity::Decreasing;
}

struct MatchingCandidate {
  QuadSurd seed;
  int k1 = 1;
  int k2 = 1;
};

struct ConditionReport {
  bool holds = false;
  bool orbits_disjoint = false;
  bool matrix_ok = false;
  Coding coding_alpha;    // steps 1..k1-1 of alpha
  Coding coding_alpham1;  // steps 1..k2-1 of alpha - 1
  int eps_last = 0;       // sign of T^{k1-1}(alpha)
  int eta_last = 0;       // sign of T^{k2-1}(alpha - 1)
};

struct MatchingInterval {
  Interval interval;
  int k1 = 0;
  int k2 = 0;
  Coding coding_alpha;
  Coding coding_alpham1;
  Monotonicity monotonicity = Monotonicity::Constant;
  CFString label_lo;
  CFString label_hi;

  double size() const { return interval.length(); }
};

inline const IntMatrix2& translation_matrix() {
  static const IntMatrix2 t = IntMatrix2::of(1, 1, 0, 1);
  return t;
}

namespace detail {

inline OrbitRecord nonzero_orbit(const AlphaParam& a, const QuadSurd& x0, int k) {
  OrbitRecord orb = expand(a, x0, static_cast<std::size_t>(k - 1));
  if (static_cast<int>(orb.points.size()) < k) throw error(errc::orbit_hit_zero, "at alpha = " + a.value.pretty());
  for (int i = 0; i < k; ++i)
    if (orb.points[i].is_zero()) throw error(errc::orbit_hit_zero, "at alpha = " + a.value.pretty());
  return orb;
}

// right-hand side of (II'): T * M2 * [[1,0],[-1,-1]]
inline IntMatrix2 matched_form(const IntMatrix2& m2) {
  return translation_matrix() * m2 * IntMatrix2::of(1, 0, -1, -1);
}

}  // namespace detail

/// Conditions (I) and (II') at an exact alpha for given exponents.
inline ConditionReport check_conditions(const QuadSurd& alpha, int k1, int k2) {
  if (k1 < 1 || k2 < 1) throw error(errc::invalid_argument, "k1, k2 must be >= 1");
  AlphaParam a(alpha);
  OrbitRecord xa = detail::nonzero_orbit(a, alpha, k1);
  OrbitRecord xb = detail::nonzero_orbit(a, alpha - QuadSurd(1), k2);

  ConditionReport rep;
  rep.coding_alpha = xa.digits;
  rep.coding_alpham1 = xb.digits;
  rep.eps_last = xa.points[k1 - 1].sign();
  rep.eta_last = xb.points[k2 - 1].sign();

  const IntMatrix2 m1 = orbit_matrix(xa.digits);
  rep.matrix_ok = m1.equal_up_to_sign(detail::matched_form(orbit_matrix(xb.digits)));

  rep.orbits_disjoint = true;
  for (int i = 0; i < k1 && rep.orbits_disjoint; ++i)
    for (int j = 0; j < k2; ++j)
      if (xa.points[i] == xb.points[j]) {
        rep.orbits_disjoint = false;
        break;
      }
  rep.holds = rep.matrix_ok && rep.orbits_disjoint;

  if (rep.matrix_ok) {
    QuadSurd sum = surd_inv(xa.points[k1 - 1]) + surd_inv(xb.points[k2 - 1]);
    if (!(sum == QuadSurd(-1)))
      throw error(errc::verification_failed, "1/x + 1/y != -1 at alpha = " + alpha.pretty());
  }
  return rep;
}

/// Smallest (k1 + k2, then k1) with (I) and (II') at an exact alpha, found by
/// matching sign-normalized orbit matrices; none if the orbit reaches 0 first.
inline std::optional<std::pair<int, int>> find_matching_exponents(const QuadSurd& alpha, int kmax) {
  AlphaParam a(alpha);
  OrbitRecord xa = expand(a, alpha, static_cast<std::size_t>(kmax - 1));
  OrbitRecord xb = expand(a, alpha - QuadSurd(1), static_cast<std::size_t>(kmax - 1));
  auto usable = [](const OrbitRecord& o) {
    int n = 0;
    while (n < static_cast<int>(o.points.size()) && !o.points[n].is_zero()) ++n;
    return n;  // orbit points 0..n-1 are nonzero
  };
  const int na = usable(xa), nb = usable(xb);

  std::unordered_map<std::string, std::vector<int>> rhs;
  IntMatrix2 m2;
  for (int j = 0; j < nb; ++j) {
    if (j > 0) m2 = m2 * digit_matrix(xb.digits[j - 1]);
    rhs[detail::matched_form(m2).sign_normalized().to_string()].push_back(j + 1);
  }
  std::optional<std::pair<int, int>> best;
  IntMatrix2 m1;
  for (int i = 0; i < na; ++i) {
    if (i > 0) m1 = m1 * digit_matrix(xa.digits[i - 1]);
    auto it = rhs.find(m1.sign_normalized().to_string());
    if (it == rhs.end()) continue;
    for (int k2 : it->second) {
      const int k1 = i + 1;
      if (best && (k1 + k2 > best->first + best->second ||
                   (k1 + k2 == best->first + best->second && k1 >= best->first)))
        continue;
      bool disjoint = true;
      for (int p = 0; p < k1 && disjoint; ++p)
        for (int q = 0; q < k2; ++q)
          if (xa.points[p] == xb.points[q]) {
            disjoint = false;
            break;
          }
      if (disjoint) best = std::make_pair(k1, k2);
    }
  }
  return best;
}

/// Float-orbit search for T^k1(alpha) ~ T^k2(alpha - 1); orbits are run in
/// 320-bit floating point since errors grow like the square of the denominators.
inline std::optional<MatchingCandidate> scan_candidate(const BigRational& alpha, int kmax = 40,
                                                       double tol = 1e-10) {
  if (alpha <= 0 || alpha >= 1) throw error(errc::out_of_domain, "scan expects 0 < alpha < 1");
  if (kmax < 1 || kmax > 64) throw error(errc::invalid_argument, "kmax must be in 1..64");
  constexpr unsigned long prec = 320;
  const mpf_class a(alpha, prec);
  const mpf_class zero_cut("1e-60", prec);
  auto orbit = [&](mpf_class x) {
    std::vector<mpf_class> pts;
    pts.push_back(x);
    for (int i = 0; i < kmax; ++i) {
      if (abs(x) < zero_cut) {
        x = 0;
      } else {
        mpf_class inv(1, prec);
        inv /= abs(x);
        mpf_class t(inv + 1 - a, prec);
        x = inv - floor(t);
      }
      pts.push_back(x);
    }
    return pts;
  };
  const auto xs = orbit(a);
  const auto ys = orbit(mpf_class(a - 1, prec));
  const mpf_class eps(tol, prec);
  for (int t = 2; t <= 2 * kmax; ++t) {
    for (int k1 = std::max(1, t - kmax); k1 <= std::min(kmax, t - 1); ++k1) {
      const int k2 = t - k1;
      mpf_class diff(xs[k1] - ys[k2], prec);
      if (abs(diff) < eps) return MatchingCandidate{QuadSurd(alpha), k1, k2};
    }
  }
  return std::nullopt;
}

/// Whether the orbit of alpha (or alpha - 1) follows `coding` exactly.
inline bool in_cylinder(const Coding& coding, Side side, const QuadSurd& alpha) {
  if (alpha.sign() <= 0 || surd_cmp(alpha, QuadSurd(1)) > 0) return false;
  const QuadSurd lower = alpha - QuadSurd(1);
  QuadSurd x = side == Side::Alpha ? alpha : lower;
  for (const Digit& d : coding) {
    if (x.sign() != d.eps) return false;
    x = surd_inv(d.eps > 0 ? x : surd_neg(x)) - QuadSurd(BigInt(d.a));
    if (surd_cmp(x, lower) < 0 || surd_cmp(x, alpha) >= 0) return false;
  }
  return true;
}

/// Sorted distinct parameter values in (0, 1) where membership in the cylinder
/// can change, framed by 0 and 1.
inline std::vector<QuadSurd> cylinder_boundaries(const Coding& coding, Side side) {
  const BigInt s = side == Side::Alpha ? BigInt(0) : BigInt(-1);
  std::vector<QuadSurd> roots;
  auto keep = [&](const QuadSurd& r) {
    if (r.sign() > 0 && surd_cmp(r, QuadSurd(1)) < 0) roots.push_back(r);
  };
  auto add_quadratic = [&](const BigInt& A, const BigInt& B, const BigInt& C) {
    if (A == 0 && B == 0) return;
    const BigInt disc = B * B - 4 * A * C;
    if (A != 0 && disc < 0) return;
    auto [r1, r2] = quadratic_roots(A, B, C);
    keep(r1);
    if (!(r2 == r1)) keep(r2);
  };
  IntMatrix2 prev_inv;  // inverse of M_{j-1}
  IntMatrix2 m;
  for (const Digit& d : coding) {
    m = m * digit_matrix(d);
    const IntMatrix2 inv = m.inverse();
    const BigInt& A = inv.a;
    const BigInt Bp = inv.a * s + inv.b;
    const BigInt& C = inv.c;
    const BigInt Dp = inv.c * s + inv.d;
    add_quadratic(C, Dp - A, -Bp);          // T^j = alpha
    add_quadratic(C, Dp - C - A, -Dp - Bp);  // T^j = alpha - 1
    add_quadratic(0, A, Bp);                 // T^j = 0
    add_quadratic(0, C, Dp);                 // pole
    // T^{j-1} = 0
    add_quadratic(0, prev_inv.a, prev_inv.a * s + prev_inv.b);
    prev_inv = inv;
  }
  std::sort(roots.begin(), roots.end(), [](const QuadSurd& x, const QuadSurd& y) { return surd_cmp(x, y) < 0; });
  std::vector<QuadSurd> out;
  out.emplace_back(0);
  for (auto& r : roots)
    if (!(r == out.back())) out.push_back(std::move(r));
  out.emplace_back(1);
  return out;
}

namespace detail {

struct CylinderCells {
  const Coding& coding;
  Side side;
  std::vector<QuadSurd> pts;

  bool cell_ok(std::size_t i) const {
    return in_cylinder(coding, side, QuadSurd(pseudocenter(Interval(pts[i], pts[i + 1]))));
  }
  bool point_ok(std::size_t i) const { return i > 0 && in_cylinder(coding, side, pts[i]); }

  // maximal run of valid cells and joints around cell i
  Interval component(std::size_t i, std::size_t* last_cell = nullptr) const {
    std::size_t l = i, r = i + 1;
    while (l > 0 && point_ok(l) && cell_ok(l - 1)) --l;
    while (r + 1 < pts.size() && point_ok(r) && cell_ok(r)) ++r;
    if (last_cell) *last_cell = r - 1;
    return Interval(pts[l], pts[r], point_ok(l), point_ok(r));
  }
};

}  // namespace detail

/// Connected pieces of the set of alpha in (0, 1] realizing `coding`.
inline std::vector<Interval> cylinder_components(const Coding& coding, Side side) {
  if (coding.empty()) return {Interval(QuadSurd(0), QuadSurd(1), false, true)};
  detail::CylinderCells cells{coding, side, cylinder_boundaries(coding, side)};
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cells.pts.size(); ++i) {
    if (!cells.cell_ok(i)) continue;
    std::size_t last = i;
    out.push_back(cells.component(i, &last));
    i = last;
  }
  return out;
}

/// The cylinder component containing `seed`, or the unique component when no
/// seed is given.
inline Interval cylinder_interval(const Coding& coding, Side side,
                                  const std::optional<QuadSurd>& seed = std::nullopt) {
  if (coding.empty()) return Interval(QuadSurd(0), QuadSurd(1), false, true);
  if (!seed) {
    auto comps = cylinder_components(coding, side);
    if (comps.empty()) throw error(errc::empty_cylinder, format_coding(coding));
    if (comps.size() > 1) throw error(errc::invalid_argument, "cylinder is disconnected; a seed is required");
    return comps.front();
  }
  detail::CylinderCells cells{coding, side, cylinder_boundaries(coding, side)};
  auto above = std::upper_bound(cells.pts.begin(), cells.pts.end(), *seed,
                                [](const QuadSurd& x, const QuadSurd& y) { return surd_cmp(x, y) < 0; });
  if (above == cells.pts.begin() || above == cells.pts.end())
    throw error(errc::empty_cylinder, "seed outside (0, 1)");
  const std::size_t i = static_cast<std::size_t>(above - cells.pts.begin()) - 1;
  if (cells.pts[i] == *seed) throw error(errc::invalid_argument, "seed lies on a cylinder boundary");
  if (!cells.cell_ok(i)) throw error(errc::empty_cylinder, format_coding(coding) + " does not contain the seed");
  return cells.component(i);
}

namespace detail {

inline QuadSurd interior_probe(const Interval& iv) {
  // irrational whenever lo is, so the orbit cannot reach 0
  return (iv.lo + QuadSurd(pseudocenter(iv))) / QuadSurd(2);
}

}  // namespace detail

/// Exact matching interval through a verified candidate.
inline MatchingInterval solve_matching(const MatchingCandidate& c) {
  ConditionReport rep = check_conditions(c.seed, c.k1, c.k2);
  if (!rep.holds)
    throw error(errc::verification_failed, "conditions fail at seed " + c.seed.pretty() + " for (" +
                                               std::to_string(c.k1) + "," + std::to_string(c.k2) + ")");
  const Interval ca = cylinder_interval(rep.coding_alpha, Side::Alpha, c.seed);
  const Interval cb = cylinder_interval(rep.coding_alpham1, Side::AlphaMinusOne, c.seed);

  const int lc = surd_cmp(ca.lo, cb.lo), hc = surd_cmp(ca.hi, cb.hi);
  const QuadSurd& lo = lc >= 0 ? ca.lo : cb.lo;
  const QuadSurd& hi = hc <= 0 ? ca.hi : cb.hi;
  const bool hi_closed = hi == QuadSurd(1) && (hc < 0 ? ca.hi_closed : hc > 0 ? cb.hi_closed : ca.hi_closed && cb.hi_closed);

  MatchingInterval mi;
  mi.interval = Interval(lo, hi, false, hi_closed);
  mi.k1 = c.k1;
  mi.k2 = c.k2;
  mi.coding_alpha = rep.coding_alpha;
  mi.coding_alpham1 = rep.coding_alpham1;
  mi.monotonicity = classify(c.k1, c.k2);

  const QuadSurd probe = detail::interior_probe(mi.interval);
  ConditionReport chk = check_conditions(probe, c.k1, c.k2);
  if (!chk.holds || chk.coding_alpha != rep.coding_alpha || chk.coding_alpham1 != rep.coding_alpham1)
    throw error(errc::verification_failed, "interior probe " + probe.pretty() + " of " + mi.interval.to_string());
  return mi;
}

/// Coding of alpha - 1 predicted from the coding of alpha (quotients >= 2).
inline CFString star_transform(const CFString& a) {
  for (auto v : a)
    if (v < 2) throw error(errc::quotient_below_two, format_label(a));
  // unary: each quotient becomes (a - 2) marks, quotients separated by a star
  std::vector<bool> marks;  // true = number unit, false = star
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) marks.push_back(false);
    marks.insert(marks.end(), a[i] - 2, true);
  }
  CFString out;
  std::uint64_t run = 0;
  for (bool m : marks) {
    if (m) {  // becomes a star: closes a number
      out.push_back(run + 2);
      run = 0;
    } else {
      ++run;
    }
  }
  out.push_back(run + 2);
  return out;
}

/// Matching exponents read off an endpoint label (positions counted from 1).
inline std::pair<int, int> k_from_label(const CFString& s, EndpointSide side) {
  std::uint64_t odd = 0, even = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (i % 2 == 0 ? odd : even) += s[i];
  if (side == EndpointSide::Left) return {static_cast<int>(2 + even), static_cast<int>(odd)};
  return {static_cast<int>(1 + even), static_cast<int>(1 + odd)};
}

/// T^-1 S T^-a_m S ... T^-a_1 S V  ==  V S T^-b_l S ... T^-b_1 S T^-1 in PGL(2,Z).
inline bool verify_algebraic_matching(const CFString& a, const CFString& b) {
  GroupWord lhs, rhs;
  lhs.t(-1).s();
  for (std::size_t i = a.size(); i-- > 0;) lhs.t(-static_cast<long>(a[i])).s();
  lhs.v();
  rhs.v().s();
  for (std::size_t i = b.size(); i-- > 0;) rhs.t(-static_cast<long>(b[i])).s();
  rhs.t(-1);
  return words_equal(lhs, rhs);
}

/// (3,+),(4,-)^n,(2,-) for alpha against ((2,-),(3,-))^(n+1) for alpha - 1.
inline MatchingInterval sqrt3_family(int n) {
  if (n < 1) throw error(errc::invalid_argument, "n must be >= 1");
  Coding ca{{3, 1}};
  ca.insert(ca.end(), static_cast<std::size_t>(n), Digit{4, -1});
  ca.push_back({2, -1});
  Coding cb;
  for (int i = 0; i <= n; ++i) {
    cb.push_back({2, -1});
    cb.push_back({3, -1});
  }
  const int k1 = n + 3, k2 = 2 * n + 3;
  std::optional<MatchingInterval> found;
  for (const Interval& x : cylinder_components(ca, Side::Alpha)) {
    for (const Interval& y : cylinder_components(cb, Side::AlphaMinusOne)) {
      const QuadSurd& lo = surd_cmp(x.lo, y.lo) >= 0 ? x.lo : y.lo;
      const QuadSurd& hi = surd_cmp(x.hi, y.hi) <= 0 ? x.hi : y.hi;
      if (surd_cmp(lo, hi) >= 0) continue;
      if (found) throw error(errc::verification_failed, "several intersections for n = " + std::to_string(n));
      MatchingInterval mi;
      mi.interval = Interval(lo, hi);
      mi.k1 = k1;
      mi.k2 = k2;
      mi.coding_alpha = ca;
      mi.coding_alpham1 = cb;
      mi.monotonicity = classify(k1, k2);
      found = mi;
    }
  }
  if (!found) throw error(errc::empty_cylinder, "no intersection for n = " + std::to_string(n));
  ConditionReport rep = check_conditions(detail::interior_probe(found->interval), k1, k2);
  if (!rep.holds || rep.coding_alpha != ca || rep.coding_alpham1 != cb)
    throw error(errc::verification_failed, "family member n = " + std::to_string(n));
  return *found;
}

/// Leading-order terms of the family: left endpoint, right endpoint, length.
struct Sqrt3Asymptotics {
  mpf_class lo, hi, length;
};

inline Sqrt3Asymptotics sqrt3_asymptotics(int n, unsigned long bits = 256) {
  const mpf_class s3 = sqrt(mpf_class(3, bits));
  mpf_class lam(2, bits);
  lam += s3;
  mpf_class decay(1, bits);
  for (int i = 0; i < 2 * n; ++i) decay /= lam;
  const mpf_class base = (s3 - 1) / 2;
  Sqrt3Asymptotics out{mpf_class(0, bits), mpf_class(0, bits), mpf_class(0, bits)};
  out.lo = base + (40 * s3 - 69) / 13 * decay;
  out.hi = base + (33 - 19 * s3) / 2 * decay;
  out.length = (567 - 327 * s3) / 26 * decay;
  return out;
}

/// eps_1 = +1, eps_i = -1 (2 <= i <= k1-1), eta_i = -1 (1 <= i <= k2-1).
inline bool sign_structure_ok(const Coding& coding_alpha, const Coding& coding_alpham1) {
  for (std::size_t i = 0; i < coding_alpha.size(); ++i)
    if (coding_alpha[i].eps != (i == 0 ? 1 : -1)) return false;
  for (const Digit& d : coding_alpham1)
    if (d.eps != -1) return false;
  return true;
}

inline constexpr double envelope_c0 = 8.4423;
inline constexpr double envelope_c1 = 0.9624;

inline double envelope_bound(int k1, int k2, double slack = 0.95) {
  return slack * envelope_c0 * std::exp(-envelope_c1 * (k1 + k2));
}

}  // namespace alphacf
