#include <gtest/gtest.h>

#include <random>

#include "alphacf/matching.hpp"

using namespace alphacf;

namespace {

QuadSurd S(long p, long q, long d, long r) { return QuadSurd::make(p, q, d, r); }
QuadSurd R(long p, long q) {
  BigRational r(p, q);
  r.canonicalize();
  return QuadSurd(r);
}

MatchingInterval solve_at(long p, long q, int k1, int k2) { return solve_matching({R(p, q), k1, k2}); }

}  // namespace

TEST(Conditions, Examples) {
  EXPECT_TRUE(check_conditions(R(41, 100), 3, 3).holds);
  EXPECT_TRUE(check_conditions(R(6, 10), 2, 2).holds);
  // the rational 9/20 reaches 0 before step 9; a nearby surd gives a plain failure
  EXPECT_THROW(check_conditions(R(9, 20), 2, 9), error);
  auto rep = check_conditions(R(9, 20) + S(0, 1, 2, 100000), 2, 9);
  EXPECT_FALSE(rep.holds);
  EXPECT_FALSE(rep.matrix_ok);
  EXPECT_TRUE(check_conditions(R(9, 20), 2, 2).holds);
  EXPECT_TRUE(check_conditions(R(7, 10), 2, 1).holds);
}

TEST(Conditions, OrbitHitZero) {
  try {
    check_conditions(R(1, 2), 5, 5);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::orbit_hit_zero);
  }
}

TEST(Exponents, FoundFromMatrices) {
  EXPECT_EQ(find_matching_exponents(R(39, 100), 20), std::make_pair(3, 3));
  EXPECT_EQ(find_matching_exponents(R(7, 10), 20), std::make_pair(2, 1));
  EXPECT_EQ(find_matching_exponents(R(317, 1000), 20), std::make_pair(2, 3));
}

TEST(Scan, Examples) {
  auto at = [](long p, long q) {
    BigRational a(p, q);
    a.canonicalize();
    auto c = scan_candidate(a);
    EXPECT_TRUE(c.has_value());
    return c ? std::make_pair(c->k1, c->k2) : std::make_pair(0, 0);
  };
  EXPECT_EQ(at(7, 10), std::make_pair(2, 1));
  EXPECT_EQ(at(39, 100), std::make_pair(3, 3));
  // 0.45 sits in (sqrt2-1, (sqrt5-1)/2), the (2,2) interval
  EXPECT_EQ(at(45, 100), std::make_pair(2, 2));
  EXPECT_EQ(at(317, 1000), std::make_pair(2, 3));
}

TEST(Solve, TableRows) {
  auto a = solve_at(45, 100, 2, 2);
  EXPECT_EQ(a.interval.lo, S(-1, 1, 2, 1));
  EXPECT_EQ(a.interval.hi, S(-1, 1, 5, 2));
  EXPECT_NEAR(a.size(), 2.04e-1, 0.005e-1);
  auto b = solve_at(39, 100, 3, 3);
  EXPECT_EQ(b.interval.lo, S(-2, 1, 10, 3));
  EXPECT_EQ(b.interval.hi, S(-1, 1, 2, 1));
  EXPECT_NEAR(b.size(), 2.68e-2, 0.005e-2);
  auto c = solve_at(317, 1000, 2, 3);
  EXPECT_EQ(c.interval.lo, S(-3, 1, 13, 2));
  EXPECT_EQ(c.interval.hi, S(-1, 1, 3, 2));
  EXPECT_EQ(c.monotonicity, Monotonicity::Increasing);
  auto d = solve_at(7, 10, 2, 1);
  EXPECT_EQ(d.interval.lo, S(-1, 1, 5, 2));
  EXPECT_EQ(d.interval.hi, QuadSurd(1));
  EXPECT_TRUE(d.interval.hi_closed);
  EXPECT_EQ(d.monotonicity, Monotonicity::Decreasing);
}

TEST(Solve, SeedOutsideIntervalFails) {
  // 0.41 lies below sqrt2 - 1, in the (3,3) interval
  try {
    solve_at(41, 100, 2, 2);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::verification_failed);
  }
}

TEST(Solve, FailsJustOutsideEndpoints) {
  const BigRational step(1, 1000000000);
  for (auto [p, q, k1, k2] : {std::tuple{39, 100, 3, 3}, {317, 1000, 2, 3}, {45, 100, 2, 2}, {1235, 10000, 2, 8}}) {
    auto mi = solve_at(p, q, k1, k2);
    for (const QuadSurd& probe : {mi.interval.lo - QuadSurd(step), mi.interval.hi + QuadSurd(step)}) {
      bool holds = false;
      try {
        holds = check_conditions(probe, k1, k2).holds;
      } catch (const error&) {
      }
      EXPECT_FALSE(holds) << probe.pretty();
    }
    // and holds just inside
    EXPECT_TRUE(check_conditions(mi.interval.lo + QuadSurd(step), k1, k2).holds);
    EXPECT_TRUE(check_conditions(mi.interval.hi - QuadSurd(step), k1, k2).holds);
  }
}

TEST(Cylinder, Examples) {
  // single step (2,+) for alpha: 1/alpha - 2 in [alpha - 1, alpha)
  Interval c = cylinder_interval({{2, 1}}, Side::Alpha);
  EXPECT_EQ(c.lo, S(-1, 1, 2, 1));
  EXPECT_EQ(c.hi, S(-1, 1, 5, 2));
  Interval g = cylinder_interval({{1, 1}}, Side::Alpha);
  EXPECT_EQ(g.lo, S(-1, 1, 5, 2));
  EXPECT_EQ(g.hi, QuadSurd(1));
  EXPECT_TRUE(g.hi_closed);
  // ((2,-),(3,-))^2 for alpha - 1 has left endpoint (sqrt3 - 1)/2
  Coding cb{{2, -1}, {3, -1}, {2, -1}, {3, -1}};
  auto comps = cylinder_components(cb, Side::AlphaMinusOne);
  ASSERT_FALSE(comps.empty());
  bool found = false;
  for (auto& iv : comps) found = found || iv.lo == S(-1, 1, 3, 2);
  EXPECT_TRUE(found);
  EXPECT_THROW(cylinder_interval({{1, -1}}, Side::Alpha, R(1, 2)), error);
}

TEST(Cylinder, ComponentsAgreeWithMembership) {
  Coding c{{3, 1}, {4, -1}, {2, -1}};
  auto comps = cylinder_components(c, Side::Alpha);
  for (long i = 1; i < 2000; ++i) {
    QuadSurd a = R(i, 2000);
    bool inside = false;
    for (auto& iv : comps) inside = inside || iv.contains(a);
    ASSERT_EQ(inside, in_cylinder(c, Side::Alpha, a)) << i;
  }
}

TEST(Star, Examples) {
  EXPECT_EQ(star_transform({3, 4, 2}), (CFString{2, 3, 2, 3}));
  EXPECT_EQ(star_transform({3, 4, 4, 2}), (CFString{2, 3, 2, 3, 2, 3}));
  EXPECT_EQ(star_transform({2}), (CFString{2}));
  EXPECT_EQ(star_transform({2, 3, 2, 3}), (CFString{3, 4, 2}));
  try {
    star_transform({3, 1});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::quotient_below_two);
  }
}

TEST(Star, InvolutionOnRandomStrings) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<std::uint64_t> q(2, 6);
  for (int i = 0; i < 500; ++i) {
    CFString a(len(rng));
    for (auto& v : a) v = q(rng);
    ASSERT_EQ(star_transform(star_transform(a)), a);
  }
}

TEST(KRule, Examples) {
  EXPECT_EQ(k_from_label({2}, EndpointSide::Left), std::make_pair(2, 2));
  EXPECT_EQ(k_from_label({2, 1, 1}, EndpointSide::Left), std::make_pair(3, 3));
  EXPECT_EQ(k_from_label({1}, EndpointSide::Left), std::make_pair(2, 1));
  EXPECT_EQ(k_from_label({1, 1}, EndpointSide::Right), std::make_pair(2, 2));
  EXPECT_EQ(k_from_label({2, 2}, EndpointSide::Right), std::make_pair(3, 3));
}

TEST(Words, Examples) {
  EXPECT_TRUE(word_normal_form(GroupWord().s().s()).empty());
  EXPECT_EQ(word_normal_form(GroupWord().v().t(1).v()), word_normal_form(GroupWord().t(-1)));
  EXPECT_EQ(word_normal_form(GroupWord().v().t(1).v()).to_string(), "T^-1");
  EXPECT_TRUE(word_normal_form(GroupWord().s().t(1).s().t(1).s().t(1)).empty());
  EXPECT_EQ(word_normal_form(GroupWord().v().s().v()), word_normal_form(GroupWord().s()));
}

TEST(Words, NormalFormAgreesWithMatrices) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> kind(0, 2), len(0, 12);
  std::uniform_int_distribution<long> e(-3, 3);
  std::vector<GroupWord> words;
  for (int i = 0; i < 400; ++i) {
    GroupWord w;
    for (int j = len(rng); j > 0; --j) {
      int k = kind(rng);
      if (k == 0) w.s();
      else if (k == 1) w.t(e(rng));
      else w.v();
    }
    words.push_back(w);
    ASSERT_TRUE(evaluate(word_normal_form(w)).equal_up_to_sign(evaluate(w))) << w.to_string();
  }
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j)
      ASSERT_EQ(words_equal(words[i], words[j]), evaluate(words[i]).equal_up_to_sign(evaluate(words[j])));
}

TEST(Algebraic, Examples) {
  EXPECT_TRUE(verify_algebraic_matching({3, 4, 2}, star_transform({3, 4, 2})));
  EXPECT_FALSE(verify_algebraic_matching({3, 4, 2}, {2, 3, 3, 2}));
  EXPECT_TRUE(verify_algebraic_matching({2}, {2}));
}

TEST(Algebraic, AgreesWithMatrixCondition) {
  for (auto [p, q, k1, k2] : {std::tuple{39, 100, 3, 3}, {317, 1000, 2, 3}, {1235, 10000, 2, 8}, {7, 20, 2, 3}}) {
    auto rep = check_conditions(R(p, q), k1, k2);
    ASSERT_TRUE(rep.holds);
    CFString a, b;
    for (auto& d : rep.coding_alpha) a.push_back(d.a);
    for (auto& d : rep.coding_alpham1) b.push_back(d.a);
    if (*std::min_element(a.begin(), a.end()) < 2) continue;
    EXPECT_TRUE(verify_algebraic_matching(a, b));
    EXPECT_EQ(star_transform(a), b);
    EXPECT_TRUE(sign_structure_ok(rep.coding_alpha, rep.coding_alpham1));
    EXPECT_EQ(rep.eps_last * rep.eta_last, -1);
  }
}

TEST(Sqrt3Family, IntervalsAndAsymptotics) {
  const QuadSurd limit = S(-1, 1, 3, 2);
  std::optional<Interval> prev;
  for (int n = 1; n <= 4; ++n) {
    auto mi = sqrt3_family(n);
    EXPECT_EQ(mi.k1, n + 3);
    EXPECT_EQ(mi.k2, 2 * n + 3);
    EXPECT_GT(surd_cmp(mi.interval.lo, limit), 0);
    if (prev) EXPECT_LE(surd_cmp(mi.interval.hi, prev->lo), 0);
    auto asym = sqrt3_asymptotics(n);
    const double decay4 = std::pow(2 + std::sqrt(3.0), 4.0 * n);
    mpf_class dlo = mi.interval.lo.to_mpf(256) - asym.lo, dhi = mi.interval.hi.to_mpf(256) - asym.hi;
    EXPECT_LT(std::fabs(dlo.get_d()) * decay4, 50.0);
    EXPECT_LT(std::fabs(dhi.get_d()) * decay4, 50.0);
    prev = mi.interval;
  }
}

TEST(Envelope, Bound) {
  EXPECT_NEAR(envelope_bound(2, 2, 1.0), 8.4423 * std::exp(-0.9624 * 4), 1e-12);
  EXPECT_GT(solve_at(39, 100, 3, 3).size(), envelope_bound(3, 3));
}
