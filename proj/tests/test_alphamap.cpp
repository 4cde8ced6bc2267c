#include <gtest/gtest.h>

#include <random>

#include "alphacf/alphamap.hpp"
#include "alphacf/cfrac.hpp"

using namespace alphacf;

namespace {

BigRational Q(long p, long q) {
  BigRational r(p, q);
  r.canonicalize();
  return r;
}

AlphaParam A(long p, long q) { return AlphaParam(QuadSurd(Q(p, q))); }

}  // namespace

TEST(Step, Examples) {
  auto [x1, d1] = t_alpha_step(A(1, 2), QuadSurd(Q(3, 10)));
  EXPECT_EQ(x1, QuadSurd(Q(1, 3)));
  EXPECT_EQ(d1, (Digit{3, 1}));
  auto [x2, d2] = t_alpha_step(A(1, 1), QuadSurd(Q(2, 7)));
  EXPECT_EQ(x2, QuadSurd(Q(1, 2)));
  EXPECT_EQ(d2, (Digit{3, 1}));
  auto [x3, d3] = t_alpha_step(A(2, 5), QuadSurd(Q(2, 5)));
  EXPECT_EQ(x3, QuadSurd(Q(-1, 2)));
  EXPECT_EQ(d3, (Digit{3, 1}));
  auto [x4, d4] = t_alpha_step(A(2, 5), QuadSurd(0));
  EXPECT_TRUE(x4.is_zero());
  EXPECT_TRUE(d4.is_zero());
  try {
    t_alpha_step(A(1, 2), QuadSurd(Q(3, 5)));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::out_of_domain);
  }
}

TEST(Expand, Examples) {
  auto orb = expand(A(1, 2), QuadSurd(Q(3, 10)), 2);
  EXPECT_EQ(orb.digits, (Coding{{3, 1}, {3, 1}}));
  EXPECT_TRUE(expand(A(1, 2), QuadSurd(0), 5).digits.empty());
  auto f = expand_float(0.39, 0.39, 2);
  EXPECT_EQ(f.digits, (Coding{{3, 1}, {2, -1}}));
  auto e = expand(AlphaParam(QuadSurd(Q(39, 100))), QuadSurd(Q(39, 100)), 2);
  EXPECT_EQ(e.digits, f.digits);
}

TEST(Convergents, Examples) {
  auto c = convergents({{3, 1}});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], Q(0, 1));
  EXPECT_EQ(c[1], Q(1, 3));
  auto c2 = convergents({{3, 1}, {2, -1}});
  EXPECT_EQ(c2[2], Q(2, 5));
  EXPECT_EQ(convergents({}).front(), Q(0, 1));
}

TEST(OrbitMatrix, Examples) {
  EXPECT_EQ(orbit_matrix({{3, 1}}), IntMatrix2::of(0, 1, 1, 3));
  EXPECT_EQ(orbit_matrix({}), IntMatrix2::identity());
  EXPECT_EQ(orbit_matrix({{3, 1}, {2, -1}}), IntMatrix2::of(0, 1, 1, 3) * IntMatrix2::of(0, -1, 1, 2));
}

TEST(Orbit, DomainInvarianceAndMatrixIdentity) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> den(2, 400);
  for (int i = 0; i < 1000; ++i) {
    long qa = den(rng);
    std::uniform_int_distribution<long> na(1, qa);
    AlphaParam a(QuadSurd(Q(na(rng), qa)));
    // irrational start so the orbit does not stop at 0
    QuadSurd x = a.value - QuadSurd(Q(1, 2)) + QuadSurd::make(0, 1, 2, 7 + i % 5) - QuadSurd(Q(1, 5));
    if (surd_cmp(x, a.value - QuadSurd(1)) < 0 || surd_cmp(x, a.value) >= 0) continue;
    auto orb = expand(a, x, 20);
    for (const auto& p : orb.points) {
      ASSERT_GE(surd_cmp(p, a.value - QuadSurd(1)), 0);
      ASSERT_LE(surd_cmp(p, a.value), 0);
    }
    for (std::size_t n = 1; n < orb.points.size(); ++n) {
      Coding prefix(orb.digits.begin(), orb.digits.begin() + static_cast<long>(n));
      IntMatrix2 m = orbit_matrix(prefix);
      ASSERT_EQ(mobius_apply(m.inverse(), x), orb.points[n]);
      auto pq = convergent_pairs(prefix);
      // columns are (p_{n-1}, q_{n-1}) and (p_n, q_n)
      ASSERT_EQ(m.a, pq[n - 1].first);
      ASSERT_EQ(m.c, pq[n - 1].second);
      ASSERT_EQ(m.b, pq[n].first);
      ASSERT_EQ(m.d, pq[n].second);
      ASSERT_GT(pq[n].second, 0);
    }
  }
}

TEST(Orbit, GaussMapCase) {
  // alpha = 1 gives the regular continued fraction
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> den(2, 5000);
  for (int i = 0; i < 300; ++i) {
    long q = den(rng);
    std::uniform_int_distribution<long> num(1, q - 1);
    BigRational x = Q(num(rng), q);
    auto orb = expand(A(1, 1), QuadSurd(x), 100);
    CFString quotients;
    for (auto& d : orb.digits) {
      if (d.is_zero()) break;
      ASSERT_EQ(d.eps, 1);
      quotients.push_back(d.a);
    }
    ASSERT_EQ(quotients, cf_of_rational(x));
  }
}

TEST(Text, CodingRunLength) {
  Coding c{{3, 1}, {4, -1}, {4, -1}, {2, -1}};
  EXPECT_EQ(format_coding(c), "(3,+)(4,-)^2(2,-)");
  EXPECT_EQ(parse_coding("(3,+)(4,-)^2(2,-)"), c);
  EXPECT_THROW(parse_coding("(3,+)x"), error);
}
