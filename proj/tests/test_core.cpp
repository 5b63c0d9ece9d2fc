#include "kuranishi/fixtures.hpp"

#include <gtest/gtest.h>

using namespace kuranishi;

TEST(Polynomial, ParseArithmeticAndDerivative) {
  Polynomial p = Polynomial::parse("x1^3 - 1/4*x1 + 2*x1*x2", 2);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(p.derivative(0), Polynomial::parse("3*x1^2 - 1/4 + 2*x2", 2));
  EXPECT_EQ(p.derivative(1), Polynomial::parse("2*x1", 2));
  EXPECT_EQ((p - p).is_zero(), true);
  EXPECT_EQ(p.eval_exact({Rational(1, 2), Rational(0)}), Rational(0));
  Polynomial q = Polynomial::parse("x1 + x2", 2);
  EXPECT_EQ((q * q), Polynomial::parse("x1^2 + 2*x1*x2 + x2^2", 2));
  EXPECT_EQ(q.pow(2), q * q);
}

TEST(Polynomial, SubstituteIsComposition) {
  Polynomial p = Polynomial::parse("x1^2 - x2", 2);
  std::vector<Polynomial> vals{Polynomial::parse("x1 + 1", 1), Polynomial::parse("2*x1", 1)};
  Polynomial c = p.substitute(vals);
  EXPECT_EQ(c, Polynomial::parse("x1^2 + 1", 1));
  for (double t : {-1.5, 0.0, 0.25, 3.0}) {
    Vec x(2);
    x << t + 1, 2 * t;
    EXPECT_DOUBLE_EQ(c.eval(Vec::Constant(1, t)), p.eval(x));
  }
}

TEST(Polynomial, StringRoundTrip) {
  for (const char* s : {"x1^4 - x1^2", "2*x1*x2 - 1/3", "0", "x2"}) {
    Polynomial p = Polynomial::parse(s, 2);
    EXPECT_EQ(Polynomial::parse(p.to_string(), 2), p) << s;
  }
}

TEST(RationalMatrix, RankAnnihilatorAndLeftInverse) {
  RationalMatrix E(3, 2);
  E(0, 0) = 1;
  E(1, 0) = 1;
  E(2, 1) = Rational(1, 3);
  EXPECT_EQ(E.rank(), 2);
  RationalMatrix Q = E.annihilator();
  EXPECT_EQ(Q.rows(), 1);
  EXPECT_TRUE((Q * E).is_zero());
  EXPECT_EQ(E.left_inverse() * E, RationalMatrix::identity(2));
  RationalMatrix D = E.hconcat(E.columns(0, 1));
  EXPECT_EQ(D.rank(), 2);
  EXPECT_EQ(intersection_dim(E, E.columns(1, 1)), 1);
}

TEST(Domain, BoxContainmentIsOpen) {
  Box b({Rational(0)}, {Rational(1)});
  EXPECT_TRUE(b.contains(Vec::Constant(1, 0.5)));
  EXPECT_FALSE(b.contains(Vec::Constant(1, 0.0)));
  EXPECT_FALSE(b.contains(Vec::Constant(1, 1.0)));
  EXPECT_DOUBLE_EQ(b.inner_depth(Vec::Constant(1, 0.25)), 0.25);
  EXPECT_DOUBLE_EQ(b.distance(Vec::Constant(1, 1.5)), 0.5);
}

TEST(Domain, PullbackThroughInclusion) {
  Domain U = Domain::box(Box({Rational(-2)}, {Rational(2)}));
  Domain T = Domain::box(Box({Rational(0), Rational(-1)}, {Rational(1), Rational(1)}));
  SmoothMap phi = SmoothMap::parse({"x1", "0"}, 1);
  Domain P = U.pullback_within(phi, T);
  EXPECT_TRUE(P.contains(Vec::Constant(1, 0.5)));
  EXPECT_FALSE(P.contains(Vec::Constant(1, -0.5)));
  EXPECT_FALSE(P.contains(Vec::Constant(1, 1.0)));
}

TEST(AtlasIo, FixturesRoundTrip) {
  for (const auto& name : fixtures::names()) {
    Atlas a = parse_atlas(fixtures::by_name(name));
    a.check_structure();
    Json j = atlas_json(a);
    EXPECT_EQ(atlas_json(parse_atlas(j)).dump(), j.dump()) << name;
  }
}

TEST(AtlasIo, SchemaErrorsAreTyped) {
  Json doc = fixtures::ex_change();
  doc["charts"][0]["obstruction_dim"] = 2;
  try {
    parse_atlas(doc);
    FAIL() << "expected an error";
  } catch (const AtlasError& e) {
    EXPECT_NE(e.kind(), AtlasError::Kind::Other);
  }
}

TEST(Changes, ApplyAndInvert) {
  Atlas a = parse_atlas(fixtures::ex_change());
  const auto& ch = a.change({2}, {1, 2});
  Vec y = Vec::Constant(1, 0.5);
  auto x = ch.apply(y);
  ASSERT_TRUE(x.has_value());
  EXPECT_DOUBLE_EQ((*x)[1], 0.0625 - 0.25);
  auto back = ch.invert(*x, 1e-10);
  ASSERT_TRUE(back.has_value());
  EXPECT_NEAR((*back)[0], 0.5, 1e-12);
}
