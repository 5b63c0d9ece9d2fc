#include "kuranishi/fixtures.hpp"
#include "kuranishi/kernels.hpp"

#include <gtest/gtest.h>

#include <cstring>

using namespace kuranishi;

namespace {

const SmoothMap planar = SmoothMap::parse({"x1^2 - x2^2 - 1/4", "2*x1*x2"}, 2);

Box square() { return Box({Rational(-2), Rational(-2)}, {Rational(2), Rational(2)}); }

bool bitwise_equal(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || std::memcmp(a[i].data(), b[i].data(), sizeof(double) * a[i].size()) != 0)
      return false;
  return true;
}

}  // namespace

TEST(Kernels, BatchEvaluationMatchesSerial) {
  auto pts = sample_box(square(), 60, 4);
  EXPECT_TRUE(bitwise_equal(eval_batch(planar, pts, Exec::Serial), eval_batch(planar, pts, Exec::Parallel)));
  auto a = norm_batch(planar, pts, Exec::Serial), b = norm_batch(planar, pts, Exec::Parallel);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < pts.size(); i += 97) EXPECT_EQ(a[i], planar.eval(pts[i]).norm());
}

TEST(Kernels, ZeroLocationMatchesSerial) {
  Domain D = Domain::box(square());
  auto s = locate_zeros(planar, D, 20, 3, 1e-7, Exec::Serial);
  auto p = locate_zeros(planar, D, 20, 3, 1e-7, Exec::Parallel);
  EXPECT_TRUE(bitwise_equal(s, p));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0][0], -0.5, 1e-12);
  EXPECT_NEAR(s[1][0], 0.5, 1e-12);
}

TEST(Kernels, GridMinBreaksTiesByIndex) {
  std::vector<Vec> pts{Vec::Constant(1, 1.0), Vec::Constant(1, -1.0), Vec::Constant(1, 2.0)};
  auto g = grid_min([](const Vec& x) { return x[0] * x[0]; }, pts, Exec::Parallel);
  EXPECT_EQ(g.value, 1.0);
  EXPECT_EQ(g.index, 0u);
}

TEST(Kernels, NewtonLeastNormStep) {
  // one equation in two unknowns: the least-norm iteration lands on the closest point of the line
  auto r = newton_solve([](const Vec& x) { return Vec::Constant(1, x[0] + x[1] - 2.0); },
                        [](const Vec&) { return Mat::Ones(1, 2); }, Vec::Zero(2));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(Sampling, DeterministicAndInterior) {
  Domain D = parse_domain(Json::parse(R"([{"box": [[-1, 1], [-1, 1]], "constraints": ["1 - x1^2 - x2^2"]}])"), 2);
  auto a = sample_domain(D, 16, 7), b = sample_domain(D, 16, 7), c = sample_domain(D, 16, 8);
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_FALSE(bitwise_equal(a, c));
  for (const auto& x : a) EXPECT_LT(x.squaredNorm(), 1.0);
  // roughly pi/4 of the 256 cells
  EXPECT_GT(a.size(), 170u);
  EXPECT_LT(a.size(), 230u);
}

TEST(Sampling, JobsDoNotChangeResults) {
  Domain D = Domain::box(square());
  set_jobs(1);
  auto one = locate_zeros(planar, D, 16, 5);
  set_jobs(4);
  auto four = locate_zeros(planar, D, 16, 5);
  set_jobs(0);
  EXPECT_TRUE(bitwise_equal(one, four));
}
