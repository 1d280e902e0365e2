#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "coalesce/ghostfree.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

using namespace coalesce;

namespace {

ModelSpec checkerboard(int n, int T) {
  ModelSpec s;
  s.kind = "checkerboard-srw";
  s.T = T;
  for (int j = 0; j < n; ++j) s.sources.push_back(2 * j);
  s.window_lo = -T;
  s.window_hi = 2 * (n - 1) + T;
  return s;
}

}  // namespace

TEST_CASE("exact determinants, pivoting included") {
  CHECK(determinant({{rat(1, 2)}}) == rat(1, 2));
  CHECK(determinant({{rat(1), rat(2)}, {rat(3), rat(4)}}) == rat(-2));
  // leading zero forces a row swap
  CHECK(determinant({{rat(0), rat(1)}, {rat(1), rat(0)}}) == rat(-1));
  CHECK(determinant({{rat(0), rat(0)}, {rat(0), rat(1)}}) == rat(0));
  CHECK(determinant(std::vector<std::vector<Rat>>{}) == rat(1));

  const double d = determinant(std::vector<std::vector<double>>{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(d == doctest::Approx(-1.0));
}

TEST_CASE("marginal matrix of the two-walker instance") {
  const auto kernels = model_kernels(checkerboard(2, 2));
  REQUIRE(kernels.size() == 2);
  const FinalState f = make_heir_state(2, {2}, {0});
  const auto m = build_coalescence_matrix(kernels, f);
  // heir column: arrival mass at 0; ghost column: F(0), shifted left of 2
  CHECK(m[0][0] == rat(1, 2));
  CHECK(m[1][0] == rat(1, 4));
  CHECK(m[0][1] == rat(3, 4) - rat(1));
  CHECK(m[1][1] == rat(1, 4));
  CHECK(heir_mass(kernels, f) == rat(3, 16));
  CHECK(heir_mass(kernels, make_heir_state(2, {2}, {2})) == rat(3, 16));
  CHECK(heir_mass(kernels, make_heir_state(2, {}, {0, 2})) == rat(3, 16));
}

TEST_CASE("the marginal requires a stochastic model") {
  ModelSpec s;
  s.kind = "ne-lattice";  // default north = east = 1: mass 2 per step
  s.T = 2;
  s.sources = {0, 1};
  s.window_lo = 0;
  s.window_hi = 3;
  const auto kernels = model_kernels(s);
  CHECK_THROWS_AS(build_coalescence_matrix(kernels, make_heir_state(2, {2}, {1})),
                  std::invalid_argument);
}

TEST_CASE("heir boxes sum the marginal over ordered tuples") {
  const auto kernels = model_kernels(checkerboard(2, 2));
  CHECK(heir_box_probability(kernels, 2, {2}, {{0, 2}}) == rat(3, 8));
  CHECK(heir_box_probability(kernels, 2, {2}, {{std::nullopt, std::nullopt}}) == rat(3, 8));
  CHECK(heir_box_probability(kernels, 2, {}, {{std::nullopt, std::nullopt},
                                              {std::nullopt, std::nullopt}}) == rat(5, 8));
  // ordered-tuple sum: only y1 < y2 contributes
  CHECK(heir_box_probability(kernels, 2, {}, {{0, 0}, {0, 0}}) == rat(0));
  CHECK(heir_box_probability(kernels, 2, {}, {{-2, 0}, {0, 2}}) ==
        rat(1, 16) + rat(1, 8) + rat(3, 16));
}

TEST_CASE("permuted-set identity: frozen values and admissibility rules") {
  const auto pair_kernels = model_kernels(checkerboard(2, 2));
  // the ghost ray left of the heir point, value checked against the coupled
  // dynamics by hand: {2} at (0,0) and nothing else
  const Rat p = permuted_set_probability(pair_kernels, 2, {2},
                                         {{Label::interval(1, 3), {0, 0}},
                                          {Label::junction(2), {std::nullopt, 0}}});
  CHECK(p == rat(1, 8));

  const auto triple_kernels = model_kernels(checkerboard(3, 2));
  const Rat q = permuted_set_probability(triple_kernels, 3, {2},
                                         {{Label::interval(1, 3), {0, 0}},
                                          {Label::junction(2), {std::nullopt, 0}},
                                          {Label::interval(3, 4), {2, 4}}});
  CHECK(q == rat(3, 32));

  // heir boxes must be strictly separated left to right
  CHECK_THROWS_AS(permuted_set_probability(triple_kernels, 3, {2},
                                           {{Label::interval(1, 3), {0, 2}},
                                            {Label::junction(2), {std::nullopt, -2}},
                                            {Label::interval(3, 4), {2, 4}}}),
                  std::invalid_argument);
  // a ghost box straddling its heir box is ambiguous
  CHECK_THROWS_AS(permuted_set_probability(pair_kernels, 2, {2},
                                           {{Label::interval(1, 3), {0, 0}},
                                            {Label::junction(2), {-2, 2}}}),
                  std::invalid_argument);
  // disordered heir boxes would even flip the sign of the naive determinant
  CHECK_THROWS_AS(permuted_set_probability(pair_kernels, 2, {},
                                           {{Label::interval(1, 2), {2, 2}},
                                            {Label::interval(2, 3), {0, 0}}}),
                  std::invalid_argument);
  // every role needs a box
  CHECK_THROWS_AS(permuted_set_probability(pair_kernels, 2, {2},
                                           {{Label::interval(1, 3), {0, 0}}}),
                  std::invalid_argument);
}

TEST_CASE("gaussian cdf basics") {
  CHECK(gaussian_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_cdf(1.0) + gaussian_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gaussian_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
}

TEST_CASE("brownian kernels: density and cdf") {
  const BrownianKernel k{1.0, 4.0};  // started at 1, variance 4
  CHECK(k.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.density(1.0) == doctest::Approx(1.0 / std::sqrt(8.0 * std::acos(-1.0))));
  CHECK(k.cdf(3.0) == doctest::Approx(gaussian_cdf(1.0)).epsilon(1e-15));
}

TEST_CASE("brownian heir density: frozen determinant value") {
  const std::vector<BrownianKernel> ks = {{0.0, 1.0}, {1.0, 1.0}};
  const double d = brownian_heir_density(ks, {2}, {0.0});
  CHECK(d == doctest::Approx(0.18427965106065552).epsilon(1e-12));
}

TEST_CASE("brownian quadrature: merge probability and normalization") {
  const std::vector<BrownianKernel> ks = {{0.0, 1.0}, {1.0, 1.0}};
  const Quadrature merged = brownian_ordered_integral(ks, {2}, -12.0, 13.0, 1e-8);
  // P(min over [0,1] of the gap hits 0) = 2 Phi(-1/sqrt(2))
  CHECK(merged.value == doctest::Approx(2.0 * gaussian_cdf(-1.0 / std::sqrt(2.0))).epsilon(1e-7));
  const Quadrature apart = brownian_ordered_integral(ks, {}, -12.0, 13.0, 1e-8);
  CHECK(merged.value + apart.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(merged.evaluations > 0);
}
