#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

using namespace coalesce;

namespace {

ModelSpec checkerboard(int T, std::vector<int> sources) {
  ModelSpec s;
  s.kind = "checkerboard-srw";
  s.T = T;
  s.sources = std::move(sources);
  int lo = s.sources.front(), hi = s.sources.back();
  s.window_lo = lo - T;
  s.window_hi = hi + T;
  return s;
}

ModelSpec ne_lattice(int T, std::vector<int> sources, Rat north, Rat east) {
  ModelSpec s;
  s.kind = "ne-lattice";
  s.T = T;
  s.sources = std::move(sources);
  s.window_lo = s.sources.front();
  s.window_hi = s.sources.back() + T;
  s.parameters["north"] = north;
  s.parameters["east"] = east;
  return s;
}

}  // namespace

TEST_CASE("checkerboard graph has the right shape and weights") {
  const SpacetimeGraph g = build_model(checkerboard(2, {0}));
  CHECK(g.T == 2);
  CHECK(g.slice(0).size() == 1);
  CHECK(g.slice(1).size() == 2);
  CHECK(g.slice(2).size() == 3);
  CHECK(g.has_vertex(-1, 1));
  CHECK_FALSE(g.has_vertex(0, 1));  // parity
  const VertexId v0 = g.vertex(0, 0);
  const VertexId v1 = g.vertex(1, 1);
  CHECK(edge_weight(g, v0, v1) == rat(1, 2));
  CHECK_THROWS_AS(g.vertex(5, 1), std::exception);
  CHECK_THROWS_AS(edge_weight(g, v0, g.vertex(2, 2)), std::exception);
}

TEST_CASE("model validation rejects bad recipes") {
  ModelSpec s = checkerboard(2, {0});
  s.kind = "hexagon";
  CHECK_THROWS_AS(build_model(s), std::invalid_argument);

  // window clipping the reachable cone is an error, not a silent truncation
  ModelSpec clipped = checkerboard(2, {0});
  clipped.window_lo = -1;
  CHECK_THROWS_AS(build_model(clipped), std::invalid_argument);

  ModelSpec unsorted = checkerboard(2, {2, 0});
  CHECK_THROWS_AS(build_model(unsorted), std::invalid_argument);

  ModelSpec off = checkerboard(2, {0});
  off.parameters["p_up"] = rat(1, 3);  // parameter of a different kind
  CHECK_THROWS_AS(build_model(off), std::invalid_argument);

  ModelSpec bd = checkerboard(2, {0});
  bd.kind = "birth-death";
  bd.parameters["p_up"] = rat(1, 3);
  bd.parameters["p_down"] = rat(1, 3);  // must sum to one
  CHECK_THROWS_AS(build_model(bd), std::invalid_argument);
}

TEST_CASE("birth-death is the asymmetric checkerboard walk") {
  ModelSpec s = checkerboard(2, {0});
  s.kind = "birth-death";
  s.parameters["p_up"] = rat(1, 3);
  s.parameters["p_down"] = rat(2, 3);
  const SpacetimeGraph g = build_model(s);
  CHECK(edge_weight(g, g.vertex(0, 0), g.vertex(1, 1)) == rat(1, 3));
  CHECK(edge_weight(g, g.vertex(0, 0), g.vertex(-1, 1)) == rat(2, 3));
  CHECK(path_weight_sum(g, g.vertex(0, 0), g.vertex(0, 2)) == rat(4, 9));
}

TEST_CASE("custom models take explicit edges and reject duplicates") {
  ModelSpec s;
  s.kind = "custom";
  s.T = 1;
  s.sources = {0};
  s.window_lo = 0;
  s.window_hi = 1;
  s.custom_edges.push_back({0, 0, 0, rat(1, 3)});
  s.custom_edges.push_back({0, 0, 1, rat(2, 3)});
  const SpacetimeGraph g = build_model(s);
  CHECK(edge_weight(g, g.vertex(0, 0), g.vertex(1, 1)) == rat(2, 3));

  s.custom_edges.push_back({0, 0, 1, rat(1, 5)});  // same tail and head again
  CHECK_THROWS_AS(build_model(s), std::invalid_argument);
}

TEST_CASE("path weights, sums and enumeration agree") {
  const SpacetimeGraph g = build_model(checkerboard(4, {0}));
  const VertexId x = g.vertex(0, 0);
  for (VertexId y : g.slice(4)) {
    Rat total = rat(0);
    for (const Path& p : enumerate_paths(g, x, y, 1000)) total += path_weight(g, p);
    CHECK(total == path_weight_sum(g, x, y));
    CHECK(total == forward_weights(g, x)[y]);
  }
  CHECK(path_weight_sum(g, x, g.vertex(0, 4)) == rat(6, 16));
  CHECK(enumerate_paths(g, x, g.vertex(0, 4), 1000).size() == 6);
  CHECK_THROWS_AS(enumerate_paths(g, x, g.vertex(0, 4), 5), std::length_error);
  // the empty path has weight one
  CHECK(path_weight(g, Path{x}) == rat(1));
}

TEST_CASE("linear extensions: time-space always, space-time only if monotone") {
  const SpacetimeGraph cb = build_model(checkerboard(2, {0}));
  CHECK(extension_valid(cb, Extension::TimeSpace));
  CHECK_FALSE(extension_valid(cb, Extension::SpaceTime));  // left steps decrease space

  const SpacetimeGraph ne = build_model(ne_lattice(2, {0, 1}, rat(1), rat(1)));
  CHECK(extension_valid(ne, Extension::TimeSpace));
  CHECK(extension_valid(ne, Extension::SpaceTime));

  const VertexId a = ne.vertex(0, 1);
  const VertexId b = ne.vertex(1, 0);
  CHECK(linear_less(ne, b, a, Extension::TimeSpace));   // earlier slice first
  CHECK(linear_less(ne, a, b, Extension::SpaceTime));   // smaller space first
}

TEST_CASE("planarity properties hold on the lattice kinds") {
  const SpacetimeGraph cb = build_model(checkerboard(3, {0, 2}));
  const auto r1 = check_planarity(cb, {cb.vertex(0, 0), cb.vertex(2, 0)},
                                  {cb.vertex(1, 3), cb.vertex(3, 3)}, 100000);
  CHECK(r1.crossing_property);
  CHECK(r1.consecutive_collision);

  const SpacetimeGraph ne = build_model(ne_lattice(3, {0, 1, 2}, rat(1), rat(1)));
  const auto r2 = check_planarity(ne, {ne.vertex(0, 0), ne.vertex(1, 0), ne.vertex(2, 0)},
                                  {ne.vertex(1, 3), ne.vertex(2, 3), ne.vertex(4, 3)}, 100000);
  CHECK(r2.crossing_property);
  CHECK(r2.consecutive_collision);
  CHECK(r2.counterexample.empty());
}

TEST_CASE("slice kernels match the graph path-weight sums") {
  for (const ModelSpec& s :
       {checkerboard(3, {0}), ne_lattice(3, {0}, rat(1, 3), rat(2, 3))}) {
    const SpacetimeGraph g = build_model(s);
    const SliceKernel k = transition_kernel(s, s.sources[0]);
    const VertexId x = g.vertex(s.sources[0], 0);
    Rat total = rat(0);
    for (VertexId y : g.slice(g.T)) {
      CHECK(k.pmf(g.v(y).space) == path_weight_sum(g, x, y));
      total += k.pmf(g.v(y).space);
    }
    CHECK(k.total() == total);
  }
}

TEST_CASE("kernel cdf and box masses") {
  const SliceKernel k = transition_kernel(checkerboard(2, {0}), 0);
  CHECK(k.pmf(-2) == rat(1, 4));
  CHECK(k.pmf(0) == rat(1, 2));
  CHECK(k.pmf(2) == rat(1, 4));
  CHECK(k.pmf(1) == rat(0));
  CHECK(k.pmf(17) == rat(0));
  CHECK(k.cdf(-3) == rat(0));
  CHECK(k.cdf(0) == rat(3, 4));
  CHECK(k.cdf(99) == rat(1));
  CHECK(k.mass(-2, 0) == rat(3, 4));
  CHECK(k.mass(std::nullopt, 0) == rat(3, 4));
  CHECK(k.mass(1, std::nullopt) == rat(1, 4));
  CHECK(k.mass(std::nullopt, std::nullopt) == rat(1));
  CHECK(k.mass(3, 2) == rat(0));  // empty box
  CHECK(k.total() == rat(1));
}
