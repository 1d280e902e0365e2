#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <stdexcept>
#include <vector>

#include "coalesce/ghost_formula.hpp"
#include "coalesce/involution.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/oracle.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

using namespace coalesce;

namespace {

struct Board {
  SpacetimeGraph g;
  std::vector<VertexId> xs;
};

Board checkerboard(int n, int T) {
  ModelSpec s;
  s.kind = "checkerboard-srw";
  s.T = T;
  for (int j = 0; j < n; ++j) s.sources.push_back(2 * j);
  s.window_lo = -T;
  s.window_hi = 2 * (n - 1) + T;
  Board b;
  b.g = build_model(s);
  for (int x : s.sources) b.xs.push_back(b.g.vertex(x, 0));
  return b;
}

}  // namespace

TEST_CASE("two-walker enumerations: frozen counts and weights") {
  const Board b = checkerboard(2, 2);
  const FinalState merged = make_state(2, {2},
                                       {{Label::interval(1, 3), 0}, {Label::junction(2), 2}});
  const auto casts = enumerate_castings(b.g, b.xs, merged);
  CHECK(casts.size() == 1);
  CHECK(casting_weight(b.g, casts[0]) == rat(1, 16));

  const auto perfs = enumerate_performances(b.g, b.xs, merged);
  REQUIRE(perfs.size() == 1);
  CHECK(performance_weight(b.g, perfs[0]) == rat(1, 16));
  // the collision happens at (1,1); the ghost then walks 1 -> 2
  CHECK(b.g.v(perfs[0].collisions.at(2)).time == 1);
  CHECK(perfs[0].ghost_paths.at(2).size() == 2);
}

TEST_CASE("three-walker enumerations: frozen counts") {
  const Board b = checkerboard(3, 3);
  const FinalState f = make_state(3, {2, 3},
                                  {{Label::interval(1, 4), 1},
                                   {Label::junction(2), 1},
                                   {Label::junction(3), 3}});
  CHECK(enumerate_castings(b.g, b.xs, f).size() == 15);
  CHECK(enumerate_performances(b.g, b.xs, f).size() == 9);

  Rat total = rat(0);
  for (const Performance& p : enumerate_performances(b.g, b.xs, f))
    total += performance_weight(b.g, p);
  CHECK(total == rat(9, 512));
}

TEST_CASE("enumeration caps throw length_error") {
  const Board b = checkerboard(3, 3);
  const FinalState f = make_state(3, {2, 3},
                                  {{Label::interval(1, 4), 1},
                                   {Label::junction(2), 1},
                                   {Label::junction(3), 3}});
  CHECK_THROWS_AS(enumerate_castings(b.g, b.xs, f, 3), std::length_error);
  CHECK_THROWS_AS(enumerate_performances(b.g, b.xs, f, 3), std::length_error);
}

TEST_CASE("interacting distribution: frozen two-walker table") {
  const Board b = checkerboard(2, 2);
  const auto dist = interacting_distribution(b.g, b.xs);
  CHECK(dist.at({{2}, {0}}) == rat(3, 16));
  CHECK(dist.at({{2}, {2}}) == rat(3, 16));
  CHECK(dist.at({{}, {0, 2}}) == rat(3, 16));
  CHECK(dist.at({{}, {-2, 0}}) == rat(1, 16));
  Rat total = rat(0);
  for (const auto& [key, p] : dist) total += p;
  CHECK(total == rat(1));
}

TEST_CASE("coupled distribution marginalizes onto the interacting one") {
  for (int n : {2, 3}) {
    const Board b = checkerboard(n, 2);
    const auto coupled = coupled_distribution(b.g, b.xs);
    const auto plain = interacting_distribution(b.g, b.xs);

    Rat total = rat(0);
    std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> folded;
    for (const auto& [key, p] : coupled) {
      total += p;
      const auto& ghosts = key.first;
      // keep the heir coordinates only (rank order), drop the ghosts
      std::vector<int> ys;
      const auto roles = roles_in_rank_order(n, ghosts);
      for (std::size_t r = 0; r < roles.size(); ++r)
        if (roles[r].is_interval()) ys.push_back(key.second[r]);
      folded[{ghosts, ys}] += p;
    }
    CHECK(total == rat(1));
    CHECK(folded == plain);
  }
}

TEST_CASE("coupled ghosts may leapfrog their heirs") {
  // the ghost walks freely, so it can end far on either side of the heir
  const Board b = checkerboard(2, 3);
  const auto coupled = coupled_distribution(b.g, b.xs);
  bool left = false, right = false;
  for (const auto& [key, p] : coupled) {
    if (key.first != std::vector<int>{2} || p == 0) continue;
    if (key.second[1] < key.second[0]) left = true;
    if (key.second[1] > key.second[0]) right = true;
  }
  CHECK(left);
  CHECK(right);
}

TEST_CASE("lgv enumeration counts disjoint tuples") {
  const Board b = checkerboard(2, 2);
  const LgvCount c =
      lgv_enumerate(b.g, b.xs, {b.g.vertex(0, 2), b.g.vertex(2, 2)});
  CHECK(c.tuples == 3);
  CHECK(c.total == rat(3, 16));

  // crossing assignments leave no disjoint pair on a planar board
  const LgvCount crossed =
      lgv_enumerate(b.g, b.xs, {b.g.vertex(2, 2), b.g.vertex(0, 2)});
  CHECK(crossed.tuples == 0);
  CHECK(crossed.total == rat(0));
}

TEST_CASE("oracle input validation") {
  const Board b = checkerboard(2, 2);
  // sources must live on the first slice, strictly ordered
  CHECK_THROWS_AS(interacting_distribution(b.g, {b.xs[1], b.xs[0]}), std::invalid_argument);
  CHECK_THROWS_AS(interacting_distribution(b.g, {b.xs[0], b.g.vertex(1, 1)}),
                  std::invalid_argument);

  // the interacting dynamics need a stochastic model
  ModelSpec s;
  s.kind = "ne-lattice";
  s.T = 2;
  s.sources = {0, 1};
  s.window_lo = 0;
  s.window_hi = 3;
  const SpacetimeGraph g = build_model(s);  // default weights count paths
  CHECK_THROWS_AS(interacting_distribution(g, {g.vertex(0, 0), g.vertex(1, 0)}),
                  std::invalid_argument);
}
