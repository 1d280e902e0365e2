#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <optional>
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

Board ne_lattice(int n, int T) {
  ModelSpec s;
  s.kind = "ne-lattice";
  s.T = T;
  for (int j = 0; j < n; ++j) s.sources.push_back(j);
  s.window_lo = 0;
  s.window_hi = (n - 1) + T;
  s.parameters["north"] = rat(1, 3);
  s.parameters["east"] = rat(2, 3);
  Board b;
  b.g = build_model(s);
  for (int x : s.sources) b.xs.push_back(b.g.vertex(x, 0));
  return b;
}

const FinalState& triple_state() {
  static const FinalState f = make_state(3, {2, 3},
                                         {{Label::interval(1, 4), 1},
                                          {Label::junction(2), 1},
                                          {Label::junction(3), 3}});
  return f;
}

}  // namespace

TEST_CASE("first_shared_vertex is the earliest meeting, offsets included") {
  const Board b = checkerboard(2, 4);
  // walker paths written as space sequences, one vertex per slice
  auto path = [&](int t0, std::vector<int> spaces) {
    Path p;
    int t = t0;
    for (int x : spaces) p.push_back(b.g.vertex(x, t++));
    return p;
  };
  const Path p = path(0, {0, 1, 2, 1, 0});
  const Path q = path(0, {2, 1, 2, 3, 2});
  const auto v = first_shared_vertex(b.g, p, q, Extension::TimeSpace);
  REQUIRE(v.has_value());
  CHECK(b.g.v(*v).space == 1);
  CHECK(b.g.v(*v).time == 1);

  // a suffix path starting on a later slice still meets correctly
  const Path tail = path(2, {2, 1, 0});
  const auto w = first_shared_vertex(b.g, p, tail, Extension::TimeSpace);
  REQUIRE(w.has_value());
  CHECK(b.g.v(*w).space == 2);
  CHECK(b.g.v(*w).time == 2);

  const Path far = path(0, {2, 3, 4, 5, 6});
  CHECK_FALSE(first_shared_vertex(b.g, p, far, Extension::TimeSpace).has_value());
}

TEST_CASE("segment_swap exchanges suffixes and roles") {
  const Board b = checkerboard(2, 2);
  const FinalState f = make_state(2, {2},
                                  {{Label::interval(1, 3), 0}, {Label::junction(2), 2}});
  const auto casts = enumerate_castings(b.g, b.xs, f);
  REQUIRE(casts.size() == 1);
  const Casting& c = casts[0];
  // both paths pass through (1,1); swapping there exchanges the targets
  const VertexId meet = *first_shared_vertex(b.g, c.paths[0], c.paths[1],
                                             Extension::TimeSpace);
  const Casting swapped = segment_swap(c, 1, 2, meet);
  CHECK(swapped.pi == std::vector<int>{c.pi[1], c.pi[0]});
  CHECK(swapped.paths[0].back() == c.paths[1].back());
  CHECK(swapped.paths[1].back() == c.paths[0].back());
  CHECK(casting_weight(b.g, swapped) == casting_weight(b.g, c));
  // swapping twice restores the casting
  CHECK(segment_swap(swapped, 1, 2, meet) == c);
}

TEST_CASE("two-walker rehearsal: one success, correct genealogy") {
  const Board b = checkerboard(2, 2);
  const FinalState f = make_state(2, {2},
                                  {{Label::interval(1, 3), 0}, {Label::junction(2), 2}});
  const auto casts = enumerate_castings(b.g, b.xs, f);
  REQUIRE(casts.size() == 1);
  const RehearsalOutcome out = rehearse(b.g, b.xs, f, casts[0]);
  REQUIRE(out.success);
  REQUIRE(out.log.size() == 1);
  CHECK(out.log[0].valid);
  CHECK(out.log[0].left == Label::interval(1, 2));
  CHECK(out.log[0].right == Label::interval(2, 3));
  CHECK(b.g.v(out.log[0].vertex).space == 1);
  CHECK(b.g.v(out.log[0].vertex).time == 1);

  const Performance& p = out.performance;
  REQUIRE(p.trees.size() == 1);
  CHECK(p.trees[0].heir == Label::interval(1, 3));
  CHECK(p.collisions.at(2) == out.log[0].vertex);
  CHECK(performance_weight(b.g, p) == casting_weight(b.g, casts[0]));
  CHECK(attribute(b.g, b.xs, f, p) == casts[0]);
}

TEST_CASE("three-walker rehearsal: family bookkeeping and pairing") {
  const Board b = checkerboard(3, 3);
  const FinalState& f = triple_state();
  const auto casts = enumerate_castings(b.g, b.xs, f);
  CHECK(casts.size() == 15);

  int fixed = 0, paired = 0;
  std::map<std::vector<int>, int> fixed_by_family;
  for (const Casting& c : casts) {
    const RehearsalOutcome out = rehearse(b.g, b.xs, f, c);
    if (out.success) {
      ++fixed;
      ++fixed_by_family[c.pi];
      CHECK(perm_sign(c.pi) == state_sign(f));
      CHECK(attribute(b.g, b.xs, f, out.performance) == c);
      CHECK(involution(b.g, b.xs, f, c) == c);  // fixed point of the wrapper
    } else {
      ++paired;
      CHECK(casting_weight(b.g, out.partner) == casting_weight(b.g, c));
      CHECK(perm_sign(out.partner.pi) == -perm_sign(c.pi));
      const RehearsalOutcome back = rehearse(b.g, b.xs, f, out.partner);
      REQUIRE_FALSE(back.success);
      CHECK(back.partner == c);
      // the involution wrapper agrees
      CHECK(involution(b.g, b.xs, f, c) == out.partner);
    }
  }
  CHECK(fixed == 9);
  CHECK(paired == 6);
  CHECK(fixed_by_family.count(std::vector<int>{3, 1, 2}) == 0);  // the even family
  CHECK(enumerate_performances(b.g, b.xs, f).size() == 9);
}

TEST_CASE("rehearsal rejects castings that are not candidates") {
  const Board b = checkerboard(2, 2);
  const FinalState f = make_state(2, {2},
                                  {{Label::interval(1, 3), 0}, {Label::junction(2), 2}});
  // actor 2 playing the ghost has the wrong source sign for epsilon = -1
  Casting bad;
  bad.pi = {1, 2};
  bad.paths = {{b.xs[0], b.g.vertex(1, 1), b.g.vertex(0, 2)},
               {b.xs[1], b.g.vertex(1, 1), b.g.vertex(2, 2)}};
  CHECK_THROWS_AS(rehearse(b.g, b.xs, f, bad), std::invalid_argument);
}

TEST_CASE("both extensions run every rehearsal to the same outcome") {
  const Board b = ne_lattice(3, 2);
  REQUIRE(extension_valid(b.g, Extension::SpaceTime));
  std::vector<int> sites;
  for (VertexId v : b.g.slice(b.g.T)) sites.push_back(b.g.v(v).space);

  long long castings = 0;
  for (int mask = 0; mask < 4; ++mask) {
    std::vector<int> ghosts;
    for (int i = 0; i < 2; ++i)
      if (mask & (1 << i)) ghosts.push_back(i + 2);
    const auto heirs = heir_set(3, ghosts);
    const int k = static_cast<int>(heirs.size());
    const int m = 3 - k;
    // odometer over one position per role, heirs kept increasing
    std::vector<std::size_t> idx(3, 0);
    while (true) {
      std::map<Label, int> pos;
      bool increasing = true;
      for (int i = 0; i < k; ++i) {
        pos[heirs[i]] = sites[idx[i]];
        if (i > 0 && sites[idx[i - 1]] >= sites[idx[i]]) increasing = false;
      }
      for (int i = 0; i < m; ++i) pos[Label::junction(ghosts[i])] = sites[idx[k + i]];
      if (increasing) {
        const FinalState f = make_state(3, ghosts, pos);
        for (const Casting& c : enumerate_castings(b.g, b.xs, f)) {
          ++castings;
          const RehearsalOutcome a = rehearse(b.g, b.xs, f, c, Extension::TimeSpace);
          const RehearsalOutcome z = rehearse(b.g, b.xs, f, c, Extension::SpaceTime);
          CHECK(a.success == z.success);
          if (a.success)
            CHECK(a.performance == z.performance);
          else
            CHECK(a.partner == z.partner);
        }
      }
      int i = 0;
      while (i < 3 && idx[i] + 1 == sites.size()) idx[i++] = 0;
      if (i == 3) break;
      ++idx[i];
    }
  }
  CHECK(castings == 80);  // the sweep must actually cover something
}

TEST_CASE("no_ghosts_allowed_check holds everywhere it is defined") {
  for (int n = 1; n <= 5; ++n) {
    const int m = n - 1;
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::vector<int> ghosts;
      for (int i = 0; i < m; ++i)
        if (mask & (1 << i)) ghosts.push_back(i + 2);
      CHECK(no_ghosts_allowed_check(n, ghosts));
    }
  }
  CHECK_THROWS_AS(no_ghosts_allowed_check(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(no_ghosts_allowed_check(11, {}), std::invalid_argument);
}
