#include "coalesce/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "coalesce/check.hpp"
#include "coalesce/ghost_formula.hpp"

namespace coalesce {

namespace {

void validate_actors(const SpacetimeGraph& g, const std::vector<VertexId>& xs) {
  if (xs.empty()) throw std::invalid_argument("oracle: at least one actor is required");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0 || xs[i] >= static_cast<VertexId>(g.verts.size()))
      throw std::invalid_argument("oracle: unknown source vertex");
    if (g.v(xs[i]).time != 0)
      throw std::invalid_argument("oracle: sources must sit on the first slice");
    if (i > 0 && g.v(xs[i - 1]).space >= g.v(xs[i]).space)
      throw std::invalid_argument("oracle: sources must be strictly ordered");
  }
}

void require_stochastic(const SpacetimeGraph& g, const std::string& who) {
  for (VertexId id = 0; id < static_cast<VertexId>(g.verts.size()); ++id) {
    if (g.v(id).time >= g.T) continue;
    Rat s = rat(0);
    for (const HalfEdge& e : g.out[id]) s += e.w;
    if (s != rat(1)) throw std::invalid_argument(who + ": the model must be stochastic");
  }
}

}  // namespace

std::vector<Casting> enumerate_castings(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                                        const FinalState& f, std::size_t cap) {
  if (static_cast<int>(xs.size()) != f.n)
    throw std::invalid_argument("oracle: one source per actor is required");
  if (!f.positioned()) throw std::invalid_argument("oracle: the final state needs positions");
  validate_actors(g, xs);

  const std::vector<Label> roles = roles_in_rank_order(f.n, f.ghosts);
  auto role_vertex = [&](int r) { return g.vertex(f.position(roles[r - 1]), g.T); };

  std::map<std::pair<int, int>, std::vector<Path>> cache;  // (actor, rank) -> trajectories
  auto paths_for = [&](int j, int r) -> const std::vector<Path>& {
    const auto key = std::make_pair(j, r);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, enumerate_paths(g, xs[j - 1], role_vertex(r), cap)).first;
    return it->second;
  };

  std::vector<Casting> out;
  for (const std::vector<int>& pi : candidate_bijections(f)) {
    std::vector<const std::vector<Path>*> lists(f.n);
    bool feasible = true;
    for (int j = 1; j <= f.n; ++j) {
      lists[j - 1] = &paths_for(j, pi[j - 1]);
      if (lists[j - 1]->empty()) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    std::vector<std::size_t> idx(f.n, 0);
    while (true) {
      Casting c;
      c.pi = pi;
      c.paths.reserve(f.n);
      for (int j = 0; j < f.n; ++j) c.paths.push_back((*lists[j])[idx[j]]);
      out.push_back(std::move(c));
      if (out.size() > cap) throw std::length_error("oracle: too many castings");
      int d = f.n - 1;
      while (d >= 0 && ++idx[d] == lists[d]->size()) idx[d--] = 0;
      if (d < 0) break;
    }
  }
  return out;
}

namespace {

// One admissible way for a heir's members to coalesce: the merged tree, the
// collision vertex of every internal junction, and the member trajectories
// themselves (kept for the cross-heir ordering test).
struct Family {
  Performance::Tree tree;
  std::map<int, VertexId> collisions;
  std::vector<Path> members;
};

// Once two member trajectories share a vertex they must coincide onward.
bool join_and_stay_joined(const Path& p, const Path& q) {
  bool joined = false;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (joined) {
      if (p[t] != q[t]) return false;
    } else if (p[t] == q[t]) {
      joined = true;
    }
  }
  return true;
}

// Member positions may touch but never cross.
bool slicewise_sorted(const SpacetimeGraph& g, const std::vector<Path>& q) {
  for (std::size_t m = 0; m + 1 < q.size(); ++m)
    for (std::size_t t = 0; t < q[m].size(); ++t)
      if (g.v(q[m][t]).space > g.v(q[m + 1][t]).space) return false;
  return true;
}

// Distinct genealogies stay strictly apart.
bool slicewise_separated(const SpacetimeGraph& g, const Path& p, const Path& q) {
  for (std::size_t t = 0; t < p.size(); ++t)
    if (g.v(p[t]).space >= g.v(q[t]).space) return false;
  return true;
}

std::vector<Family> heir_families(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                                  const Label& heir, VertexId target, std::size_t cap,
                                  std::size_t& work) {
  const int members = heir.b - heir.a;
  std::vector<std::vector<Path>> lists(members);
  for (int m = 0; m < members; ++m) {
    lists[m] = enumerate_paths(g, xs[heir.a - 1 + m], target, cap);
    if (lists[m].empty()) return {};
  }

  std::vector<Family> out;
  std::vector<std::size_t> idx(members, 0);
  while (true) {
    if (++work > cap) throw std::length_error("oracle: too many performances");
    std::vector<Path> tuple;
    tuple.reserve(members);
    for (int m = 0; m < members; ++m) tuple.push_back(lists[m][idx[m]]);

    bool ok = slicewise_sorted(g, tuple);
    for (int a = 0; ok && a < members; ++a)
      for (int b = a + 1; ok && b < members; ++b)
        ok = join_and_stay_joined(tuple[a], tuple[b]);
    if (ok) {
      Family fam;
      fam.tree.heir = heir;
      fam.tree.root = target;
      for (const Path& p : tuple)
        for (std::size_t t = 0; t + 1 < p.size(); ++t) fam.tree.next.emplace(p[t], p[t + 1]);
      for (int junction = heir.a + 1; junction < heir.b; ++junction) {
        const Path& l = tuple[junction - 1 - heir.a];
        const Path& r = tuple[junction - heir.a];
        VertexId meet = -1;
        for (std::size_t t = 0; t < l.size(); ++t)
          if (l[t] == r[t]) {
            meet = l[t];
            break;
          }
        COALESCE_CHECK(meet >= 0, "oracle: joined members must share a vertex");
        fam.collisions[junction] = meet;
      }
      fam.members = std::move(tuple);
      out.push_back(std::move(fam));
    }
    int d = members - 1;
    while (d >= 0 && ++idx[d] == lists[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

}  // namespace

std::vector<Performance> enumerate_performances(const SpacetimeGraph& g,
                                                const std::vector<VertexId>& xs,
                                                const FinalState& f, std::size_t cap) {
  if (static_cast<int>(xs.size()) != f.n)
    throw std::invalid_argument("oracle: one source per actor is required");
  if (!f.positioned()) throw std::invalid_argument("oracle: the final state needs positions");
  validate_actors(g, xs);

  std::size_t work = 0;
  std::vector<std::vector<Family>> families;
  for (const Label& heir : f.heirs) {
    families.push_back(
        heir_families(g, xs, heir, g.vertex(f.position(heir), g.T), cap, work));
    if (families.back().empty()) return {};
  }

  std::vector<Performance> out;
  const int H = static_cast<int>(families.size());
  std::vector<std::size_t> pick(H, 0);
  while (true) {
    if (++work > cap) throw std::length_error("oracle: too many performances");
    bool ok = true;
    for (int h = 0; ok && h + 1 < H; ++h)
      ok = slicewise_separated(g, families[h][pick[h]].members.back(),
                               families[h + 1][pick[h + 1]].members.front());
    if (ok) {
      Performance base;
      std::map<int, VertexId> collisions;
      for (int h = 0; h < H; ++h) {
        base.trees.push_back(families[h][pick[h]].tree);
        for (const auto& [junction, v] : families[h][pick[h]].collisions)
          collisions[junction] = v;
      }
      base.collisions = collisions;

      // Every ghost walks freely from its collision to its final position.
      std::vector<int> ghosts(f.ghosts);
      std::vector<std::vector<Path>> tails(ghosts.size());
      bool feasible = true;
      for (std::size_t i = 0; i < ghosts.size(); ++i) {
        tails[i] = enumerate_paths(g, collisions.at(ghosts[i]),
                                   g.vertex(f.position(Label::junction(ghosts[i])), g.T), cap);
        if (tails[i].empty()) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        std::vector<std::size_t> tidx(ghosts.size(), 0);
        while (true) {
          if (++work > cap) throw std::length_error("oracle: too many performances");
          Performance perf = base;
          for (std::size_t i = 0; i < ghosts.size(); ++i)
            perf.ghost_paths[ghosts[i]] = tails[i][tidx[i]];
          out.push_back(std::move(perf));
          int d = static_cast<int>(ghosts.size()) - 1;
          while (d >= 0 && ++tidx[d] == tails[d].size()) tidx[d--] = 0;
          if (d < 0) break;
        }
      }
    }
    int d = H - 1;
    while (d >= 0 && ++pick[d] == families[d].size()) pick[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> interacting_distribution(
    const SpacetimeGraph& g, const std::vector<VertexId>& xs) {
  require_stochastic(g, "interacting");
  validate_actors(g, xs);
  const int n = static_cast<int>(xs.size());

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  std::map<Key, Rat> cur;
  {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = g.v(xs[i]).space;
    cur[{{}, std::move(pos)}] = rat(1);
  }

  for (int t = 0; t < g.T; ++t) {
    std::map<Key, Rat> nxt;
    for (const auto& [key, w] : cur) {
      const std::vector<int>& dissolved = key.first;
      const std::vector<int>& pos = key.second;
      const int k = static_cast<int>(pos.size());

      // Left endpoints of the live intervals.
      std::vector<int> lefts{1};
      for (int j = 2; j <= n; ++j)
        if (!std::binary_search(dissolved.begin(), dissolved.end(), j)) lefts.push_back(j);
      COALESCE_CHECK(static_cast<int>(lefts.size()) == k,
                     "interacting: the state must stay consistent");

      std::vector<const std::vector<HalfEdge>*> moves(k);
      for (int i = 0; i < k; ++i) moves[i] = &g.out[g.vertex(pos[i], t)];

      std::vector<std::size_t> idx(k, 0);
      while (true) {
        Rat step = w;
        std::vector<int> np(k);
        for (int i = 0; i < k; ++i) {
          const HalfEdge& e = (*moves[i])[idx[i]];
          step *= e.w;
          np[i] = g.v(e.to).space;
        }
        for (int i = 0; i + 1 < k; ++i)
          if (np[i] > np[i + 1])
            throw std::invalid_argument("interacting: particles crossed without meeting");

        // Runs of equal positions coalesce; the junctions between them
        // dissolve.
        std::vector<int> nd = dissolved;
        std::vector<int> mp;
        for (int i = 0; i < k;) {
          int j = i;
          while (j + 1 < k && np[j + 1] == np[i]) ++j;
          for (int r = i + 1; r <= j; ++r) nd.push_back(lefts[r]);
          mp.push_back(np[i]);
          i = j + 1;
        }
        std::sort(nd.begin(), nd.end());
        nxt[{std::move(nd), std::move(mp)}] += step;

        int d = k - 1;
        while (d >= 0 && ++idx[d] == moves[d]->size()) idx[d--] = 0;
        if (d < 0) break;
      }
    }
    cur = std::move(nxt);
  }
  return cur;
}

std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> coupled_distribution(
    const SpacetimeGraph& g, const std::vector<VertexId>& xs) {
  require_stochastic(g, "coupled");
  validate_actors(g, xs);
  const int n = static_cast<int>(xs.size());

  // Positions are stored per rank: rank r is the r-th role left to right, a
  // live interval's left endpoint or a released ghost's junction. A merge
  // turns the right interval's rank into a ghost rank at the same spot, so
  // the position vector itself never needs rearranging.
  using Key = std::pair<std::vector<int>, std::vector<int>>;
  std::map<Key, Rat> cur;
  {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = g.v(xs[i]).space;
    cur[{{}, std::move(pos)}] = rat(1);
  }

  for (int t = 0; t < g.T; ++t) {
    std::map<Key, Rat> nxt;
    for (const auto& [key, w] : cur) {
      const std::vector<int>& dissolved = key.first;
      const std::vector<int>& pos = key.second;

      std::vector<int> lefts{1};
      for (int j = 2; j <= n; ++j)
        if (!std::binary_search(dissolved.begin(), dissolved.end(), j)) lefts.push_back(j);

      std::vector<const std::vector<HalfEdge>*> moves(n);
      for (int r = 1; r <= n; ++r) moves[r - 1] = &g.out[g.vertex(pos[r - 1], t)];

      std::vector<std::size_t> idx(n, 0);
      while (true) {
        Rat step = w;
        std::vector<int> np(n);
        for (int r = 0; r < n; ++r) {
          const HalfEdge& e = (*moves[r])[idx[r]];
          step *= e.w;
          np[r] = g.v(e.to).space;
        }
        // Live intervals may touch but never cross; ghosts roam freely.
        for (std::size_t i = 0; i + 1 < lefts.size(); ++i)
          if (np[lefts[i] - 1] > np[lefts[i + 1] - 1])
            throw std::invalid_argument("coupled: particles crossed without meeting");

        std::vector<int> nd = dissolved;
        for (std::size_t i = 0; i < lefts.size();) {
          std::size_t j = i;
          while (j + 1 < lefts.size() && np[lefts[j + 1] - 1] == np[lefts[i] - 1]) ++j;
          for (std::size_t r = i + 1; r <= j; ++r) nd.push_back(lefts[r]);
          i = j + 1;
        }
        std::sort(nd.begin(), nd.end());
        nxt[{std::move(nd), np}] += step;

        int d = n - 1;
        while (d >= 0 && ++idx[d] == moves[d]->size()) idx[d--] = 0;
        if (d < 0) break;
      }
    }
    cur = std::move(nxt);
  }
  return cur;
}

LgvCount lgv_enumerate(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                       const std::vector<VertexId>& ys, std::size_t cap) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("oracle: matched sources and targets are required");
  validate_actors(g, xs);
  for (VertexId y : ys) {
    if (y < 0 || y >= static_cast<VertexId>(g.verts.size()))
      throw std::invalid_argument("oracle: unknown target vertex");
    if (g.v(y).time != g.T)
      throw std::invalid_argument("oracle: targets must sit on the final slice");
  }

  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<Path>> lists(n);
  for (int i = 0; i < n; ++i) {
    lists[i] = enumerate_paths(g, xs[i], ys[i], cap);
    if (lists[i].empty()) return {rat(0), 0};
  }

  LgvCount res{rat(0), 0};
  std::size_t work = 0;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    if (++work > cap) throw std::length_error("oracle: too many path tuples");
    bool disjoint = true;
    for (int a = 0; disjoint && a < n; ++a)
      for (int b = a + 1; disjoint && b < n; ++b) {
        const Path& p = lists[a][idx[a]];
        const Path& q = lists[b][idx[b]];
        for (std::size_t t = 0; t < p.size(); ++t)
          if (p[t] == q[t]) {
            disjoint = false;
            break;
          }
      }
    if (disjoint) {
      Rat wgt = rat(1);
      for (int i = 0; i < n; ++i) wgt *= path_weight(g, lists[i][idx[i]]);
      res.total += wgt;
      res.tuples += 1;
    }
    int d = n - 1;
    while (d >= 0 && ++idx[d] == lists[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
  return res;
}

}  // namespace coalesce
