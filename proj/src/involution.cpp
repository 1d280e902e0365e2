#include "coalesce/involution.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "coalesce/check.hpp"
#include "coalesce/ghost_formula.hpp"

namespace coalesce {

bool Casting::operator<(const Casting& o) const {
  return std::tie(pi, paths) < std::tie(o.pi, o.paths);
}

Rat casting_weight(const SpacetimeGraph& g, const Casting& c) {
  Rat w = rat(1);
  for (const Path& p : c.paths) w *= path_weight(g, p);
  return w;
}

Rat performance_weight(const SpacetimeGraph& g, const Performance& p) {
  Rat w = rat(1);
  for (const Performance::Tree& tree : p.trees)
    for (const auto& [u, s] : tree.next) w *= edge_weight(g, u, s);
  for (const auto& [junction, path] : p.ghost_paths) w *= path_weight(g, path);
  return w;
}

Casting segment_swap(const Casting& c, int i, int j, VertexId v) {
  const int n = static_cast<int>(c.pi.size());
  COALESCE_CHECK(i >= 1 && i <= n && j >= 1 && j <= n && i != j,
                 "segment_swap: actor indices out of range");
  const Path& p = c.paths[i - 1];
  const Path& q = c.paths[j - 1];
  auto pv = std::find(p.begin(), p.end(), v);
  auto qv = std::find(q.begin(), q.end(), v);
  COALESCE_CHECK(pv != p.end() && qv != q.end(),
                 "segment_swap: both paths must visit the shared vertex");

  Casting out = c;
  Path np(p.begin(), pv + 1);
  np.insert(np.end(), qv + 1, q.end());
  Path nq(q.begin(), qv + 1);
  nq.insert(nq.end(), pv + 1, p.end());
  out.paths[i - 1] = std::move(np);
  out.paths[j - 1] = std::move(nq);
  std::swap(out.pi[i - 1], out.pi[j - 1]);
  return out;
}

std::optional<VertexId> first_shared_vertex(const SpacetimeGraph& g, const Path& p, const Path& q,
                                            Extension) {
  // Paths hold one vertex per slice, so shared vertices line up by time and
  // form a chain; the earliest in time is the minimum under every extension.
  if (p.empty() || q.empty()) return std::nullopt;
  const int tp = g.v(p.front()).time;
  const int tq = g.v(q.front()).time;
  const int from = std::max(tp, tq);
  const int to = std::min(tp + static_cast<int>(p.size()), tq + static_cast<int>(q.size()));
  for (int t = from; t < to; ++t)
    if (p[t - tp] == q[t - tq]) return p[t - tp];
  return std::nullopt;
}

Casting local_involution(const SpacetimeGraph& g, const FinalState& f, const Casting& c, int i,
                         int j, Extension ext) {
  auto v = first_shared_vertex(g, c.paths[i - 1], c.paths[j - 1], ext);
  if (!v) return c;
  Casting swapped = segment_swap(c, i, j, *v);
  return is_candidate(f, swapped.pi) ? swapped : c;
}

RehearsalOutcome rehearse(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                          const FinalState& f, const Casting& c, Extension ext) {
  const int n = f.n;
  if (static_cast<int>(xs.size()) != n)
    throw std::invalid_argument("rehearse: one source per actor is required");
  if (static_cast<int>(c.pi.size()) != n || static_cast<int>(c.paths.size()) != n)
    throw std::invalid_argument("rehearse: casting size must match the state");
  if (!f.positioned()) throw std::invalid_argument("rehearse: the final state needs positions");
  if (!is_candidate(f, c.pi)) throw std::invalid_argument("rehearse: the casting must be a candidate");

  const std::vector<Label> roles = roles_in_rank_order(f.n, f.ghosts);
  auto role_vertex = [&](int r) { return g.vertex(f.position(roles[r - 1]), g.T); };

  for (int j = 1; j <= n; ++j) {
    const Path& p = c.paths[j - 1];
    COALESCE_CHECK(!p.empty() && p.front() == xs[j - 1],
                   "rehearse: a path must start at its actor's source");
    COALESCE_CHECK(p.back() == role_vertex(c.pi[j - 1]),
                   "rehearse: a path must end at its role's final position");
  }

  // Paths are never edited, only retired, so every pair's first meeting can
  // be fixed up front.
  std::map<std::pair<int, int>, VertexId> meet;
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k)
      if (auto v = first_shared_vertex(g, c.paths[j - 1], c.paths[k - 1], ext)) meet[{j, k}] = *v;

  struct Block {
    Label iv;
    int rep;  // the actor whose path currently carries the interval
  };
  std::vector<Block> blocks;
  for (int j = 1; j <= n; ++j) blocks.push_back({Label::interval(j, j + 1), j});

  RehearsalOutcome out;
  std::map<int, VertexId> collisions;
  std::map<int, Path> ghost_paths;
  std::map<int, int> prefix_len;  // retired actor -> kept length of its path

  while (true) {
    // Earliest crossing among live representatives; ties go to the leftmost
    // interval pair (the scan order below).
    int bi = -1, bj = -1;
    VertexId bv = -1;
    for (int a = 0; a < static_cast<int>(blocks.size()); ++a)
      for (int b = a + 1; b < static_cast<int>(blocks.size()); ++b) {
        const int r1 = blocks[a].rep, r2 = blocks[b].rep;
        auto it = meet.find({std::min(r1, r2), std::max(r1, r2)});
        if (it == meet.end()) continue;
        if (bi < 0 || linear_less(g, it->second, bv, ext)) {
          bi = a;
          bj = b;
          bv = it->second;
        }
      }
    if (bi < 0) break;  // nothing crosses: the casting is a performance

    const int r1 = blocks[bi].rep, r2 = blocks[bj].rep;
    COALESCE_CHECK(r1 < r2, "rehearse: representatives must follow interval order");

    CrossingCheck chk;
    chk.left = blocks[bi].iv;
    chk.right = blocks[bj].iv;
    chk.left_rep = r1;
    chk.right_rep = r2;
    chk.vertex = bv;
    COALESCE_CHECK(bj == bi + 1, "rehearse: crossing intervals must be adjacent");

    const int junction = blocks[bi].iv.b;
    const bool ghost_junction =
        std::find(f.ghosts.begin(), f.ghosts.end(), junction) != f.ghosts.end();
    const bool carried = c.pi[r1 - 1] == junction || c.pi[r2 - 1] == junction;
    chk.valid = ghost_junction && carried;
    out.log.push_back(chk);

    if (!chk.valid) {
      Casting partner = segment_swap(c, r1, r2, bv);
      COALESCE_CHECK(is_candidate(f, partner.pi),
                     "rehearse: the segment swap must preserve candidacy");
      out.success = false;
      out.partner = std::move(partner);
      return out;
    }

    const int ghost_rep = c.pi[r1 - 1] == junction ? r1 : r2;
    const int heir_rep = ghost_rep == r1 ? r2 : r1;
    const Path& gp = c.paths[ghost_rep - 1];
    auto at = std::find(gp.begin(), gp.end(), bv);
    COALESCE_CHECK(at != gp.end(), "rehearse: the collision must lie on the retiring path");
    collisions[junction] = bv;
    ghost_paths[junction] = Path(at, gp.end());
    prefix_len[ghost_rep] = static_cast<int>(at - gp.begin()) + 1;

    blocks[bi].iv = Label::interval(blocks[bi].iv.a, blocks[bj].iv.b);
    blocks[bi].rep = heir_rep;
    blocks.erase(blocks.begin() + bj);
  }

  // Success: read the genealogy forest off the casting. A retired actor's
  // trajectory continues, from its collision on, along whoever survived, so
  // the union of kept prefixes is the full merged tree.
  COALESCE_CHECK(blocks.size() == f.heirs.size(),
                 "rehearse: the surviving intervals must be the heirs");
  COALESCE_CHECK(static_cast<int>(collisions.size()) == static_cast<int>(f.ghosts.size()),
                 "rehearse: every ghost needs a collision");
  Performance perf;
  std::set<VertexId> used;
  for (std::size_t h = 0; h < blocks.size(); ++h) {
    COALESCE_CHECK(blocks[h].iv == f.heirs[h],
                   "rehearse: the surviving intervals must be the heirs");
    const Label heir = blocks[h].iv;
    COALESCE_CHECK(c.pi[blocks[h].rep - 1] == rank(heir),
                   "rehearse: a surviving representative must perform its own interval");
    Performance::Tree tree;
    tree.heir = heir;
    tree.root = role_vertex(rank(heir));
    std::set<VertexId> mine;
    for (int j = heir.a; j < heir.b; ++j) {
      const Path& p = c.paths[j - 1];
      const int end =
          prefix_len.count(j) ? prefix_len.at(j) : static_cast<int>(p.size());
      for (int t = 0; t < end; ++t) {
        mine.insert(p[t]);
        if (t + 1 < end) {
          auto [it, fresh] = tree.next.emplace(p[t], p[t + 1]);
          COALESCE_CHECK(it->second == p[t + 1], "rehearse: merged paths must stay merged");
        }
      }
    }
    for (VertexId u : mine)
      COALESCE_CHECK(used.insert(u).second, "rehearse: genealogies must not intersect");
    perf.trees.push_back(std::move(tree));
  }
  perf.ghost_paths = std::move(ghost_paths);
  perf.collisions = std::move(collisions);
  out.success = true;
  out.performance = std::move(perf);
  return out;
}

namespace {

// Follows the tree's successor map from `from` until `to`.
Path tree_walk(const SpacetimeGraph& g, const Performance::Tree& tree, VertexId from,
               VertexId to) {
  Path p{from};
  VertexId u = from;
  while (u != to) {
    COALESCE_CHECK(g.v(u).time < g.v(to).time, "attribute: the genealogy must reach the target");
    auto it = tree.next.find(u);
    COALESCE_CHECK(it != tree.next.end(), "attribute: the genealogy must route the actor onward");
    COALESCE_CHECK(g.v(it->second).time == g.v(u).time + 1,
                   "attribute: genealogy steps must advance one slice");
    u = it->second;
    p.push_back(u);
  }
  return p;
}

}  // namespace

Casting attribute(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f,
                  const Performance& p) {
  const int n = f.n;
  if (static_cast<int>(xs.size()) != n)
    throw std::invalid_argument("attribute: one source per actor is required");
  if (!f.positioned()) throw std::invalid_argument("attribute: the final state needs positions");

  COALESCE_CHECK(p.trees.size() == f.heirs.size(), "attribute: one tree per heir");
  std::map<Label, const Performance::Tree*> tree_of;
  for (std::size_t h = 0; h < p.trees.size(); ++h) {
    COALESCE_CHECK(p.trees[h].heir == f.heirs[h], "attribute: trees must follow the heirs");
    COALESCE_CHECK(p.trees[h].root == g.vertex(f.position(p.trees[h].heir), g.T),
                   "attribute: a tree must be rooted at its heir's final position");
    tree_of[p.trees[h].heir] = &p.trees[h];
  }
  COALESCE_CHECK(p.collisions.size() == f.ghosts.size() &&
                     p.ghost_paths.size() == f.ghosts.size(),
                 "attribute: one collision and one ghost path per ghost");
  for (int gj : f.ghosts) {
    auto cit = p.collisions.find(gj);
    auto git = p.ghost_paths.find(gj);
    COALESCE_CHECK(cit != p.collisions.end() && git != p.ghost_paths.end(),
                   "attribute: one collision and one ghost path per ghost");
    COALESCE_CHECK(!git->second.empty() && git->second.front() == cit->second,
                   "attribute: a ghost path must start at its collision");
    COALESCE_CHECK(git->second.back() == g.vertex(f.position(Label::junction(gj)), g.T),
                   "attribute: a ghost path must end at the ghost's final position");
  }

  // Collisions happen in order of time, then space, then junction label.
  std::vector<int> events(f.ghosts.begin(), f.ghosts.end());
  std::sort(events.begin(), events.end(), [&](int a, int b) {
    const Vertex& va = g.v(p.collisions.at(a));
    const Vertex& vb = g.v(p.collisions.at(b));
    return std::tie(va.time, va.space, a) < std::tie(vb.time, vb.space, b);
  });

  struct Block {
    Label iv;
    int carrier;  // the actor still due a role from this interval
  };
  std::vector<Block> blocks;
  for (int j = 1; j <= n; ++j) blocks.push_back({Label::interval(j, j + 1), j});

  std::vector<int> rank_of_actor(n + 1, 0);
  for (int gj : events) {
    int idx = -1;
    for (int i = 0; i + 1 < static_cast<int>(blocks.size()); ++i)
      if (blocks[i].iv.b == gj && blocks[i + 1].iv.a == gj) {
        idx = i;
        break;
      }
    COALESCE_CHECK(idx >= 0, "attribute: a collision must merge two adjacent intervals");
    // A right-signed ghost is performed from the right interval, a
    // left-signed one from the left.
    const bool from_right = ghost_sign(f, gj) > 0;
    const int ghost_actor = from_right ? blocks[idx + 1].carrier : blocks[idx].carrier;
    const int heir_carrier = from_right ? blocks[idx].carrier : blocks[idx + 1].carrier;
    rank_of_actor[ghost_actor] = gj;
    blocks[idx].iv = Label::interval(blocks[idx].iv.a, blocks[idx + 1].iv.b);
    blocks[idx].carrier = heir_carrier;
    blocks.erase(blocks.begin() + idx + 1);
  }
  COALESCE_CHECK(blocks.size() == f.heirs.size(),
                 "attribute: the surviving intervals must be the heirs");
  for (std::size_t h = 0; h < blocks.size(); ++h) {
    COALESCE_CHECK(blocks[h].iv == f.heirs[h],
                   "attribute: the surviving intervals must be the heirs");
    rank_of_actor[blocks[h].carrier] = rank(blocks[h].iv);
  }

  const std::vector<Label> roles = roles_in_rank_order(f.n, f.ghosts);
  Casting out;
  out.pi.resize(n);
  out.paths.resize(n);
  for (int j = 1; j <= n; ++j) {
    const int r = rank_of_actor[j];
    COALESCE_CHECK(r >= 1 && r <= n, "attribute: every actor needs a role");
    out.pi[j - 1] = r;
    const Label role = roles[r - 1];
    if (role.is_junction()) {
      const Performance::Tree& tree = *tree_of.at(heir_of(f.n, f.ghosts, role.a));
      Path walk = tree_walk(g, tree, xs[j - 1], p.collisions.at(role.a));
      const Path& tail = p.ghost_paths.at(role.a);
      walk.insert(walk.end(), tail.begin() + 1, tail.end());
      out.paths[j - 1] = std::move(walk);
    } else {
      const Performance::Tree& tree = *tree_of.at(role);
      out.paths[j - 1] = tree_walk(g, tree, xs[j - 1], tree.root);
    }
  }
  COALESCE_CHECK(is_candidate(f, out.pi), "attribute: the reconstruction must be a candidate");
  return out;
}

Casting involution(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f,
                   const Casting& c, Extension ext) {
  RehearsalOutcome r = rehearse(g, xs, f, c, ext);
  return r.success ? c : r.partner;
}

bool no_ghosts_allowed_check(int n, const std::vector<int>& ghosts) {
  if (n < 1 || n > 10)
    throw std::invalid_argument("no_ghosts_allowed_check: supported for 1 <= n <= 10");
  const std::vector<Label> heirs = heir_set(n, ghosts);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);  // perm[j-1] = rank performed by actor j
  std::vector<std::vector<int>> satisfying;
  do {
    std::vector<int> performer(n + 1, 0);
    for (int j = 1; j <= n; ++j) performer[perm[j - 1]] = j;

    bool ok = true;
    int prev = 0;
    for (const Label& h : heirs) {  // heirs performed left to right
      const int jh = performer[rank(h)];
      if (jh <= prev) {
        ok = false;
        break;
      }
      prev = jh;
    }
    if (ok)
      for (int gj : ghosts) {
        const int jg = performer[gj];
        const int jh = performer[rank(heir_of(n, ghosts, gj))];
        // The ghost's performer must sit between the junction and the heir's
        // performer, on one side or the other.
        const bool from_right = gj <= jg && jg < jh;
        const bool from_left = jh < jg && jg < gj;
        if (!from_right && !from_left) {
          ok = false;
          break;
        }
      }
    if (ok) satisfying.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (ghosts.empty()) {
    std::vector<int> identity(n);
    std::iota(identity.begin(), identity.end(), 1);
    return satisfying.size() == 1 && satisfying.front() == identity;
  }
  return satisfying.empty();
}

}  // namespace coalesce
