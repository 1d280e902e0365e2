#include "coalesce/ghost_formula.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "coalesce/check.hpp"

namespace coalesce {

namespace {

// Final-slice vertex for each role, in rank order.
std::vector<VertexId> role_vertices(const SpacetimeGraph& g, const FinalState& f) {
  COALESCE_CHECK(f.positioned(), "state needs positions for every role");
  std::vector<VertexId> ys;
  for (const Label& role : roles_in_rank_order(f.n, f.ghosts))
    ys.push_back(g.vertex(f.position(role), g.T));
  return ys;
}

std::vector<std::vector<Rat>> weight_rows(const SpacetimeGraph& g,
                                          const std::vector<VertexId>& xs,
                                          const std::vector<VertexId>& ys) {
  std::vector<std::vector<Rat>> w(xs.size(), std::vector<Rat>(ys.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto table = forward_weights(g, xs[j]);
    for (std::size_t r = 0; r < ys.size(); ++r) w[j][r] = table[ys[r]];
  }
  return w;
}

}  // namespace

GhostMatrix build_ghost_matrix(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                               const FinalState& f) {
  COALESCE_CHECK(static_cast<int>(xs.size()) == f.n, "one source per actor");
  GhostMatrix m;
  m.n = f.n;
  m.roles = roles_in_rank_order(f.n, f.ghosts);
  const auto ys = role_vertices(g, f);
  const auto w = weight_rows(g, xs, ys);
  m.entry.assign(f.n, std::vector<GhostEntry>(f.n));
  for (int j = 1; j <= f.n; ++j)
    for (int c = 0; c < f.n; ++c) {
      const Label& role = m.roles[c];
      if (role.is_interval()) {
        m.entry[j - 1][c] = {w[j - 1][c], 0, 0};
      } else {
        const int gj = role.a;
        if (j >= gj)
          m.entry[j - 1][c] = {w[j - 1][c], gj, +1};
        else
          m.entry[j - 1][c] = {-w[j - 1][c], gj, -1};
      }
    }
  return m;
}

int source_sign(int g, const std::vector<int>& pi) {
  for (int j = 1; j <= static_cast<int>(pi.size()); ++j)
    if (pi[j - 1] == g) return j >= g ? +1 : -1;
  COALESCE_CHECK(false, "no performer for rank " + std::to_string(g));
  return 0;
}

int perm_sign(const std::vector<int>& pi) {
  int inv = 0;
  for (std::size_t i = 0; i < pi.size(); ++i)
    for (std::size_t j = i + 1; j < pi.size(); ++j)
      if (pi[i] > pi[j]) ++inv;
  return inv % 2 == 0 ? +1 : -1;
}

bool is_candidate(const FinalState& f, const std::vector<int>& pi) {
  COALESCE_CHECK(static_cast<int>(pi.size()) == f.n, "bijection size must be n");
  for (int g : f.ghosts)
    if (source_sign(g, pi) != ghost_sign(f, g)) return false;
  return true;
}

std::vector<std::vector<int>> candidate_bijections(const FinalState& f) {
  std::vector<int> pi(f.n);
  std::iota(pi.begin(), pi.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    if (is_candidate(f, pi)) out.push_back(pi);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

Rat coalescence_Z(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f) {
  COALESCE_CHECK(static_cast<int>(xs.size()) == f.n, "one source per actor");
  const auto ys = role_vertices(g, f);
  const auto w = weight_rows(g, xs, ys);
  Rat sum = rat(0);
  for (const auto& pi : candidate_bijections(f)) {
    Rat term = rat(perm_sign(pi));
    for (int j = 1; j <= f.n; ++j) term *= w[j - 1][pi[j - 1] - 1];
    sum += term;
  }
  return rat(state_sign(f)) * sum;
}

std::map<Monomial, Rat> expand_ghost_det(const GhostMatrix& m) {
  const int n = m.n;
  std::size_t ghost_cols = 0;
  for (const Label& role : m.roles)
    if (role.is_junction()) ++ghost_cols;

  std::map<Monomial, Rat> poly;
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  do {
    Rat coef = rat(1);
    Monomial mono;
    for (int r = 0; r < n; ++r) {
      const GhostEntry& e = m.entry[r][cols[r]];
      coef *= e.coef;
      if (e.g != 0) mono.emplace_back(e.g, e.sign);
    }
    // structural support check: one variable per ghost column, no repeats
    COALESCE_CHECK(mono.size() == ghost_cols, "term must carry one variable per ghost");
    std::sort(mono.begin(), mono.end());
    for (std::size_t i = 0; i + 1 < mono.size(); ++i)
      COALESCE_CHECK(mono[i].first != mono[i + 1].first, "repeated ghost variable in a term");
    std::vector<int> as_pi(cols.begin(), cols.end());
    poly[mono] += rat(perm_sign(as_pi)) * coef;
  } while (std::next_permutation(cols.begin(), cols.end()));

  return poly;
}

Rat symbolic_Z(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f) {
  if (f.n > 8)
    throw std::invalid_argument("symbolic route is capped at n <= 8 (full Leibniz expansion)");
  const GhostMatrix m = build_ghost_matrix(g, xs, f);
  const auto poly = expand_ghost_det(m);
  Monomial target;
  for (int gj : f.ghosts) target.emplace_back(gj, ghost_sign(f, gj));
  std::sort(target.begin(), target.end());
  auto it = poly.find(target);
  return it == poly.end() ? rat(0) : it->second;
}

}  // namespace coalesce
