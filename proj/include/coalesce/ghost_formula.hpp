#pragma once

#include <map>
#include <utility>
#include <vector>

#include "coalesce/labels.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {

// One matrix entry: coef * t_g^sign. Heir-column entries carry no formal
// variable (g = 0, sign = 0).
struct GhostEntry {
  Rat coef;
  int g = 0;
  int sign = 0;
};

struct GhostMatrix {
  int n = 0;
  std::vector<Label> roles;                     // columns, rank order
  std::vector<std::vector<GhostEntry>> entry;   // [actor row][role column]
};

// Rows are the actors in label order, columns the roles in rank order. An
// heir column holds the path-weight sums W(x_I -> y_H). The ghost column of
// junction g splits: +W(x_I -> y_g) t_g+ in rows I_j with j >= g and
// -W(x_I -> y_g) t_g- in rows with j < g.
GhostMatrix build_ghost_matrix(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                               const FinalState& f);

// +1 when ghost g's performer sits weakly right of the junction (j >= g),
// -1 when strictly left. pi maps actor j (1-based) to the rank pi[j-1].
int source_sign(int g, const std::vector<int>& pi);

int perm_sign(const std::vector<int>& pi);

// A bijection is a candidate when every ghost's source sign matches the
// ghost's final-position sign.
bool is_candidate(const FinalState& f, const std::vector<int>& pi);

// All candidates, in lexicographic order of the image vectors.
std::vector<std::vector<int>> candidate_bijections(const FinalState& f);

// The exact coalescence probability (generating-function value) by the
// restricted Leibniz expansion over candidate bijections:
//   Z = state_sign * sum_pi sgn(pi) * prod_j W(x_j -> y_{pi(j)}).
Rat coalescence_Z(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f);

// Formal Leibniz expansion of det(ghost matrix). A monomial is the sorted
// list of (junction, sign) variables appearing in a term; every term carries
// exactly one variable per ghost (checked).
using Monomial = std::vector<std::pair<int, int>>;
std::map<Monomial, Rat> expand_ghost_det(const GhostMatrix& m);

// Z as the coefficient of prod_g t_g^{sign(g)} in det(ghost matrix).
// Full n!-term expansion, capped at n <= 8.
Rat symbolic_Z(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f);

}  // namespace coalesce
