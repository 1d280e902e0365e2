#pragma once

#include <map>
#include <string>
#include <vector>

namespace coalesce {

// A label is either a closed integer interval [a,b] (one of the initial
// particles I_j = [j, j+1], or a merged block of them) or a single junction
// point g in {2..n} — a dissolved meeting point between neighbours. Ghost
// roles carry junction labels, heir roles carry interval labels.
struct Label {
  int a = 0;
  int b = 0;  // junction <=> a == b == g

  static Label interval(int lo, int hi);
  static Label junction(int g);
  bool is_junction() const { return a == b; }
  bool is_interval() const { return a < b; }

  friend bool operator==(const Label&, const Label&) = default;
  // lexicographic; only for use as a container key (see label_less for the
  // semantic order)
  friend auto operator<=>(const Label&, const Label&) = default;
};

std::string label_str(const Label& l);

// A junction ranks as itself, an interval as its left endpoint. On the role
// set of any final state the ranks are exactly {1..n}.
int rank(const Label& l);

// The left-to-right label order: [a,b] comes before g iff b <= g, g before
// [a,b] iff g <= a, intervals compare by disjointness (b <= c), junctions as
// integers. Returns false on equal or incomparable pairs (a junction strictly
// inside an interval). Distinct properly-overlapping intervals cannot coexist
// and signal a usage error.
bool label_less(const Label& x, const Label& y);
bool label_leq(const Label& x, const Label& y);
bool label_comparable(const Label& x, const Label& y);

// Final state of the interacting system: which junctions dissolved (ghosts)
// and where every surviving entity sits on the final slice. Positions may be
// absent (sign-only state) for the marginal computations that integrate the
// ghosts out.
struct FinalState {
  int n = 0;
  std::vector<int> ghosts;         // sorted subset of {2..n}
  std::vector<Label> heirs;        // computed from (n, ghosts); rank order
  std::map<Label, int> positions;  // role -> space coordinate on the final slice
  std::map<int, int> signs;        // ghost -> +1 (ends weakly left of heir) / -1

  bool positioned() const { return static_cast<int>(positions.size()) == n; }
  int position(const Label& role) const;  // throws if absent
};

// The initial particle labels I_1..I_n.
std::vector<Label> actors(int n);

// Maximal intervals of [1, n+1] whose interior junctions all dissolved:
// cut [1, n+1] at the surviving junctions. Rank order.
std::vector<Label> heir_set(int n, const std::vector<int>& ghosts);

// The unique heir [a,b] with a < g < b.
Label heir_of(int n, const std::vector<int>& ghosts, int g);

// Heirs and ghosts merged into one list, sorted by rank; each heir is
// followed immediately by the ghosts attached to it.
std::vector<Label> roles_in_rank_order(int n, const std::vector<int>& ghosts);

// Builds a positioned state; derives ghost signs (ties count as +1) and
// validates that heir positions strictly increase in rank order.
FinalState make_state(int n, std::vector<int> ghosts, const std::map<Label, int>& positions);

// Builds a sign-only state (no positions).
FinalState make_state_signed(int n, std::vector<int> ghosts, const std::map<int, int>& signs);

// Builds a state with heir positions only (rank order); ghosts stay free, so
// neither their positions nor their signs are set.
FinalState make_heir_state(int n, std::vector<int> ghosts, const std::vector<int>& heir_positions);

int ghost_sign(const FinalState& f, int g);

// Product of the ghost signs; +1 for the ghost-free state.
int state_sign(const FinalState& f);

}  // namespace coalesce
