#pragma once

#include <map>
#include <optional>
#include <vector>

#include "coalesce/labels.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {

// A candidate bijection together with one path per actor: actor j (1-based)
// walks paths[j-1] from x_j to the final position of the role of rank
// pi[j-1].
struct Casting {
  std::vector<int> pi;
  std::vector<Path> paths;
  bool operator==(const Casting&) const = default;
  bool operator<(const Casting& o) const;  // deterministic container order
};

Rat casting_weight(const SpacetimeGraph& g, const Casting& c);

// A genealogy forest plus ghost trajectories. Each tree is stored
// functionally: tree vertex -> successor toward the root (paths merge and
// never split, so out-degree is at most one).
struct Performance {
  struct Tree {
    Label heir;
    std::map<VertexId, VertexId> next;
    VertexId root = -1;
    bool operator==(const Tree&) const = default;
  };
  std::vector<Tree> trees;             // heirs in rank order
  std::map<int, Path> ghost_paths;     // junction -> path from the collision to y_g
  std::map<int, VertexId> collisions;  // junction -> collision vertex

  bool operator==(const Performance&) const = default;
};

// Product over distinct tree edges and ghost-path edges.
Rat performance_weight(const SpacetimeGraph& g, const Performance& p);

// One rehearsal loop iteration: which adjacent intervals crossed where, and
// whether the crossing was a valid collision or spurious.
struct CrossingCheck {
  Label left;
  Label right;
  int left_rep = 0;   // actors (1-based) whose paths carried the intervals
  int right_rep = 0;
  VertexId vertex = -1;
  bool valid = false;
};

struct RehearsalOutcome {
  bool success = false;
  Performance performance;          // set on success
  Casting partner;                  // set on failure: the segment-swap image
  std::vector<CrossingCheck> log;   // every crossing examined, in order
};

// Exchange the suffixes of the two actors' paths after the shared vertex v
// and transpose their roles.
Casting segment_swap(const Casting& c, int i, int j, VertexId v);

// Earliest shared vertex in the extension order, if the paths meet. (Shared
// vertices of two time-monotone paths form a chain, so the minimum does not
// depend on the extension.)
std::optional<VertexId> first_shared_vertex(const SpacetimeGraph& g, const Path& p,
                                            const Path& q, Extension ext);

// The pairwise involution on castings: swap at the first intersection of the
// two actors' paths when the swapped casting is still a candidate, otherwise
// the identity.
Casting local_involution(const SpacetimeGraph& g, const FinalState& f, const Casting& c, int i,
                         int j, Extension ext = Extension::TimeSpace);

// Runs the casting: processes crossings earliest-first (ties: leftmost
// interval pair), consuming valid collisions until either no crossing
// remains (success: the casting is a performance in disguise) or a spurious
// crossing appears (failure: returns the segment-swap partner).
RehearsalOutcome rehearse(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                          const FinalState& f, const Casting& c,
                          Extension ext = Extension::TimeSpace);

// Reads the casting off a performance: replays collisions in order and
// routes, at each one, the side dictated by the ghost's sign onto the ghost
// trajectory (+1 sends the right interval, -1 the left).
Casting attribute(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f,
                  const Performance& p);

// The global sign-reversing involution: identity on successful castings,
// the rehearsal partner otherwise.
Casting involution(const SpacetimeGraph& g, const std::vector<VertexId>& xs, const FinalState& f,
                   const Casting& c, Extension ext = Extension::TimeSpace);

// Exhaustively verifies that bijections satisfying the heir ordering and the
// ghost sandwich condition force the canonical heir assignment — so none
// exist at all when ghosts are present.
bool no_ghosts_allowed_check(int n, const std::vector<int>& ghosts);

}  // namespace coalesce
