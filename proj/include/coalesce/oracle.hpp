#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "coalesce/involution.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {

// Every candidate bijection paired with every tuple of actor trajectories
// landing on the assigned roles. Throws std::length_error past `cap`.
std::vector<Casting> enumerate_castings(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                                        const FinalState& f, std::size_t cap = 1000000);

// Every genealogy forest plus ghost trajectories compatible with the final
// state: per heir, member paths that join and stay joined, clusters forming
// contiguous runs of actors, genealogies of distinct heirs vertex-disjoint;
// ghosts walk freely from their collisions. Throws std::length_error past
// `cap`.
std::vector<Performance> enumerate_performances(const SpacetimeGraph& g,
                                                const std::vector<VertexId>& xs,
                                                const FinalState& f, std::size_t cap = 1000000);

// Distribution of the coalescing system started from xs (which must sit on
// the first slice, strictly ordered): particles move together once they
// meet. Key: (dissolved junctions, surviving positions left to right).
// Requires a stochastic model; throws std::invalid_argument otherwise.
std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> interacting_distribution(
    const SpacetimeGraph& g, const std::vector<VertexId>& xs);

// As above, but every collision also releases an independent ghost walker
// from the collision vertex. Key: (dissolved junctions, positions of all n
// roles in rank order).
std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> coupled_distribution(
    const SpacetimeGraph& g, const std::vector<VertexId>& xs);

struct LgvCount {
  Rat total;               // summed weight of the disjoint tuples
  long long tuples = 0;    // how many there were
};

// Direct enumeration of pairwise vertex-disjoint path tuples x_i -> y_i.
LgvCount lgv_enumerate(const SpacetimeGraph& g, const std::vector<VertexId>& xs,
                       const std::vector<VertexId>& ys, std::size_t cap = 1000000);

}  // namespace coalesce
