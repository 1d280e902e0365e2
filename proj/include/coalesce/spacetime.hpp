#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coalesce/rational.hpp"

namespace coalesce {

// Recipe for a time-graded weighted DAG on a one-dimensional space.
//   checkerboard-srw : x+t even, steps +-1, weight 1/2 each (no parameters)
//   birth-death      : x+t even, step +1 weight p_up, step -1 weight p_down
//                      (p_up + p_down = 1)
//   ne-lattice       : all x, step 0 weight `north`, step +1 weight `east`
//                      (default 1 each: path counting)
//   custom           : explicit edge list, one time layer per edge
struct ModelSpec {
  std::string kind;
  int T = 0;
  int window_lo = 0;
  int window_hi = 0;
  std::vector<int> sources;  // space coordinates at time 0, strictly increasing
  std::map<std::string, Rat> parameters;

  struct CustomEdge {
    int from_space = 0;
    int from_time = 0;
    int to_space = 0;  // head sits at from_time + 1
    Rat w;
  };
  std::vector<CustomEdge> custom_edges;
};

using VertexId = int;

struct Vertex {
  int space = 0;
  int time = 0;
};

struct HalfEdge {
  VertexId to;  // head for out-edges, tail for in-edges
  Rat w;
};

// Linear extensions of the reachability order used to serialize events.
// TimeSpace always works (edges advance time); SpaceTime is validated
// per graph and rejected where some edge decreases space.
enum class Extension { TimeSpace, SpaceTime };

struct SpacetimeGraph {
  int T = 0;
  std::vector<Vertex> verts;  // sorted by (time, space); VertexId = index
  std::vector<std::vector<HalfEdge>> out;
  std::vector<std::vector<HalfEdge>> in;
  std::map<std::pair<int, int>, VertexId> index;  // (time, space) -> id
  std::vector<VertexId> sources;

  bool has_vertex(int space, int time) const;
  VertexId vertex(int space, int time) const;  // throws when absent
  const Vertex& v(VertexId id) const { return verts[id]; }
  std::vector<VertexId> slice(int time) const;  // space-ascending
};

// Expands the recipe into the reachable graph. Errors: unknown kind, bad or
// missing parameters, negative weights, sources off the lattice or out of
// order, and a window that clips some vertex reachable within T steps.
SpacetimeGraph build_model(const ModelSpec& spec);

bool extension_valid(const SpacetimeGraph& g, Extension ext);
bool linear_less(const SpacetimeGraph& g, VertexId u, VertexId v, Extension ext);

// A directed path as a vertex list; a single vertex is the empty path
// (weight 1). Consecutive entries must be joined by edges.
using Path = std::vector<VertexId>;

Rat edge_weight(const SpacetimeGraph& g, VertexId from, VertexId to);  // throws if absent
Rat path_weight(const SpacetimeGraph& g, const Path& p);

// Forward DP table: entry v holds the sum over directed paths src -> v of
// the product of edge weights.
std::vector<Rat> forward_weights(const SpacetimeGraph& g, VertexId src);

Rat path_weight_sum(const SpacetimeGraph& g, VertexId x, VertexId y);

// All directed paths x -> y, in a deterministic order. Throws when more than
// `cap` paths exist.
std::vector<Path> enumerate_paths(const SpacetimeGraph& g, VertexId x, VertexId y,
                                  std::size_t cap);

struct PlanarityReport {
  bool crossing_property = true;        // order-swapped path pairs must share a vertex
  bool consecutive_collision = true;    // middle particle cannot be bypassed
  std::string counterexample;           // empty when both hold
};

// Exhaustive path-level check of the two planarity properties over the given
// source/target vertex lists (both space-ascending).
PlanarityReport check_planarity(const SpacetimeGraph& g, const std::vector<VertexId>& sources,
                                const std::vector<VertexId>& targets, std::size_t cap);

// End-of-horizon distribution of one walker: pmf(y) equals the path-weight
// sum from (source, 0) to (y, T). Computed by a slice DP straight off the
// ModelSpec so large horizons never materialize a graph.
struct SliceKernel {
  int x0 = 0;
  int lo = 0;  // pmf_[i] is the mass at space lo + i
  std::vector<Rat> pmf_;
  std::vector<Rat> cdf_;

  Rat pmf(int y) const;
  Rat cdf(int y) const;  // P(Y <= y)
  // P(a <= Y <= b); an empty bound is an open ray.
  Rat mass(std::optional<int> a, std::optional<int> b) const;
  Rat total() const;
};

SliceKernel transition_kernel(const ModelSpec& spec, int source_space);

}  // namespace coalesce
