#pragma once

#include <map>
#include <optional>
#include <vector>

#include "coalesce/labels.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {

// Exact determinant by Gaussian elimination.
Rat determinant(std::vector<std::vector<Rat>> m);
double determinant(std::vector<std::vector<double>> m);

// One arrival kernel per actor, in actor order.
std::vector<SliceKernel> model_kernels(const ModelSpec& spec);

// The ghost-free marginal matrix: one row per actor, columns in rank order.
// A heir column holds each actor's arrival mass at the heir's position; a
// ghost column holds the actor's distribution function at the position of
// the ghost's heir, shifted down by one for actors left of the junction.
// Needs heir positions only. Requires a stochastic model.
std::vector<std::vector<Rat>> build_coalescence_matrix(const std::vector<SliceKernel>& kernels,
                                                       const FinalState& f);

// P(pattern = f.ghosts and every heir lands on its position): ghosts are
// marginalized away by the matrix above.
Rat heir_mass(const std::vector<SliceKernel>& kernels, const FinalState& f);

// A position range; an empty bound means unbounded on that side.
struct RoleBounds {
  std::optional<int> lo, hi;
};

// Sums heir_mass over every ordered tuple of heir positions inside the
// boxes (one box per heir, rank order).
Rat heir_box_probability(const std::vector<SliceKernel>& kernels, int n,
                         const std::vector<int>& ghosts, const std::vector<RoleBounds>& boxes);

// P(pattern = ghosts and every role ends inside its box) as a signed sum of
// box-mass products over the candidate bijections. Admissibility: heir boxes
// strictly separated left to right; each ghost box entirely on one side of
// its own heir's box. Throws std::invalid_argument otherwise.
Rat permuted_set_probability(const std::vector<SliceKernel>& kernels, int n,
                             const std::vector<int>& ghosts,
                             const std::map<Label, RoleBounds>& boxes);

// --- Brownian limit --------------------------------------------------------

// P(Z <= z) for a standard Gaussian.
double gaussian_cdf(double z);

struct BrownianKernel {
  double x0 = 0;  // starting point
  double T = 1;   // time horizon (variance)
  double density(double y) const;
  double cdf(double y) const;
};

// det of the marginal matrix with Gaussian entries; heir_y holds the heir
// positions in rank order.
double brownian_heir_density(const std::vector<BrownianKernel>& kernels,
                             const std::vector<int>& ghosts, const std::vector<double>& heir_y);

struct Quadrature {
  double value = 0;
  long long evaluations = 0;
};

// Integral of the heir density over lo < y_1 < ... < y_k < hi by nested
// adaptive Simpson quadrature.
Quadrature brownian_ordered_integral(const std::vector<BrownianKernel>& kernels,
                                     const std::vector<int>& ghosts, double lo, double hi,
                                     double tol);

}  // namespace coalesce
