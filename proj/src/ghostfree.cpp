#include "coalesce/ghostfree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "coalesce/check.hpp"
#include "coalesce/ghost_formula.hpp"

namespace coalesce {

namespace {

double magnitude(double x) { return std::fabs(x); }
Rat magnitude(const Rat& x) { return abs(x); }

template <typename F>
F det_impl(std::vector<std::vector<F>>& m) {
  const int n = static_cast<int>(m.size());
  for (const auto& row : m)
    COALESCE_CHECK(static_cast<int>(row.size()) == n, "determinant needs a square matrix");
  F det = F(1);
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != F(0) && (p < 0 || magnitude(m[r][c]) > magnitude(m[p][c]))) p = r;
    if (p < 0) return F(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == F(0)) continue;
      F f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace

Rat determinant(std::vector<std::vector<Rat>> m) { return det_impl(m); }

double determinant(std::vector<std::vector<double>> m) { return det_impl(m); }

std::vector<SliceKernel> model_kernels(const ModelSpec& spec) {
  std::vector<SliceKernel> out;
  out.reserve(spec.sources.size());
  for (int s : spec.sources) out.push_back(transition_kernel(spec, s));
  return out;
}

std::vector<std::vector<Rat>> build_coalescence_matrix(const std::vector<SliceKernel>& kernels,
                                                       const FinalState& f) {
  if (static_cast<int>(kernels.size()) != f.n)
    throw std::invalid_argument("marginal: one kernel per actor is required");
  for (const SliceKernel& k : kernels)
    if (k.total() != rat(1))
      throw std::invalid_argument("marginal: the model must be stochastic");

  const std::vector<Label> roles = roles_in_rank_order(f.n, f.ghosts);
  std::vector<std::vector<Rat>> m(f.n, std::vector<Rat>(f.n));
  for (int i = 1; i <= f.n; ++i)
    for (int r = 1; r <= f.n; ++r) {
      const Label& role = roles[r - 1];
      if (role.is_interval()) {
        m[i - 1][r - 1] = kernels[i - 1].pmf(f.position(role));
      } else {
        const int yh = f.position(heir_of(f.n, f.ghosts, role.a));
        Rat v = kernels[i - 1].cdf(yh);
        if (i < role.a) v -= rat(1);
        m[i - 1][r - 1] = v;
      }
    }
  return m;
}

Rat heir_mass(const std::vector<SliceKernel>& kernels, const FinalState& f) {
  return determinant(build_coalescence_matrix(kernels, f));
}

namespace {

// Clips a box to the union of the kernels' supports; returns false when the
// result is empty.
bool clip(const std::vector<SliceKernel>& kernels, const RoleBounds& b, int& lo, int& hi) {
  int klo = kernels.front().lo;
  int khi = kernels.front().lo + static_cast<int>(kernels.front().pmf_.size()) - 1;
  for (const SliceKernel& k : kernels) {
    klo = std::min(klo, k.lo);
    khi = std::max(khi, k.lo + static_cast<int>(k.pmf_.size()) - 1);
  }
  lo = b.lo ? std::max(*b.lo, klo) : klo;
  hi = b.hi ? std::min(*b.hi, khi) : khi;
  return lo <= hi;
}

}  // namespace

Rat heir_box_probability(const std::vector<SliceKernel>& kernels, int n,
                         const std::vector<int>& ghosts, const std::vector<RoleBounds>& boxes) {
  const std::vector<Label> heirs = heir_set(n, ghosts);
  if (boxes.size() != heirs.size())
    throw std::invalid_argument("marginal: one box per heir is required");

  const int k = static_cast<int>(heirs.size());
  std::vector<int> los(k), his(k);
  for (int i = 0; i < k; ++i)
    if (!clip(kernels, boxes[i], los[i], his[i])) return rat(0);

  Rat total = rat(0);
  std::vector<int> ys(k);
  // Ordered tuples y_0 < y_1 < ... within the boxes.
  auto rec = [&](auto&& self, int i) -> void {
    if (i == k) {
      total += heir_mass(kernels, make_heir_state(n, ghosts, ys));
      return;
    }
    const int base = i > 0 ? std::max(ys[i - 1] + 1, los[i]) : los[i];
    for (int y = base; y <= his[i]; ++y) {
      ys[i] = y;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return total;
}

Rat permuted_set_probability(const std::vector<SliceKernel>& kernels, int n,
                             const std::vector<int>& ghosts,
                             const std::map<Label, RoleBounds>& boxes) {
  if (static_cast<int>(kernels.size()) != n)
    throw std::invalid_argument("permuted-set: one kernel per actor is required");
  for (const SliceKernel& k : kernels)
    if (k.total() != rat(1))
      throw std::invalid_argument("permuted-set: the model must be stochastic");

  const std::vector<Label> roles = roles_in_rank_order(n, ghosts);
  for (const auto& [role, b] : boxes)
    if (std::find(roles.begin(), roles.end(), role) == roles.end())
      throw std::invalid_argument("permuted-set: box given for a label that is not a role");
  std::map<Label, std::pair<int, int>> clipped;
  for (const Label& role : roles) {
    auto it = boxes.find(role);
    if (it == boxes.end())
      throw std::invalid_argument("permuted-set: every role needs a box");
    int lo, hi;
    if (!clip(kernels, it->second, lo, hi)) return rat(0);
    clipped[role] = {lo, hi};
  }

  // Heir boxes must be strictly separated left to right, so every position
  // combination is an ordered heir tuple.
  const std::vector<Label> heirs = heir_set(n, ghosts);
  for (std::size_t i = 0; i + 1 < heirs.size(); ++i)
    if (clipped[heirs[i]].second >= clipped[heirs[i + 1]].first)
      throw std::invalid_argument("permuted-set: heir boxes must be strictly separated");

  // Each ghost box must sit entirely on one side of its heir's box; the side
  // fixes the ghost's sign across the whole event.
  std::map<int, int> signs;
  for (int g : ghosts) {
    const auto& [glo, ghi] = clipped[Label::junction(g)];
    const auto& [hlo, hhi] = clipped[heir_of(n, ghosts, g)];
    if (ghi <= hlo)
      signs[g] = +1;  // weakly left: ties count as +1
    else if (glo > hhi)
      signs[g] = -1;
    else
      throw std::invalid_argument(
          "permuted-set: a ghost box must sit on one side of its heir's box");
  }

  const FinalState f = make_state_signed(n, ghosts, signs);
  Rat total = rat(0);
  for (const std::vector<int>& pi : candidate_bijections(f)) {
    Rat term = rat(perm_sign(pi));
    for (int j = 1; j <= n; ++j) {
      const auto& [lo, hi] = clipped.at(roles[pi[j - 1] - 1]);
      term *= kernels[j - 1].mass(lo, hi);
    }
    total += term;
  }
  return rat(state_sign(f)) * total;
}

// --- Brownian limit --------------------------------------------------------

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double BrownianKernel::density(double y) const {
  const double d = y - x0;
  return std::exp(-d * d / (2.0 * T)) / std::sqrt(2.0 * std::numbers::pi * T);
}

double BrownianKernel::cdf(double y) const { return gaussian_cdf((y - x0) / std::sqrt(T)); }

double brownian_heir_density(const std::vector<BrownianKernel>& kernels,
                             const std::vector<int>& ghosts, const std::vector<double>& heir_y) {
  const int n = static_cast<int>(kernels.size());
  const std::vector<Label> heirs = heir_set(n, ghosts);
  if (heir_y.size() != heirs.size())
    throw std::invalid_argument("brownian: one position per heir is required");
  std::map<int, double> y_of_rank;
  for (std::size_t i = 0; i < heirs.size(); ++i) y_of_rank[rank(heirs[i])] = heir_y[i];

  const std::vector<Label> roles = roles_in_rank_order(n, ghosts);
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (int i = 1; i <= n; ++i)
    for (int r = 1; r <= n; ++r) {
      const Label& role = roles[r - 1];
      if (role.is_interval()) {
        m[i - 1][r - 1] = kernels[i - 1].density(y_of_rank.at(rank(role)));
      } else {
        const double yh = y_of_rank.at(rank(heir_of(n, ghosts, role.a)));
        m[i - 1][r - 1] = kernels[i - 1].cdf(yh) - (i < role.a ? 1.0 : 0.0);
      }
    }
  return determinant(std::move(m));
}

namespace {

// Classic adaptive Simpson on [a, b].
template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double m, double fm, double b, double fb,
                        double whole, double tol, int depth, long long& evals) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, evals) +
         adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, evals);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol, long long& evals) {
  if (a >= b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  evals += 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 40, evals);
}

}  // namespace

Quadrature brownian_ordered_integral(const std::vector<BrownianKernel>& kernels,
                                     const std::vector<int>& ghosts, double lo, double hi,
                                     double tol) {
  const int n = static_cast<int>(kernels.size());
  const int k = static_cast<int>(heir_set(n, ghosts).size());
  Quadrature q;
  std::vector<double> ys(k);
  // dimension i integrates over (ys[i-1], hi); the innermost level evaluates
  // the density itself. Inner levels run much tighter than the outer ones:
  // their noise enters every sample above them.
  auto level = [&](auto&& self, int i, double floor) -> double {
    auto f = [&](double y) -> double {
      ys[i] = y;
      if (i + 1 == k) return brownian_heir_density(kernels, ghosts, ys);
      return self(self, i + 1, y);
    };
    double level_tol = tol / static_cast<double>(k);
    for (int j = 0; j < i; ++j) level_tol *= 1e-3;
    return integrate(f, floor, hi, level_tol, q.evaluations);
  };
  q.value = level(level, 0, lo);
  return q;
}

}  // namespace coalesce
