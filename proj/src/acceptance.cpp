#include "coalesce/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coalesce/ghost_formula.hpp"
#include "coalesce/ghostfree.hpp"
#include "coalesce/involution.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/oracle.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {
namespace {

struct Instance {
  std::string name;
  ModelSpec spec;
  SpacetimeGraph g;
  std::vector<VertexId> xs;
  std::vector<SliceKernel> kernels;
};

Instance finish_instance(std::string name, ModelSpec spec) {
  Instance inst;
  inst.name = std::move(name);
  inst.spec = std::move(spec);
  inst.g = build_model(inst.spec);
  for (int x : inst.spec.sources) inst.xs.push_back(inst.g.vertex(x, 0));
  inst.kernels = model_kernels(inst.spec);
  return inst;
}

Instance checkerboard_instance(int n, int T) {
  ModelSpec s;
  s.kind = "checkerboard-srw";
  s.T = T;
  for (int j = 0; j < n; ++j) s.sources.push_back(2 * j);
  s.window_lo = -T;
  s.window_hi = 2 * (n - 1) + T;
  return finish_instance("checkerboard n=" + std::to_string(n) + " T=" + std::to_string(T),
                         std::move(s));
}

Instance ne_instance(int n, int T) {
  ModelSpec s;
  s.kind = "ne-lattice";
  s.T = T;
  for (int j = 0; j < n; ++j) s.sources.push_back(j);
  s.window_lo = 0;
  s.window_hi = (n - 1) + T;
  s.parameters["north"] = rat(1, 3);
  s.parameters["east"] = rat(2, 3);
  return finish_instance("ne-lattice n=" + std::to_string(n) + " T=" + std::to_string(T),
                         std::move(s));
}

// The exactness sweep: every coalescence pattern and every final position
// tuple of these instances is checked against the exhaustive oracles.
std::vector<Instance> sweep_grid() {
  std::vector<Instance> grid;
  for (int n : {2, 3})
    for (int T : {2, 3, 4}) grid.push_back(checkerboard_instance(n, T));
  for (int T : {1, 2, 3}) grid.push_back(ne_instance(4, T));
  return grid;
}

std::vector<std::vector<int>> ghost_subsets(int n) {
  std::vector<std::vector<int>> out;
  const int m = n - 1;  // junctions 2..n
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) s.push_back(i + 2);
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<int, int> support_range(const std::vector<SliceKernel>& ks) {
  int lo = ks.front().lo;
  int hi = ks.front().lo + static_cast<int>(ks.front().pmf_.size()) - 1;
  for (const SliceKernel& k : ks) {
    lo = std::min(lo, k.lo);
    hi = std::max(hi, k.lo + static_cast<int>(k.pmf_.size()) - 1);
  }
  return {lo, hi};
}

// The admissible final positions: spaces of the last slice of the reachable
// graph, ascending.
std::vector<int> final_sites(const SpacetimeGraph& g) {
  std::vector<int> out;
  for (VertexId v : g.slice(g.T)) out.push_back(g.v(v).space);
  return out;
}

void increasing_rec(const std::vector<int>& sites, std::size_t from, int k, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < sites.size(); ++i) {
    cur.push_back(sites[i]);
    increasing_rec(sites, i + 1, k, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> increasing_tuples(const std::vector<int>& sites, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  increasing_rec(sites, 0, k, cur, out);
  return out;
}

// Every positioned final state of the instance: every ghost pattern, heir
// positions strictly increasing over the final slice, ghosts anywhere on it.
// Position tuples of probability zero are kept: the identities must hold
// there too (both sides vanish).
std::vector<FinalState> all_states(const Instance& inst) {
  const int n = static_cast<int>(inst.xs.size());
  const auto sites = final_sites(inst.g);
  std::vector<FinalState> out;
  for (const auto& ghosts : ghost_subsets(n)) {
    const auto heirs = heir_set(n, ghosts);
    const int m = static_cast<int>(ghosts.size());
    for (const auto& ys : increasing_tuples(sites, static_cast<int>(heirs.size()))) {
      std::vector<std::size_t> gp(m, 0);
      while (true) {
        std::map<Label, int> pos;
        for (std::size_t i = 0; i < heirs.size(); ++i) pos[heirs[i]] = ys[i];
        for (int i = 0; i < m; ++i) pos[Label::junction(ghosts[i])] = sites[gp[i]];
        out.push_back(make_state(n, ghosts, pos));
        int i = 0;
        while (i < m && gp[i] + 1 == sites.size()) gp[i++] = 0;
        if (i == m) break;
        ++gp[i];
      }
    }
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string state_str(const FinalState& f) {
  std::string s = "ghosts={" + join_ints(f.ghosts) + "}";
  for (const auto& [role, y] : f.positions) s += " " + label_str(role) + "@" + std::to_string(y);
  return s;
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

struct Outcome {
  bool pass = false;
  std::string note;
};

Outcome pass_note(std::string note) { return {true, std::move(note)}; }
Outcome fail_note(std::string note) { return {false, std::move(note)}; }

// --- criterion 1: the two-walker worked example ----------------------------

Outcome worked_two_walkers() {
  const Instance inst = checkerboard_instance(2, 2);
  const Label heir = Label::interval(1, 3);
  const Label ghost = Label::junction(2);

  const FinalState f = make_state(2, {2}, {{heir, 0}, {ghost, 2}});
  if (ghost_sign(f, 2) != -1) return fail_note("ghost at 2 vs heir at 0 should sign -1");

  const Rat z = coalescence_Z(inst.g, inst.xs, f);
  if (z != rat(1, 16)) return fail_note("Z(heir@0, ghost@2) = " + rat_str(z) + ", want 1/16");

  Rat swept = rat(0);
  for (int yg : final_sites(inst.g))
    swept += coalescence_Z(inst.g, inst.xs, make_state(2, {2}, {{heir, 0}, {ghost, yg}}));
  if (swept != rat(3, 16))
    return fail_note("sum over ghost positions = " + rat_str(swept) + ", want 3/16");

  const Rat mass = heir_mass(inst.kernels, make_heir_state(2, {2}, {0}));
  if (mass != rat(3, 16)) return fail_note("heir mass = " + rat_str(mass) + ", want 3/16");

  const auto dist = interacting_distribution(inst.g, inst.xs);
  const auto it = dist.find({{2}, {0}});
  const Rat dp = it == dist.end() ? rat(0) : it->second;
  if (mass != dp)
    return fail_note("heir mass " + rat_str(mass) + " != interacting value " + rat_str(dp));

  return pass_note("Z=1/16, signed ghost sum 3/16 = marginal = dynamics");
}

// --- criterion 2: determinant formula vs performance oracle ----------------

Outcome formula_vs_oracle() {
  long long states = 0;
  const auto grid = sweep_grid();
  for (const Instance& inst : grid) {
    for (const FinalState& f : all_states(inst)) {
      const Rat z = coalescence_Z(inst.g, inst.xs, f);
      const Rat s = symbolic_Z(inst.g, inst.xs, f);
      Rat perf = rat(0);
      for (const Performance& p : enumerate_performances(inst.g, inst.xs, f))
        perf += performance_weight(inst.g, p);
      if (!(z == s && z == perf))
        return fail_note(inst.name + " " + state_str(f) + ": restricted=" + rat_str(z) +
                         " symbolic=" + rat_str(s) + " oracle=" + rat_str(perf));
      ++states;
    }
  }
  return pass_note(std::to_string(states) + " states over " + std::to_string(grid.size()) +
                   " instances, all exact");
}

// --- criterion 3: ghost-free marginal vs interacting dynamics --------------

Outcome marginal_vs_dynamics() {
  long long checks = 0;
  for (const Instance& inst : sweep_grid()) {
    const int n = static_cast<int>(inst.xs.size());
    const auto dist = interacting_distribution(inst.g, inst.xs);
    const auto sites = final_sites(inst.g);
    Rat total = rat(0);
    for (const auto& ghosts : ghost_subsets(n)) {
      const int k = static_cast<int>(heir_set(n, ghosts).size());
      for (const auto& ys : increasing_tuples(sites, k)) {
        const Rat mass = heir_mass(inst.kernels, make_heir_state(n, ghosts, ys));
        const auto it = dist.find({ghosts, ys});
        const Rat want = it == dist.end() ? rat(0) : it->second;
        if (mass != want)
          return fail_note(inst.name + " ghosts={" + join_ints(ghosts) + "} heirs@(" +
                           join_ints(ys) + "): marginal=" + rat_str(mass) +
                           " dynamics=" + rat_str(want));
        total += mass;
        ++checks;
      }
    }
    if (total != rat(1))
      return fail_note(inst.name + ": marginal masses sum to " + rat_str(total) + ", want 1");
  }
  return pass_note(std::to_string(checks) + " marginal values exact, every instance sums to 1");
}

// --- criterion 4: no ghosts = classical disjoint-path determinant ----------

Outcome classical_reduction() {
  long long states = 0;
  for (const Instance& inst : sweep_grid()) {
    const int n = static_cast<int>(inst.xs.size());
    std::vector<std::vector<Rat>> fw;
    for (VertexId x : inst.xs) fw.push_back(forward_weights(inst.g, x));
    const auto heirs = heir_set(n, {});
    for (const auto& ys : increasing_tuples(final_sites(inst.g), n)) {
      std::map<Label, int> pos;
      for (int i = 0; i < n; ++i) pos[heirs[i]] = ys[i];
      const Rat z = coalescence_Z(inst.g, inst.xs, make_state(n, {}, pos));

      std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n, rat(0)));
      std::vector<VertexId> targets;
      for (int j = 0; j < n; ++j) {
        const VertexId v = inst.g.vertex(ys[j], inst.g.T);
        targets.push_back(v);
        for (int i = 0; i < n; ++i) m[i][j] = fw[i][v];
      }
      const Rat det = determinant(m);
      const Rat tuples = lgv_enumerate(inst.g, inst.xs, targets).total;
      if (!(z == det && z == tuples))
        return fail_note(inst.name + " heirs@(" + join_ints(ys) + "): formula=" + rat_str(z) +
                         " determinant=" + rat_str(det) + " tuples=" + rat_str(tuples));
      ++states;
    }
  }
  return pass_note(std::to_string(states) + " ghost-free states match on all three routes");
}

// --- criterion 5: the three-walker worked example ---------------------------

Outcome worked_three_walkers() {
  const Instance inst = checkerboard_instance(3, 3);
  const FinalState f = make_state(3, {2, 3},
                                  {{Label::interval(1, 4), 1},
                                   {Label::junction(2), 1},
                                   {Label::junction(3), 3}});
  if (ghost_sign(f, 2) != 1 || ghost_sign(f, 3) != -1 || state_sign(f) != -1)
    return fail_note("ghost signs should be (+1, -1)");

  auto cands = candidate_bijections(f);
  std::vector<std::vector<int>> want = {{1, 3, 2}, {3, 1, 2}, {3, 2, 1}};
  std::sort(cands.begin(), cands.end());
  if (cands != want) {
    std::string got;
    for (const auto& pi : cands) got += " (" + join_ints(pi) + ")";
    return fail_note("candidate set is" + got + ", want (1,3,2) (3,1,2) (3,2,1)");
  }

  const Rat z = coalescence_Z(inst.g, inst.xs, f);
  if (z != rat(9, 512)) return fail_note("Z = " + rat_str(z) + ", want 9/512");

  const std::vector<int> even_candidate = {3, 1, 2};  // the one with sgn = +1
  long long successes = 0, even_family = 0;
  for (const Casting& c : enumerate_castings(inst.g, inst.xs, f)) {
    const RehearsalOutcome out = rehearse(inst.g, inst.xs, f, c);
    if (out.success) {
      ++successes;
      if (perm_sign(c.pi) != -1)
        return fail_note("successful casting with sign +1 at pi=(" + join_ints(c.pi) + ")");
      continue;
    }
    if (c.pi != even_candidate) continue;
    ++even_family;
    const Casting& partner = out.partner;
    if (perm_sign(partner.pi) != -1)
      return fail_note("pairing does not reverse the sign");
    if (casting_weight(inst.g, partner) != casting_weight(inst.g, c))
      return fail_note("pairing does not preserve the weight");
    const RehearsalOutcome back = rehearse(inst.g, inst.xs, f, partner);
    if (back.success || !(back.partner == c))
      return fail_note("pairing is not an involution on the even family");
  }
  const auto perfs = enumerate_performances(inst.g, inst.xs, f);
  if (successes != static_cast<long long>(perfs.size()))
    return fail_note("fixed points " + std::to_string(successes) + " vs performances " +
                     std::to_string(perfs.size()));
  if (even_family == 0) return fail_note("the even candidate family is empty");

  return pass_note("3 candidates, " + std::to_string(successes) +
                   " fixed points all of sign -1, even family of " +
                   std::to_string(even_family) + " fully paired");
}

// --- criterion 6: involution audit ------------------------------------------

Outcome involution_audit() {
  long long castings = 0, states = 0;
  for (const Instance& inst : sweep_grid()) {
    for (const FinalState& f : all_states(inst)) {
      const auto casts = enumerate_castings(inst.g, inst.xs, f);
      const auto perfs = enumerate_performances(inst.g, inst.xs, f);
      const std::string where = inst.name + " " + state_str(f);

      Rat signed_all = rat(0), signed_fixed = rat(0);
      long long successes = 0;
      for (const Casting& c : casts) {
        const Rat w = rat(perm_sign(c.pi)) * casting_weight(inst.g, c);
        signed_all += w;
        const RehearsalOutcome out = rehearse(inst.g, inst.xs, f, c);
        for (const CrossingCheck& chk : out.log)
          if (chk.left.b != chk.right.a)
            return fail_note(where + ": crossing between non-adjacent intervals " +
                             label_str(chk.left) + " and " + label_str(chk.right));
        if (out.success) {
          ++successes;
          signed_fixed += w;
          if (!(attribute(inst.g, inst.xs, f, out.performance) == c))
            return fail_note(where + ": attribution does not invert a successful rehearsal");
        } else {
          if (perm_sign(out.partner.pi) != -perm_sign(c.pi))
            return fail_note(where + ": pairing does not reverse the sign");
          if (casting_weight(inst.g, out.partner) != casting_weight(inst.g, c))
            return fail_note(where + ": pairing does not preserve the weight");
          const RehearsalOutcome back = rehearse(inst.g, inst.xs, f, out.partner);
          if (back.success || !(back.partner == c))
            return fail_note(where + ": involution is not self-inverse");
        }
      }
      if (successes != static_cast<long long>(perfs.size()))
        return fail_note(where + ": " + std::to_string(successes) + " fixed points vs " +
                         std::to_string(perfs.size()) + " performances");
      for (const Performance& p : perfs) {
        const RehearsalOutcome out = rehearse(inst.g, inst.xs, f, attribute(inst.g, inst.xs, f, p));
        if (!out.success || !(out.performance == p))
          return fail_note(where + ": rehearsal does not invert an attribution");
      }
      if (signed_all != signed_fixed)
        return fail_note(where + ": signed casting sum " + rat_str(signed_all) +
                         " != signed fixed-point sum " + rat_str(signed_fixed));
      castings += static_cast<long long>(casts.size());
      ++states;
    }
  }
  return pass_note(std::to_string(castings) + " castings over " + std::to_string(states) +
                   " states: self-inverse, crossings adjacent, cancellation exact");
}

// --- criterion 7: the heir assignment is forced -----------------------------

Outcome forced_heirs() {
  long long cases = 0;
  for (int n = 1; n <= 6; ++n)
    for (const auto& ghosts : ghost_subsets(n)) {
      if (!no_ghosts_allowed_check(n, ghosts))
        return fail_note("n=" + std::to_string(n) + " ghosts={" + join_ints(ghosts) + "}");
      ++cases;
    }
  return pass_note(std::to_string(cases) + " (n, pattern) cases, all bijections accounted for");
}

// --- criterion 8: permuted-set boxes vs coupled dynamics --------------------

std::vector<RoleBounds> box_menu(int lo, int hi) {
  std::vector<RoleBounds> menu;
  for (int a = lo; a <= hi; ++a)
    for (int b = a; b <= hi; ++b) menu.push_back({a, b});
  for (int a = lo; a <= hi; ++a) menu.push_back({a, std::nullopt});
  for (int b = lo; b <= hi; ++b) menu.push_back({std::nullopt, b});
  menu.push_back({std::nullopt, std::nullopt});
  return menu;
}

Outcome permuted_sets() {
  long long admissible = 0, combos = 0;
  for (const Instance& inst : {checkerboard_instance(2, 2), checkerboard_instance(3, 2)}) {
    const int n = static_cast<int>(inst.xs.size());
    const auto coupled = coupled_distribution(inst.g, inst.xs);
    const auto [lo, hi] = support_range(inst.kernels);
    const auto menu = box_menu(lo, hi);
    for (const auto& ghosts : ghost_subsets(n)) {
      const auto roles = roles_in_rank_order(n, ghosts);
      std::vector<std::size_t> idx(n, 0);
      while (true) {
        ++combos;
        std::map<Label, RoleBounds> boxes;
        for (int r = 0; r < n; ++r) boxes[roles[r]] = menu[idx[r]];
        bool ok = true;
        Rat value;
        try {
          value = permuted_set_probability(inst.kernels, n, ghosts, boxes);
        } catch (const std::invalid_argument&) {
          ok = false;  // inadmissible box combination
        }
        if (ok) {
          ++admissible;
          Rat truth = rat(0);
          for (const auto& [key, p] : coupled) {
            if (key.first != ghosts) continue;
            bool inside = true;
            for (int r = 0; r < n && inside; ++r) {
              const RoleBounds& b = menu[idx[r]];
              if ((b.lo && key.second[r] < *b.lo) || (b.hi && key.second[r] > *b.hi))
                inside = false;
            }
            if (inside) truth += p;
          }
          if (value != truth) {
            std::string which;
            for (int r = 0; r < n; ++r) {
              const RoleBounds& b = menu[idx[r]];
              which += " " + label_str(roles[r]) + ":[" +
                       (b.lo ? std::to_string(*b.lo) : std::string("-inf")) + "," +
                       (b.hi ? std::to_string(*b.hi) : std::string("+inf")) + "]";
            }
            return fail_note(inst.name + " ghosts={" + join_ints(ghosts) + "}" + which + ": got " +
                             rat_str(value) + ", coupled dynamics give " + rat_str(truth));
          }
        }
        int r = 0;
        while (r < n && idx[r] + 1 == menu.size()) idx[r++] = 0;
        if (r == n) break;
        ++idx[r];
      }
    }
  }
  return pass_note(std::to_string(admissible) + " admissible of " + std::to_string(combos) +
                   " box combinations, all exact");
}

// --- criterion 9: Donsker scaling toward the Brownian density ---------------

Outcome donsker_scaling() {
  const std::vector<BrownianKernel> limit = {{0.0, 1.0}, {1.0, 1.0}};
  const double target = brownian_heir_density(limit, {2}, {0.0});

  std::vector<double> errs;
  for (int N : {256, 1024, 4096}) {
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(N))));
    ModelSpec s;
    s.kind = "checkerboard-srw";
    s.T = N;
    s.sources = {0, root};
    s.window_lo = -N;
    s.window_hi = root + N;
    const Rat mass = heir_mass(model_kernels(s), make_heir_state(2, {2}, {0}));
    // lattice spacing h = 1/root; the mass sits in a cell of width 2h
    const double density = rat_double(mass) * root / 2.0;
    errs.push_back(std::abs(density - target) / target);
  }
  const std::string trail =
      "relative error " + sci(errs[0]) + " -> " + sci(errs[1]) + " -> " + sci(errs[2]);
  if (errs[1] >= 0.05) return fail_note(trail + " (not below 5% at N=1024)");
  if (!(errs[0] > errs[1] && errs[1] > errs[2])) return fail_note(trail + " (not decreasing)");
  return pass_note(trail);
}

// --- criterion 10: Brownian pattern probabilities sum to one ----------------

Outcome brownian_normalization() {
  const std::vector<BrownianKernel> walkers = {{0.0, 1.0}, {1.0, 1.0}};
  const double lo = 0.0 - 12.0, hi = 1.0 + 12.0;  // +-12 standard deviations
  const Quadrature merged = brownian_ordered_integral(walkers, {2}, lo, hi, 1e-8);
  const Quadrature apart = brownian_ordered_integral(walkers, {}, lo, hi, 1e-8);
  const double total = merged.value + apart.value;

  std::ostringstream note;
  note << std::fixed << std::setprecision(9) << "merged " << merged.value << " + ordered pair "
       << apart.value << " = " << total << " (" << (merged.evaluations + apart.evaluations)
       << " density evaluations)";
  if (std::abs(total - 1.0) > 1e-6) return fail_note(note.str());
  return pass_note(note.str());
}

struct Criterion {
  std::string title;
  double budget;  // seconds; 0 = untimed
  std::function<Outcome()> run;
};

}  // namespace

bool run_acceptance(std::ostream& os) {
  const std::vector<Criterion> criteria = {
      {"two-walker worked example, exact values", 1.0, worked_two_walkers},
      {"determinant formula vs performance oracle, full state sweep", 300.0, formula_vs_oracle},
      {"ghost-free marginal vs interacting dynamics, full sweep + normalization", 300.0,
       marginal_vs_dynamics},
      {"ghost-free pattern reduces to the classical disjoint-path determinant", 0.0,
       classical_reduction},
      {"three-walker worked example: candidates, signs, paired family", 30.0,
       worked_three_walkers},
      {"sign-reversing involution audit over the full state sweep", 0.0, involution_audit},
      {"forced heir assignment, exhaustive over n <= 6", 10.0, forced_heirs},
      {"permuted-set box identity vs coupled dynamics", 0.0, permuted_sets},
      {"Donsker scaling of the lattice marginal to the Brownian density", 120.0, donsker_scaling},
      {"Brownian pattern probabilities integrate to one", 60.0, brownian_normalization},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].run();
    } catch (const std::exception& e) {
      r = fail_note(std::string("unexpected exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    const bool timely = criteria[i].budget <= 0 || secs < criteria[i].budget;
    const bool ok = r.pass && timely;
    line << '[' << std::setw(2) << (i + 1) << '/' << criteria.size() << "] "
         << (ok ? "PASS" : "FAIL") << ' ' << criteria[i].title;
    if (!r.note.empty()) line << " [" << r.note << ']';
    if (!timely)
      line << " [over budget: " << std::fixed << std::setprecision(2) << criteria[i].budget
           << " s allowed]";
    line << " (" << std::fixed << std::setprecision(2) << secs << " s)";
    os << line.str() << '\n';
    all = all && ok;
  }
  os << (all ? "acceptance: all 10 criteria passed" : "acceptance: FAILED") << '\n';
  return all;
}

}  // namespace coalesce
