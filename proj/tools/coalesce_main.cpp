// Command-line front end for the coalescing-walker engine: exact pattern
// probabilities, ghost-free marginals, box identities, oracle enumerations,
// the involution audit and the Brownian limit, over models described by
// small JSON files.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "coalesce/acceptance.hpp"
#include "coalesce/ghost_formula.hpp"
#include "coalesce/ghostfree.hpp"
#include "coalesce/involution.hpp"
#include "coalesce/io.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/oracle.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

namespace {

using namespace coalesce;

struct Options {
  std::string model_path;
  std::string state_path;
  std::string format = "human";
  std::string extension = "time-space";
  std::string targets;
  std::size_t cap = 1000000;
  bool list = false;
  int n = 0;  // explicit entity count where no state pins it
  // brownian inputs
  std::vector<double> x0;
  double horizon = 1.0;
  std::vector<int> ghosts;
  std::vector<double> heirs_y;
  double lo = 0, hi = 0, tol = 1e-8;
};

bool structured(const Options& o) { return o.format == "structured"; }

void emit_header(const Options& o, const std::string& command) {
  if (!structured(o)) return;
  Json h;
  h["schema"] = "coalesce/1";
  h["command"] = command;
  std::cout << h.dump() << '\n';
}

void emit(const Options& o, const Json& record, const std::string& human) {
  if (structured(o))
    std::cout << record.dump() << '\n';
  else
    std::cout << human << '\n';
}

Extension parse_extension(const SpacetimeGraph& g, const std::string& name) {
  Extension ext;
  if (name == "time-space")
    ext = Extension::TimeSpace;
  else if (name == "space-time")
    ext = Extension::SpaceTime;
  else
    throw std::invalid_argument("extension: unknown order '" + name + "'");
  if (!extension_valid(g, ext))
    throw std::invalid_argument("extension: '" + name +
                                "' is not a linear extension of this graph");
  return ext;
}

struct Loaded {
  ModelSpec spec;
  SpacetimeGraph g;
  std::vector<VertexId> xs;
  Json model_json;
};

Loaded load_model(const Options& o) {
  if (o.model_path.empty()) throw std::invalid_argument("cli: --model is required");
  Loaded l;
  l.model_json = load_json(o.model_path);
  l.spec = parse_model(l.model_json);
  l.g = build_model(l.spec);
  for (int x : l.spec.sources) l.xs.push_back(l.g.vertex(x, 0));
  return l;
}

// The state comes from --state, or from a "state" object embedded in the
// model file.
StateSpec load_state(const Options& o, const Loaded& l) {
  if (!o.state_path.empty()) return parse_state(load_json(o.state_path));
  if (l.model_json.contains("state")) return parse_state(l.model_json.at("state"));
  throw std::invalid_argument("cli: no state given (--state or a \"state\" key in the model)");
}

FinalState positioned_state(const StateSpec& s) {
  if (s.kind != StateSpec::Kind::Positions)
    throw std::invalid_argument("state: this command needs every role pinned to a position");
  return make_state(static_cast<int>(s.positions.size()), s.ghosts, s.positions);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::string pi_str(const std::vector<int>& pi) {
  std::string s = "(";
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(pi[i]);
  }
  return s + ")";
}

std::string monomial_str(const Monomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (const auto& [g, sign] : m) {
    if (!s.empty()) s += " ";
    s += "t" + std::to_string(g) + (sign > 0 ? "+" : "-");
  }
  return s;
}

std::string ints_str(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "}";
}

// --- commands ---------------------------------------------------------------

int cmd_prob(const Options& o) {
  const Loaded l = load_model(o);
  const FinalState f = positioned_state(load_state(o, l));
  const Rat z = coalescence_Z(l.g, l.xs, f);
  emit_header(o, "prob");
  Json r;
  r["Z"] = rat_str(z);
  r["state_sign"] = state_sign(f);
  r["candidates"] = candidate_bijections(f).size();
  emit(o, r, "Z = " + rat_str(z));
  return 0;
}

int cmd_symbolic(const Options& o) {
  const Loaded l = load_model(o);
  const FinalState f = positioned_state(load_state(o, l));
  const auto det = expand_ghost_det(build_ghost_matrix(l.g, l.xs, f));
  const Rat z = symbolic_Z(l.g, l.xs, f);
  emit_header(o, "symbolic");
  for (const auto& [mono, coef] : det) {
    Json r;
    r["monomial"] = monomial_str(mono);
    r["coefficient"] = rat_str(coef);
    emit(o, r, monomial_str(mono) + " : " + rat_str(coef));
  }
  Json zr;
  zr["Z"] = rat_str(z);
  emit(o, zr, "Z = " + rat_str(z) + " (coefficient of the sign-matching monomial)");
  return 0;
}

int cmd_candidates(const Options& o) {
  FinalState f;
  if (!o.state_path.empty() || !o.model_path.empty()) {
    Json sj;
    if (!o.state_path.empty()) {
      sj = load_json(o.state_path);
    } else {
      const Json mj = load_json(o.model_path);
      if (!mj.contains("state")) throw std::invalid_argument("cli: no state given");
      sj = mj.at("state");
    }
    const StateSpec s = parse_state(sj);
    if (s.kind == StateSpec::Kind::Positions) {
      f = positioned_state(s);
    } else if (s.kind == StateSpec::Kind::Signs) {
      if (o.n <= 0)
        throw std::invalid_argument("cli: a sign-only state needs --n (number of walkers)");
      f = make_state_signed(o.n, s.ghosts, s.signs);
    } else {
      throw std::invalid_argument("state: candidates need positions or signs");
    }
  } else {
    throw std::invalid_argument("cli: --state or --model is required");
  }
  emit_header(o, "candidates");
  const auto cands = candidate_bijections(f);
  for (const auto& pi : cands) {
    Json r;
    r["pi"] = pi;
    r["sign"] = perm_sign(pi);
    emit(o, r, pi_str(pi) + "  sign " + (perm_sign(pi) > 0 ? "+1" : "-1"));
  }
  Json total;
  total["count"] = cands.size();
  emit(o, total, std::to_string(cands.size()) + " candidate bijection(s)");
  return 0;
}

int cmd_ghost_free(const Options& o) {
  const Loaded l = load_model(o);
  const StateSpec s = load_state(o, l);
  const auto kernels = model_kernels(l.spec);
  emit_header(o, "ghost-free");
  if (s.kind == StateSpec::Kind::Heirs) {
    const int n = static_cast<int>(s.heirs.size() + s.ghosts.size());
    const Rat mass = heir_mass(kernels, make_heir_state(n, s.ghosts, s.heirs));
    Json r;
    r["pattern"] = s.ghosts;
    r["heirs"] = s.heirs;
    r["probability"] = rat_str(mass);
    emit(o, r, "P = " + rat_str(mass));
    return 0;
  }
  if (s.kind == StateSpec::Kind::Boxes) {
    const int n = static_cast<int>(s.boxes.size() + s.ghosts.size());
    const auto heirs = heir_set(n, s.ghosts);
    std::vector<RoleBounds> boxes;
    for (const Label& h : heirs) {
      const auto it = s.boxes.find(h);
      if (it == s.boxes.end())
        throw std::invalid_argument("state: ghost-free boxes must cover exactly the heirs (" +
                                    label_str(h) + " missing)");
      boxes.push_back(it->second);
    }
    const Rat mass = heir_box_probability(kernels, n, s.ghosts, boxes);
    Json r;
    r["pattern"] = s.ghosts;
    r["probability"] = rat_str(mass);
    emit(o, r, "P = " + rat_str(mass));
    return 0;
  }
  throw std::invalid_argument("state: ghost-free needs heir positions or heir boxes");
}

int cmd_permuted_set(const Options& o) {
  const Loaded l = load_model(o);
  const StateSpec s = load_state(o, l);
  if (s.kind != StateSpec::Kind::Boxes)
    throw std::invalid_argument("state: permuted-set needs one box per role");
  const int n = static_cast<int>(s.boxes.size());
  const Rat p = permuted_set_probability(model_kernels(l.spec), n, s.ghosts, s.boxes);
  emit_header(o, "permuted-set");
  Json r;
  r["pattern"] = s.ghosts;
  r["probability"] = rat_str(p);
  emit(o, r, "P = " + rat_str(p));
  return 0;
}

int cmd_oracle_perf(const Options& o) {
  const Loaded l = load_model(o);
  const FinalState f = positioned_state(load_state(o, l));
  const auto perfs = enumerate_performances(l.g, l.xs, f, o.cap);
  emit_header(o, "oracle-performances");
  Rat total = rat(0);
  for (const Performance& p : perfs) {
    const Rat w = performance_weight(l.g, p);
    total += w;
    if (o.list) {
      Json r;
      r["weight"] = rat_str(w);
      Json cols = Json::object();
      for (const auto& [g, v] : p.collisions)
        cols[std::to_string(g)] = Json::array({l.g.v(v).space, l.g.v(v).time});
      r["collisions"] = cols;
      std::string human = "performance  weight " + rat_str(w) + "  collisions:";
      for (const auto& [g, v] : p.collisions)
        human += " " + std::to_string(g) + "@(" + std::to_string(l.g.v(v).space) + "," +
                 std::to_string(l.g.v(v).time) + ")";
      emit(o, r, human);
    }
  }
  Json r;
  r["count"] = perfs.size();
  r["total_weight"] = rat_str(total);
  emit(o, r,
       std::to_string(perfs.size()) + " performance(s), total weight " + rat_str(total));
  return 0;
}

int cmd_oracle_castings(const Options& o) {
  const Loaded l = load_model(o);
  const FinalState f = positioned_state(load_state(o, l));
  const auto casts = enumerate_castings(l.g, l.xs, f, o.cap);
  emit_header(o, "oracle-castings");
  Rat signed_sum = rat(0);
  std::map<std::vector<int>, long long> family;
  for (const Casting& c : casts) {
    signed_sum += rat(perm_sign(c.pi)) * casting_weight(l.g, c);
    ++family[c.pi];
  }
  for (const auto& [pi, count] : family) {
    Json r;
    r["pi"] = pi;
    r["sign"] = perm_sign(pi);
    r["castings"] = count;
    emit(o, r,
         pi_str(pi) + "  sign " + (perm_sign(pi) > 0 ? "+1" : "-1") + "  " +
             std::to_string(count) + " casting(s)");
  }
  Json r;
  r["count"] = casts.size();
  r["signed_sum"] = rat_str(signed_sum);
  emit(o, r,
       std::to_string(casts.size()) + " casting(s), signed sum " + rat_str(signed_sum));
  return 0;
}

int cmd_oracle_dp(const Options& o, bool coupled) {
  const Loaded l = load_model(o);
  const auto dist =
      coupled ? coupled_distribution(l.g, l.xs) : interacting_distribution(l.g, l.xs);
  emit_header(o, coupled ? "oracle-coupled" : "oracle-dp");
  Rat total = rat(0);
  for (const auto& [key, p] : dist) {
    total += p;
    Json r;
    r["pattern"] = key.first;
    r["positions"] = key.second;
    r["probability"] = rat_str(p);
    emit(o, r,
         "pattern " + ints_str(key.first) + "  at " + ints_str(key.second) + "  " + rat_str(p));
  }
  Json r;
  r["states"] = dist.size();
  r["total"] = rat_str(total);
  emit(o, r, std::to_string(dist.size()) + " state(s), total " + rat_str(total));
  return 0;
}

int cmd_oracle_lgv(const Options& o) {
  const Loaded l = load_model(o);
  if (o.targets.empty()) throw std::invalid_argument("cli: --targets is required");
  std::vector<VertexId> ys;
  for (int y : parse_int_list(o.targets)) ys.push_back(l.g.vertex(y, l.g.T));
  const LgvCount c = lgv_enumerate(l.g, l.xs, ys, o.cap);
  emit_header(o, "oracle-lgv");
  Json r;
  r["tuples"] = c.tuples;
  r["total_weight"] = rat_str(c.total);
  emit(o, r,
       std::to_string(c.tuples) + " disjoint tuple(s), total weight " + rat_str(c.total));
  return 0;
}

int cmd_audit(const Options& o) {
  const Loaded l = load_model(o);
  const FinalState f = positioned_state(load_state(o, l));
  const Extension ext = parse_extension(l.g, o.extension);
  const auto casts = enumerate_castings(l.g, l.xs, f, o.cap);
  const auto perfs = enumerate_performances(l.g, l.xs, f, o.cap);

  long long fixed = 0, paired = 0;
  Rat signed_all = rat(0), signed_fixed = rat(0);
  for (const Casting& c : casts) {
    const Rat w = rat(perm_sign(c.pi)) * casting_weight(l.g, c);
    signed_all += w;
    const RehearsalOutcome out = rehearse(l.g, l.xs, f, c, ext);
    if (out.success) {
      ++fixed;
      signed_fixed += w;
      if (!(attribute(l.g, l.xs, f, out.performance) == c))
        throw std::runtime_error("audit: attribution does not invert this rehearsal");
    } else {
      ++paired;
      const RehearsalOutcome back = rehearse(l.g, l.xs, f, out.partner, ext);
      if (back.success || !(back.partner == c))
        throw std::runtime_error("audit: the involution is not self-inverse here");
      if (casting_weight(l.g, out.partner) != casting_weight(l.g, c) ||
          perm_sign(out.partner.pi) != -perm_sign(c.pi))
        throw std::runtime_error("audit: a pair fails to preserve weight and reverse sign");
    }
  }
  const Rat z = coalescence_Z(l.g, l.xs, f);
  bool ok = fixed == static_cast<long long>(perfs.size()) && paired % 2 == 0 &&
            signed_all == signed_fixed && signed_all == rat(state_sign(f)) * z;
  for (const Performance& p : perfs) {
    const RehearsalOutcome out = rehearse(l.g, l.xs, f, attribute(l.g, l.xs, f, p), ext);
    ok = ok && out.success && out.performance == p;
  }

  emit_header(o, "audit");
  Json r;
  r["castings"] = casts.size();
  r["fixed_points"] = fixed;
  r["paired"] = paired;
  r["performances"] = perfs.size();
  r["signed_sum"] = rat_str(signed_all);
  r["Z"] = rat_str(z);
  r["ok"] = ok;
  std::ostringstream human;
  human << casts.size() << " casting(s): " << fixed << " fixed, " << paired
        << " paired off; signed sum " << rat_str(signed_all) << "; Z = " << rat_str(z) << "; "
        << (ok ? "audit OK" : "audit FAILED");
  emit(o, r, human.str());
  return ok ? 0 : 1;
}

int cmd_planarity(const Options& o) {
  const Loaded l = load_model(o);
  if (o.targets.empty()) throw std::invalid_argument("cli: --targets is required");
  std::vector<VertexId> ys;
  for (int y : parse_int_list(o.targets)) ys.push_back(l.g.vertex(y, l.g.T));
  const PlanarityReport rep = check_planarity(l.g, l.xs, ys, o.cap);
  emit_header(o, "planarity");
  Json r;
  r["crossing_property"] = rep.crossing_property;
  r["consecutive_collision"] = rep.consecutive_collision;
  if (!rep.counterexample.empty()) r["counterexample"] = rep.counterexample;
  const bool ok = rep.crossing_property && rep.consecutive_collision;
  emit(o, r,
       std::string("crossing property: ") + (rep.crossing_property ? "holds" : "fails") +
           "; consecutive collisions: " + (rep.consecutive_collision ? "hold" : "fail") +
           (rep.counterexample.empty() ? "" : "; counterexample: " + rep.counterexample));
  return ok ? 0 : 1;
}

std::vector<BrownianKernel> brownian_walkers(const Options& o) {
  if (o.x0.empty()) throw std::invalid_argument("cli: --x0 needs at least one starting point");
  if (!std::is_sorted(o.x0.begin(), o.x0.end()))
    throw std::invalid_argument("cli: starting points must increase");
  std::vector<BrownianKernel> ks;
  for (double x : o.x0) ks.push_back({x, o.horizon});
  return ks;
}

int cmd_brownian_density(const Options& o) {
  const auto ks = brownian_walkers(o);
  const double d = brownian_heir_density(ks, o.ghosts, o.heirs_y);
  emit_header(o, "brownian-density");
  Json r;
  r["density"] = d;
  std::ostringstream human;
  human.precision(17);
  human << "density = " << d;
  emit(o, r, human.str());
  return 0;
}

int cmd_brownian_box(const Options& o) {
  const auto ks = brownian_walkers(o);
  const Quadrature q = brownian_ordered_integral(ks, o.ghosts, o.lo, o.hi, o.tol);
  emit_header(o, "brownian-box");
  Json r;
  r["probability"] = q.value;
  r["evaluations"] = q.evaluations;
  std::ostringstream human;
  human.precision(12);
  human << "P = " << q.value << "  (" << q.evaluations << " density evaluations)";
  emit(o, r, human.str());
  return 0;
}

int cmd_normalize_check(const Options& o) {
  const Loaded l = load_model(o);
  const auto kernels = model_kernels(l.spec);
  const int n = static_cast<int>(l.xs.size());
  std::vector<int> sites;
  for (VertexId v : l.g.slice(l.g.T)) sites.push_back(l.g.v(v).space);

  emit_header(o, "normalize-check");
  Rat total = rat(0);
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<int> ghosts;
    for (int i = 0; i < n - 1; ++i)
      if (mask & (1 << i)) ghosts.push_back(i + 2);
    const int k = static_cast<int>(heir_set(n, ghosts).size());
    Rat sub = rat(0);
    std::vector<std::size_t> idx(k);
    // ordered k-subsets of the final slice
    std::vector<int> ys(k);
    std::function<void(int, std::size_t)> rec = [&](int depth, std::size_t from) {
      if (depth == k) {
        sub += heir_mass(kernels, make_heir_state(n, ghosts, ys));
        return;
      }
      for (std::size_t i = from; i < sites.size(); ++i) {
        ys[depth] = sites[i];
        rec(depth + 1, i + 1);
      }
    };
    rec(0, 0);
    total += sub;
    Json r;
    r["pattern"] = ghosts;
    r["probability"] = rat_str(sub);
    emit(o, r, "pattern " + ints_str(ghosts) + "  " + rat_str(sub));
  }
  const bool ok = total == rat(1);
  Json r;
  r["total"] = rat_str(total);
  r["ok"] = ok;
  emit(o, r, "total = " + rat_str(total) + (ok ? "  (exactly one)" : "  (NOT one)"));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact coalescence probabilities on weighted spacetime lattices"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c, bool with_state) {
    c->add_option("--model", o.model_path, "model JSON file");
    if (with_state) c->add_option("--state", o.state_path, "state JSON file");
    c->add_option("--format", o.format, "human | structured")
        ->check(CLI::IsMember({"human", "structured"}));
    c->add_option("--cap", o.cap, "enumeration cap");
  };

  auto* prob = app.add_subcommand("prob", "exact probability of a fully positioned state");
  add_common(prob, true);
  auto* symbolic = app.add_subcommand("symbolic", "formal determinant expansion and Z");
  add_common(symbolic, true);
  auto* candidates = app.add_subcommand("candidates", "candidate bijections of a state");
  add_common(candidates, true);
  candidates->add_option("--n", o.n, "number of walkers (sign-only states)");
  auto* ghost_free =
      app.add_subcommand("ghost-free", "marginal heir probability (positions or boxes)");
  add_common(ghost_free, true);
  auto* permuted = app.add_subcommand("permuted-set", "signed box identity for the full state");
  add_common(permuted, true);

  auto* oracle = app.add_subcommand("oracle", "exhaustive reference computations");
  oracle->require_subcommand(1);
  auto* operf = oracle->add_subcommand("perf", "enumerate performances");
  add_common(operf, true);
  operf->add_flag("--list", o.list, "print every performance");
  auto* ocast = oracle->add_subcommand("castings", "enumerate castings by family");
  add_common(ocast, true);
  auto* odp = oracle->add_subcommand("dp", "interacting end-state distribution");
  add_common(odp, false);
  auto* ocoupled = oracle->add_subcommand("coupled", "coupled walker+ghost distribution");
  add_common(ocoupled, false);
  auto* olgv = oracle->add_subcommand("lgv", "disjoint path tuples to --targets");
  add_common(olgv, false);
  olgv->add_option("--targets", o.targets, "final spaces, comma separated");

  auto* audit = app.add_subcommand("audit", "involution audit of one state");
  add_common(audit, true);
  audit->add_option("--extension", o.extension, "time-space | space-time")
      ->check(CLI::IsMember({"time-space", "space-time"}));
  auto* planarity = app.add_subcommand("planarity", "path-crossing properties of the model");
  add_common(planarity, false);
  planarity->add_option("--targets", o.targets, "final spaces, comma separated");

  auto* brownian = app.add_subcommand("brownian", "Brownian-limit quantities");
  brownian->require_subcommand(1);
  auto* bdensity = brownian->add_subcommand("density", "marginal heir density");
  bdensity->add_option("--x0", o.x0, "starting points, increasing")->expected(-1);
  bdensity->add_option("--horizon", o.horizon, "time horizon");
  bdensity->add_option("--ghosts", o.ghosts, "dissolved junctions")->expected(-1);
  bdensity->add_option("--heirs", o.heirs_y, "heir positions, rank order")->expected(-1);
  bdensity->add_option("--format", o.format)->check(CLI::IsMember({"human", "structured"}));
  auto* bbox = brownian->add_subcommand("box", "ordered-box probability by quadrature");
  bbox->add_option("--x0", o.x0, "starting points, increasing")->expected(-1);
  bbox->add_option("--horizon", o.horizon, "time horizon");
  bbox->add_option("--ghosts", o.ghosts, "dissolved junctions")->expected(-1);
  bbox->add_option("--lo", o.lo, "lower integration bound")->required();
  bbox->add_option("--hi", o.hi, "upper integration bound")->required();
  bbox->add_option("--tol", o.tol, "quadrature tolerance");
  bbox->add_option("--format", o.format)->check(CLI::IsMember({"human", "structured"}));

  auto* normalize = app.add_subcommand("normalize-check", "marginal masses must sum to one");
  add_common(normalize, false);
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prob->parsed()) return cmd_prob(o);
    if (symbolic->parsed()) return cmd_symbolic(o);
    if (candidates->parsed()) return cmd_candidates(o);
    if (ghost_free->parsed()) return cmd_ghost_free(o);
    if (permuted->parsed()) return cmd_permuted_set(o);
    if (oracle->parsed()) {
      if (operf->parsed()) return cmd_oracle_perf(o);
      if (ocast->parsed()) return cmd_oracle_castings(o);
      if (odp->parsed()) return cmd_oracle_dp(o, false);
      if (ocoupled->parsed()) return cmd_oracle_dp(o, true);
      if (olgv->parsed()) return cmd_oracle_lgv(o);
    }
    if (audit->parsed()) return cmd_audit(o);
    if (planarity->parsed()) return cmd_planarity(o);
    if (brownian->parsed()) {
      if (bdensity->parsed()) return cmd_brownian_density(o);
      if (bbox->parsed()) return cmd_brownian_box(o);
    }
    if (normalize->parsed()) return cmd_normalize_check(o);
    if (accept->parsed()) return run_acceptance(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
