#include "coalesce/spacetime.hpp"

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

#include "coalesce/check.hpp"

namespace coalesce {

namespace {

std::string vertex_str(const Vertex& v) {
  return "(" + std::to_string(v.space) + "," + std::to_string(v.time) + ")";
}

bool parity_kind(const std::string& kind) {
  return kind == "checkerboard-srw" || kind == "birth-death";
}

// Uniform per-step move table (space offset, weight) for the lattice kinds.
std::vector<std::pair<int, Rat>> move_table(const ModelSpec& spec) {
  const auto& par = spec.parameters;
  auto get = [&](const std::string& key) -> Rat {
    auto it = par.find(key);
    if (it == par.end()) throw std::invalid_argument("model: missing parameter " + key);
    if (it->second < 0) throw std::invalid_argument("model: negative weight for " + key);
    return it->second;
  };
  auto allow_only = [&](std::initializer_list<std::string> keys) {
    for (const auto& [k, v] : par)
      if (std::find(keys.begin(), keys.end(), k) == keys.end())
        throw std::invalid_argument("model: unknown parameter " + k + " for kind " + spec.kind);
  };

  if (spec.kind == "checkerboard-srw") {
    allow_only({});
    return {{-1, rat(1, 2)}, {+1, rat(1, 2)}};
  }
  if (spec.kind == "birth-death") {
    allow_only({"p_up", "p_down"});
    Rat up = get("p_up"), down = get("p_down");
    if (up + down != 1)
      throw std::invalid_argument("model: birth-death needs p_up + p_down = 1");
    return {{-1, down}, {+1, up}};
  }
  if (spec.kind == "ne-lattice") {
    allow_only({"north", "east"});
    Rat north = par.count("north") ? get("north") : rat(1);
    Rat east = par.count("east") ? get("east") : rat(1);
    return {{0, north}, {+1, east}};
  }
  throw std::invalid_argument("model: unknown kind " + spec.kind);
}

void validate_sources(const ModelSpec& spec) {
  if (spec.sources.empty()) throw std::invalid_argument("model: no sources");
  for (std::size_t i = 0; i + 1 < spec.sources.size(); ++i)
    if (spec.sources[i] >= spec.sources[i + 1])
      throw std::invalid_argument("model: sources must strictly increase");
  for (int x : spec.sources) {
    if (x < spec.window_lo || x > spec.window_hi)
      throw std::invalid_argument("model: source " + std::to_string(x) + " outside window");
    if (parity_kind(spec.kind) && ((x % 2) + 2) % 2 != 0)
      throw std::invalid_argument("model: source " + std::to_string(x) +
                                  " not on the even sublattice");
  }
}

}  // namespace

bool SpacetimeGraph::has_vertex(int space, int time) const {
  return index.count({time, space}) != 0;
}

VertexId SpacetimeGraph::vertex(int space, int time) const {
  auto it = index.find({time, space});
  if (it == index.end())
    throw std::invalid_argument("no vertex at (" + std::to_string(space) + "," +
                                std::to_string(time) + ")");
  return it->second;
}

std::vector<VertexId> SpacetimeGraph::slice(int time) const {
  std::vector<VertexId> ids;
  for (auto it = index.lower_bound({time, std::numeric_limits<int>::min()});
       it != index.end() && it->first.first == time; ++it)
    ids.push_back(it->second);
  return ids;
}

SpacetimeGraph build_model(const ModelSpec& spec) {
  if (spec.T < 1) throw std::invalid_argument("model: horizon must be at least 1");
  if (spec.window_lo > spec.window_hi) throw std::invalid_argument("model: empty window");
  validate_sources(spec);

  // Reachable closure, slice by slice; a move leaving the window means the
  // window clips the reachable set.
  std::vector<std::set<int>> slices(spec.T + 1);
  for (int x : spec.sources) slices[0].insert(x);

  // (tail space, head space, weight) per time step
  std::vector<std::vector<std::tuple<int, int, Rat>>> step_edges(spec.T);

  if (spec.kind == "custom") {
    if (!spec.parameters.empty())
      throw std::invalid_argument("model: custom kind takes no parameters");
    if (spec.custom_edges.empty()) throw std::invalid_argument("model: custom kind needs edges");
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& e : spec.custom_edges) {
      if (e.w < 0) throw std::invalid_argument("model: negative edge weight");
      if (e.from_time < 0 || e.from_time >= spec.T)
        throw std::invalid_argument("model: custom edge outside the horizon");
      if (!seen.emplace(e.from_time, e.from_space, e.to_space).second)
        throw std::invalid_argument("model: duplicate custom edge");
    }
    for (int t = 0; t < spec.T; ++t) {
      for (const auto& e : spec.custom_edges) {
        if (e.from_time != t || !slices[t].count(e.from_space)) continue;
        if (e.to_space < spec.window_lo || e.to_space > spec.window_hi)
          throw std::invalid_argument("model: window clips the reachable set at " +
                                      vertex_str({e.to_space, t + 1}));
        slices[t + 1].insert(e.to_space);
        step_edges[t].emplace_back(e.from_space, e.to_space, e.w);
      }
    }
  } else {
    const auto moves = move_table(spec);
    for (int t = 0; t < spec.T; ++t) {
      for (int x : slices[t]) {
        for (const auto& [d, w] : moves) {
          const int nx = x + d;
          if (nx < spec.window_lo || nx > spec.window_hi)
            throw std::invalid_argument("model: window clips the reachable set at " +
                                        vertex_str({nx, t + 1}));
          slices[t + 1].insert(nx);
          step_edges[t].emplace_back(x, nx, w);
        }
      }
    }
  }

  SpacetimeGraph g;
  g.T = spec.T;
  for (int t = 0; t <= spec.T; ++t)
    for (int x : slices[t]) {
      g.index[{t, x}] = static_cast<VertexId>(g.verts.size());
      g.verts.push_back({x, t});
    }
  g.out.resize(g.verts.size());
  g.in.resize(g.verts.size());
  for (int t = 0; t < spec.T; ++t) {
    std::sort(step_edges[t].begin(), step_edges[t].end(),
              [](const auto& a, const auto& b) {
                return std::pair(std::get<0>(a), std::get<1>(a)) <
                       std::pair(std::get<0>(b), std::get<1>(b));
              });
    for (const auto& [xs, xh, w] : step_edges[t]) {
      const VertexId tail = g.index.at({t, xs});
      const VertexId head = g.index.at({t + 1, xh});
      g.out[tail].push_back({head, w});
      g.in[head].push_back({tail, w});
    }
  }
  for (int x : spec.sources) g.sources.push_back(g.index.at({0, x}));
  return g;
}

bool linear_less(const SpacetimeGraph& g, VertexId u, VertexId v, Extension ext) {
  const Vertex& a = g.v(u);
  const Vertex& b = g.v(v);
  if (ext == Extension::TimeSpace)
    return std::pair(a.time, a.space) < std::pair(b.time, b.space);
  return std::pair(a.space, a.time) < std::pair(b.space, b.time);
}

bool extension_valid(const SpacetimeGraph& g, Extension ext) {
  for (VertexId u = 0; u < static_cast<VertexId>(g.verts.size()); ++u)
    for (const HalfEdge& e : g.out[u])
      if (!linear_less(g, u, e.to, ext)) return false;
  return true;
}

Rat edge_weight(const SpacetimeGraph& g, VertexId from, VertexId to) {
  for (const HalfEdge& e : g.out[from])
    if (e.to == to) return e.w;
  throw std::invalid_argument("no edge " + vertex_str(g.v(from)) + " -> " + vertex_str(g.v(to)));
}

Rat path_weight(const SpacetimeGraph& g, const Path& p) {
  COALESCE_CHECK(!p.empty(), "path must contain at least one vertex");
  Rat w = rat(1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) w *= edge_weight(g, p[i], p[i + 1]);
  return w;
}

std::vector<Rat> forward_weights(const SpacetimeGraph& g, VertexId src) {
  std::vector<Rat> w(g.verts.size(), rat(0));
  w[src] = 1;
  // ids are time-major, hence topological
  for (VertexId u = src; u < static_cast<VertexId>(g.verts.size()); ++u) {
    if (w[u] == 0) continue;
    for (const HalfEdge& e : g.out[u]) w[e.to] += w[u] * e.w;
  }
  return w;
}

Rat path_weight_sum(const SpacetimeGraph& g, VertexId x, VertexId y) {
  if (g.v(y).time < g.v(x).time) return rat(0);
  return forward_weights(g, x)[y];
}

std::vector<Path> enumerate_paths(const SpacetimeGraph& g, VertexId x, VertexId y,
                                  std::size_t cap) {
  std::vector<Path> out;
  if (g.v(y).time < g.v(x).time) return out;

  // backward reachability from y prunes the DFS
  std::vector<char> reach(g.verts.size(), 0);
  reach[y] = 1;
  for (VertexId u = y; u >= 0; --u)
    if (reach[u])
      for (const HalfEdge& e : g.in[u]) reach[e.to] = 1;

  if (!reach[x]) return out;
  Path cur{x};
  auto dfs = [&](auto&& self, VertexId u) -> void {
    if (u == y) {
      if (out.size() >= cap)
        throw std::length_error("enumerate_paths: more than " + std::to_string(cap) + " paths");
      out.push_back(cur);
      return;
    }
    for (const HalfEdge& e : g.out[u]) {
      if (!reach[e.to]) continue;
      cur.push_back(e.to);
      self(self, e.to);
      cur.pop_back();
    }
  };
  dfs(dfs, x);
  return out;
}

namespace {

std::string path_str(const SpacetimeGraph& g, const Path& p) {
  std::string s;
  for (VertexId v : p) s += vertex_str(g.v(v));
  return s;
}

}  // namespace

PlanarityReport check_planarity(const SpacetimeGraph& g, const std::vector<VertexId>& sources,
                                const std::vector<VertexId>& targets, std::size_t cap) {
  PlanarityReport rep;
  const int ns = static_cast<int>(sources.size());
  const int nt = static_cast<int>(targets.size());

  std::map<std::pair<VertexId, VertexId>, std::vector<Path>> cache;
  auto paths = [&](VertexId s, VertexId t) -> const std::vector<Path>& {
    auto key = std::pair(s, t);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, enumerate_paths(g, s, t, cap)).first;
    return it->second;
  };
  auto shared = [](const Path& p, const Path& q) {
    std::set<VertexId> sp(p.begin(), p.end());
    std::vector<VertexId> both;
    for (VertexId v : q)
      if (sp.count(v)) both.push_back(v);
    return both;
  };

  // Crossing property: a pair of paths whose endpoints appear in swapped
  // order must meet.
  for (int i = 0; i < ns && rep.crossing_property; ++i)
    for (int j = i + 1; j < ns && rep.crossing_property; ++j)
      for (int a = 0; a < nt && rep.crossing_property; ++a)
        for (int b = a + 1; b < nt && rep.crossing_property; ++b)
          for (const Path& p : paths(sources[i], targets[b])) {
            for (const Path& q : paths(sources[j], targets[a]))
              if (shared(p, q).empty()) {
                rep.crossing_property = false;
                rep.counterexample = "crossing property: disjoint pair " + path_str(g, p) +
                                     " and " + path_str(g, q);
                break;
              }
            if (!rep.crossing_property) break;
          }

  // Consecutive-collision property: when outer paths meet at v, every path
  // of the particle between them hits v or one of the outer paths no later
  // than v (in the time-space extension).
  for (int i = 0; i < ns && rep.consecutive_collision; ++i)
    for (int j = i + 1; j < ns && rep.consecutive_collision; ++j)
      for (int k = j + 1; k < ns && rep.consecutive_collision; ++k)
        for (int a = 0; a < nt && rep.consecutive_collision; ++a)
          for (int b = 0; b < nt && rep.consecutive_collision; ++b) {
            for (const Path& p : paths(sources[i], targets[a])) {
              for (const Path& r : paths(sources[k], targets[b])) {
                std::set<VertexId> outer(p.begin(), p.end());
                outer.insert(r.begin(), r.end());
                for (VertexId v : shared(p, r)) {
                  for (int c = 0; c < nt && rep.consecutive_collision; ++c) {
                    for (const Path& q : paths(sources[j], targets[c])) {
                      bool ok = false;
                      for (VertexId u : q)
                        if (outer.count(u) &&
                            (u == v || linear_less(g, u, v, Extension::TimeSpace))) {
                          ok = true;
                          break;
                        }
                      if (!ok) {
                        rep.consecutive_collision = false;
                        rep.counterexample =
                            "consecutive collision: outer paths " + path_str(g, p) + " and " +
                            path_str(g, r) + " meet at " + vertex_str(g.v(v)) +
                            " but middle path " + path_str(g, q) + " bypasses them";
                        break;
                      }
                    }
                  }
                  if (!rep.consecutive_collision) break;
                }
                if (!rep.consecutive_collision) break;
              }
              if (!rep.consecutive_collision) break;
            }
          }
  return rep;
}

Rat SliceKernel::pmf(int y) const {
  if (y < lo || y >= lo + static_cast<int>(pmf_.size())) return rat(0);
  return pmf_[y - lo];
}

Rat SliceKernel::cdf(int y) const {
  if (y < lo) return rat(0);
  const int i = std::min<int>(y - lo, static_cast<int>(cdf_.size()) - 1);
  return cdf_[i];
}

Rat SliceKernel::total() const { return cdf_.back(); }

Rat SliceKernel::mass(std::optional<int> a, std::optional<int> b) const {
  Rat hi = b ? cdf(*b) : total();
  Rat lo_part = a ? cdf(*a - 1) : rat(0);
  return hi - lo_part;
}

SliceKernel transition_kernel(const ModelSpec& spec, int source_space) {
  if (spec.T < 1) throw std::invalid_argument("model: horizon must be at least 1");
  if (parity_kind(spec.kind) && ((source_space % 2) + 2) % 2 != 0)
    throw std::invalid_argument("kernel: source not on the even sublattice");

  SliceKernel k;
  k.x0 = source_space;

  if (spec.kind == "custom") {
    ModelSpec one = spec;
    one.sources = {source_space};
    // widen the window so the kernel itself is never clipped
    for (const auto& e : spec.custom_edges) {
      one.window_lo = std::min({one.window_lo, e.from_space, e.to_space});
      one.window_hi = std::max({one.window_hi, e.from_space, e.to_space});
    }
    const SpacetimeGraph g = build_model(one);
    const auto w = forward_weights(g, g.vertex(source_space, 0));
    const auto last = g.slice(spec.T);
    COALESCE_CHECK(!last.empty(), "custom model has an empty final slice");
    k.lo = g.v(last.front()).space;
    k.pmf_.assign(g.v(last.back()).space - k.lo + 1, rat(0));
    for (VertexId v : last) k.pmf_[g.v(v).space - k.lo] = w[v];
  } else {
    const auto moves = move_table(spec);
    int dmin = moves.front().first, dmax = moves.front().first;
    Int den_step = 1;
    for (const auto& [d, w] : moves) {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      Int g;
      mpz_lcm(g.get_mpz_t(), den_step.get_mpz_t(), w.get_den().get_mpz_t());
      den_step = g;
    }
    // integer numerators over the running common denominator den_step^t
    std::vector<std::pair<Int, int>> scaled;  // (scaled weight, offset)
    for (const auto& [d, w] : moves) scaled.emplace_back(w.get_num() * (den_step / w.get_den()), d);

    std::vector<Int> num{1};
    int base = source_space;
    for (int t = 0; t < spec.T; ++t) {
      std::vector<Int> next(num.size() + (dmax - dmin), 0);
      for (std::size_t i = 0; i < num.size(); ++i) {
        if (num[i] == 0) continue;
        for (const auto& [w, d] : scaled) next[i + (d - dmin)] += num[i] * w;
      }
      num.swap(next);
      base += dmin;
    }
    Int den = 1;
    mpz_pow_ui(den.get_mpz_t(), den_step.get_mpz_t(), spec.T);
    k.lo = base;
    k.pmf_.reserve(num.size());
    Int run = 0;
    k.cdf_.reserve(num.size());
    for (const Int& x : num) {
      Rat q(x, den);
      q.canonicalize();
      k.pmf_.push_back(q);
      run += x;
      Rat c(run, den);
      c.canonicalize();
      k.cdf_.push_back(c);
    }
    return k;
  }

  Rat run = rat(0);
  k.cdf_.reserve(k.pmf_.size());
  for (const Rat& p : k.pmf_) {
    run += p;
    k.cdf_.push_back(run);
  }
  return k;
}

}  // namespace coalesce
