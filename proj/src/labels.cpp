#include "coalesce/labels.hpp"

#include <algorithm>
#include <stdexcept>

#include "coalesce/check.hpp"

namespace coalesce {

Label Label::interval(int lo, int hi) {
  COALESCE_CHECK(lo < hi, "interval label needs lo < hi");
  return Label{lo, hi};
}

Label Label::junction(int g) { return Label{g, g}; }

std::string label_str(const Label& l) {
  if (l.is_junction()) return std::to_string(l.a);
  return "[" + std::to_string(l.a) + "," + std::to_string(l.b) + "]";
}

int rank(const Label& l) { return l.a; }

bool label_less(const Label& x, const Label& y) {
  if (x == y) return false;
  if (x.is_interval() && y.is_interval()) {
    if (x.b <= y.a) return true;
    if (y.b <= x.a) return false;
    throw std::invalid_argument("label_less: overlapping intervals " + label_str(x) + ", " +
                                label_str(y) + " cannot coexist");
  }
  if (x.is_junction() && y.is_junction()) return x.a < y.a;
  if (x.is_interval()) return x.b <= y.a;  // interval vs junction
  return x.a <= y.a;                       // junction vs interval
}

bool label_leq(const Label& x, const Label& y) { return x == y || label_less(x, y); }

bool label_comparable(const Label& x, const Label& y) {
  return x == y || label_less(x, y) || label_less(y, x);
}

int FinalState::position(const Label& role) const {
  auto it = positions.find(role);
  COALESCE_CHECK(it != positions.end(), "state has no position for role " + label_str(role));
  return it->second;
}

std::vector<Label> actors(int n) {
  COALESCE_CHECK(n >= 1, "need at least one particle");
  std::vector<Label> out;
  out.reserve(n);
  for (int j = 1; j <= n; ++j) out.push_back(Label::interval(j, j + 1));
  return out;
}

namespace {

void validate_ghosts(int n, const std::vector<int>& ghosts) {
  COALESCE_CHECK(n >= 1, "need at least one particle");
  for (std::size_t i = 0; i < ghosts.size(); ++i) {
    if (ghosts[i] < 2 || ghosts[i] > n)
      throw std::invalid_argument("ghost junction " + std::to_string(ghosts[i]) +
                                  " outside {2.." + std::to_string(n) + "}");
    if (i > 0 && ghosts[i - 1] >= ghosts[i])
      throw std::invalid_argument("ghost set must be strictly increasing");
  }
}

}  // namespace

std::vector<Label> heir_set(int n, const std::vector<int>& ghosts) {
  validate_ghosts(n, ghosts);
  // Cut [1, n+1] at the junctions that never dissolved.
  std::vector<int> cuts;
  cuts.push_back(1);
  for (int g = 2; g <= n; ++g)
    if (!std::binary_search(ghosts.begin(), ghosts.end(), g)) cuts.push_back(g);
  cuts.push_back(n + 1);
  std::vector<Label> heirs;
  heirs.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    heirs.push_back(Label::interval(cuts[i], cuts[i + 1]));
  return heirs;
}

Label heir_of(int n, const std::vector<int>& ghosts, int g) {
  COALESCE_CHECK(std::binary_search(ghosts.begin(), ghosts.end(), g),
                 std::to_string(g) + " is not a ghost junction");
  for (const Label& h : heir_set(n, ghosts))
    if (h.a < g && g < h.b) return h;
  COALESCE_CHECK(false, "no heir strictly contains junction " + std::to_string(g));
  return {};
}

std::vector<Label> roles_in_rank_order(int n, const std::vector<int>& ghosts) {
  std::vector<Label> roles = heir_set(n, ghosts);
  for (int g : ghosts) roles.push_back(Label::junction(g));
  std::sort(roles.begin(), roles.end(),
            [](const Label& x, const Label& y) { return rank(x) < rank(y); });
  COALESCE_CHECK(static_cast<int>(roles.size()) == n, "role count must equal n");
  for (int i = 0; i < n; ++i) COALESCE_CHECK(rank(roles[i]) == i + 1, "ranks must be 1..n");
  return roles;
}

FinalState make_state(int n, std::vector<int> ghosts, const std::map<Label, int>& positions) {
  validate_ghosts(n, ghosts);
  FinalState f;
  f.n = n;
  f.ghosts = std::move(ghosts);
  f.heirs = heir_set(n, f.ghosts);
  f.positions = positions;

  for (const Label& role : roles_in_rank_order(n, f.ghosts))
    if (!positions.count(role))
      throw std::invalid_argument("state is missing a position for role " + label_str(role));
  if (static_cast<int>(positions.size()) != n)
    throw std::invalid_argument("state has positions for labels that are not roles");

  for (std::size_t i = 0; i + 1 < f.heirs.size(); ++i)
    if (f.position(f.heirs[i]) >= f.position(f.heirs[i + 1]))
      throw std::invalid_argument("heir positions must strictly increase in label order");

  for (int g : f.ghosts) {
    const Label h = heir_of(n, f.ghosts, g);
    // Ties count as +1: the ghost ends weakly left of its heir.
    f.signs[g] = f.position(Label::junction(g)) <= f.position(h) ? +1 : -1;
  }
  return f;
}

FinalState make_state_signed(int n, std::vector<int> ghosts, const std::map<int, int>& signs) {
  validate_ghosts(n, ghosts);
  FinalState f;
  f.n = n;
  f.ghosts = std::move(ghosts);
  f.heirs = heir_set(n, f.ghosts);
  for (int g : f.ghosts) {
    auto it = signs.find(g);
    if (it == signs.end())
      throw std::invalid_argument("missing sign for ghost " + std::to_string(g));
    if (it->second != 1 && it->second != -1)
      throw std::invalid_argument("ghost sign must be +1 or -1");
    f.signs[g] = it->second;
  }
  if (signs.size() != f.ghosts.size())
    throw std::invalid_argument("signs given for junctions that are not ghosts");
  return f;
}

FinalState make_heir_state(int n, std::vector<int> ghosts, const std::vector<int>& heir_positions) {
  validate_ghosts(n, ghosts);
  FinalState f;
  f.n = n;
  f.ghosts = std::move(ghosts);
  f.heirs = heir_set(n, f.ghosts);
  if (heir_positions.size() != f.heirs.size())
    throw std::invalid_argument("one position per heir is required");
  for (std::size_t i = 0; i < f.heirs.size(); ++i) {
    if (i > 0 && heir_positions[i - 1] >= heir_positions[i])
      throw std::invalid_argument("heir positions must strictly increase in label order");
    f.positions[f.heirs[i]] = heir_positions[i];
  }
  return f;
}

int ghost_sign(const FinalState& f, int g) {
  auto it = f.signs.find(g);
  COALESCE_CHECK(it != f.signs.end(), "no sign for junction " + std::to_string(g));
  return it->second;
}

int state_sign(const FinalState& f) {
  int s = 1;
  for (const auto& [g, sign] : f.signs) s *= sign;
  return s;
}

}  // namespace coalesce
