#include "deun/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace deun {

namespace {

std::string join_vertices(const std::vector<int>& vs, std::string_view sep) {
  std::ostringstream os;
  for (size_t k = 0; k < vs.size(); ++k) {
    if (k) os << sep;
    os << vs[k];
  }
  return os.str();
}

std::string summarize(const std::vector<StructuralViolation>& violations) {
  std::ostringstream os;
  os << "invalid network (" << violations.size() << " violation"
     << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) os << "; " << v.message;
  return os.str();
}

// One directed cycle as a closed walk (first vertex repeated at the end), if any.
std::optional<std::vector<int>> find_cycle(int n, const EdgeSet& edges) {
  std::vector<std::vector<int>> adj(n + 1);
  for (const auto& e : edges) {
    if (e.from >= 1 && e.from <= n && e.to >= 1 && e.to <= n) adj[e.from].push_back(e.to);
  }
  enum Color { White, Grey, Black };
  std::vector<Color> color(n + 1, White);
  std::vector<int> stack;
  std::optional<std::vector<int>> found;

  std::function<bool(int)> visit = [&](int v) {
    color[v] = Grey;
    stack.push_back(v);
    for (int w : adj[v]) {
      if (color[w] == Grey) {
        auto it = std::find(stack.begin(), stack.end(), w);
        std::vector<int> cycle(it, stack.end());
        cycle.push_back(w);
        found = std::move(cycle);
        return true;
      }
      if (color[w] == White && visit(w)) return true;
    }
    stack.pop_back();
    color[v] = Black;
    return false;
  };

  for (int v = 1; v <= n; ++v) {
    if (color[v] == White && visit(v)) break;
  }
  return found;
}

void check_edge_set(int n, const EdgeSet& edges, EdgeKind kind,
                    std::vector<StructuralViolation>& out) {
  for (const auto& e : edges) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      out.push_back({ErrorKind::OrderingViolated, kind, {e.from, e.to},
                     std::string(to_string(kind)) + " edge (" + std::to_string(e.from) +
                         "," + std::to_string(e.to) + ") references a vertex outside 1.." +
                         std::to_string(n)});
    } else if (e.from == e.to) {
      out.push_back({ErrorKind::SelfLoop, kind, {e.from, e.to},
                     std::string(to_string(kind)) + " self loop at " + std::to_string(e.from)});
    } else if (e.from > e.to) {
      out.push_back({ErrorKind::OrderingViolated, kind, {e.from, e.to},
                     std::string(to_string(kind)) + " edge (" + std::to_string(e.from) +
                         "," + std::to_string(e.to) + ") violates i < j"});
    }
  }
  EdgeSet proper;
  for (const auto& e : edges) {
    if (e.from != e.to) proper.insert(e);
  }
  if (auto cycle = find_cycle(n, proper)) {
    out.push_back({ErrorKind::CycleDetected, kind, *cycle,
                   std::string(to_string(kind)) + " cycle " + join_vertices(*cycle, "->")});
  }
}

}  // namespace

std::string_view to_string(EdgeKind kind) {
  return kind == EdgeKind::Probabilistic ? "probabilistic" : "utility";
}

DeunValidationError::DeunValidationError(std::vector<StructuralViolation> violations)
    : Error(violations.empty() ? ErrorKind::ValidationError : violations.front().kind,
            summarize(violations)),
      violations_(std::move(violations)) {}

Deun Deun::from_edges_unchecked(int n, EdgeSet prob_edges, EdgeSet util_edges) {
  Deun d;
  d.n_ = n;
  d.prob_ = std::move(prob_edges);
  d.util_ = std::move(util_edges);
  return d;
}

std::vector<int> Deun::prob_parents(int v) const {
  std::vector<int> out;
  for (const auto& e : prob_) {
    if (e.to == v) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Deun::util_parents(int v) const {
  std::vector<int> out;
  for (const auto& e : util_) {
    if (e.to == v) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Deun::prob_children(int v) const {
  std::vector<int> out;
  for (const auto& e : prob_) {
    if (e.from == v) out.push_back(e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Deun::has_prob_path(int i, int j) const {
  if (i == j) return false;
  std::vector<char> seen(n_ + 1, 0);
  std::vector<int> frontier{i};
  seen[i] = 1;
  while (!frontier.empty()) {
    int v = frontier.back();
    frontier.pop_back();
    for (auto it = prob_.lower_bound(Edge{v, 0}); it != prob_.end() && it->from == v; ++it) {
      if (it->to == j) return true;
      if (!seen[it->to]) {
        seen[it->to] = 1;
        frontier.push_back(it->to);
      }
    }
  }
  return false;
}

bool Deun::prob_adjacent(int i, int j) const {
  return prob_.count({i, j}) > 0 || prob_.count({j, i}) > 0;
}

std::vector<StructuralViolation> check_deun(int n, const EdgeSet& prob_edges,
                                            const EdgeSet& util_edges) {
  std::vector<StructuralViolation> out;
  check_edge_set(n, prob_edges, EdgeKind::Probabilistic, out);
  check_edge_set(n, util_edges, EdgeKind::Utility, out);
  return out;
}

Deun validate_deun(int n, EdgeSet prob_edges, EdgeSet util_edges) {
  if (n <= 0) {
    throw Error(ErrorKind::InvalidArgument, "vertex count must be positive");
  }
  auto violations = check_deun(n, prob_edges, util_edges);
  if (!violations.empty()) throw DeunValidationError(std::move(violations));
  return Deun::from_edges_unchecked(n, std::move(prob_edges), std::move(util_edges));
}

DecomposabilityResult is_decomposable(const Deun& deun) {
  const int n = deun.size();
  for (int child = 1; child <= n; ++child) {
    auto parents = deun.prob_parents(child);
    for (size_t a = 0; a < parents.size(); ++a) {
      for (size_t b = a + 1; b < parents.size(); ++b) {
        if (!deun.prob_adjacent(parents[a], parents[b])) {
          return {false,
                  DecomposabilityWitness{DecomposabilityWitness::Condition::UnjoinedCoParents,
                                         parents[a], parents[b], child}};
        }
      }
    }
  }
  for (const auto& e : deun.util_edges()) {
    if (!deun.has_prob_path(e.from, e.to)) {
      return {false, DecomposabilityWitness{
                         DecomposabilityWitness::Condition::UtilityEdgeWithoutPath, e.from,
                         e.to, 0}};
    }
  }
  return {true, std::nullopt};
}

Deun make_decomposable(const Deun& deun) {
  const int n = deun.size();
  EdgeSet prob = deun.prob_edges();
  for (;;) {
    auto current = Deun::from_edges_unchecked(n, prob, deun.util_edges());
    EdgeSet added;
    for (const auto& e : deun.util_edges()) {
      if (!current.has_prob_path(e.from, e.to)) added.insert(e);
    }
    prob.insert(added.begin(), added.end());
    auto with_b1 = Deun::from_edges_unchecked(n, prob, deun.util_edges());
    for (int child = 1; child <= n; ++child) {
      auto parents = with_b1.prob_parents(child);
      for (size_t a = 0; a < parents.size(); ++a) {
        for (size_t b = a + 1; b < parents.size(); ++b) {
          if (!with_b1.prob_adjacent(parents[a], parents[b])) {
            added.insert({parents[a], parents[b]});  // parents sorted: low -> high
          }
        }
      }
    }
    const size_t before = prob.size();
    prob.insert(added.begin(), added.end());
    if (prob.size() == before) break;
  }
  return Deun::from_edges_unchecked(n, std::move(prob), deun.util_edges());
}

CliqueSet enumerate_cliques(const Deun& deun) {
  if (auto check = is_decomposable(deun); !check) {
    throw Error(ErrorKind::NotDecomposable,
                "clique enumeration requires a decomposable network");
  }
  const int n = deun.size();
  std::vector<std::vector<int>> nbrs(n + 1);
  for (const auto& e : deun.prob_edges()) {
    nbrs[e.from].push_back(e.to);
    nbrs[e.to].push_back(e.from);
  }

  std::vector<int> weight(n + 1, 0);
  std::vector<char> visited(n + 1, 0);
  CliqueSet out;
  int prev_weight = -1;

  for (int step = 0; step < n; ++step) {
    int pick = 0;
    for (int v = 1; v <= n; ++v) {
      if (!visited[v] && (pick == 0 || weight[v] > weight[pick])) pick = v;
    }
    std::vector<int> earlier;
    for (int w : nbrs[pick]) {
      if (visited[w]) earlier.push_back(w);
    }
    std::sort(earlier.begin(), earlier.end());
    for (size_t a = 0; a < earlier.size(); ++a) {
      for (size_t b = a + 1; b < earlier.size(); ++b) {
        if (!deun.prob_adjacent(earlier[a], earlier[b])) {
          throw Error(ErrorKind::NotDecomposable,
                      "probabilistic skeleton is not chordal at vertex " + std::to_string(pick));
        }
      }
    }
    if (weight[pick] <= prev_weight || out.cliques.empty()) {
      auto clique = earlier;
      clique.push_back(pick);
      std::sort(clique.begin(), clique.end());
      out.cliques.push_back(std::move(clique));
    } else {
      auto& current = out.cliques.back();
      current.insert(std::upper_bound(current.begin(), current.end(), pick), pick);
    }
    prev_weight = weight[pick];
    visited[pick] = 1;
    for (int w : nbrs[pick]) {
      if (!visited[w]) ++weight[w];
    }
  }

  const int m = out.size();
  out.separators.assign(m, {});
  out.rip_parent.assign(m, std::nullopt);
  std::set<int> seen(out.cliques[0].begin(), out.cliques[0].end());
  for (int i = 1; i < m; ++i) {
    auto& sep = out.separators[i];
    for (int v : out.cliques[i]) {
      if (seen.count(v)) sep.push_back(v);
    }
    if (!sep.empty()) {
      for (int j = 0; j < i; ++j) {
        if (std::includes(out.cliques[j].begin(), out.cliques[j].end(), sep.begin(),
                          sep.end())) {
          out.rip_parent[i] = j;
          break;
        }
      }
      if (!out.rip_parent[i]) {
        throw Error(ErrorKind::NotDecomposable,
                    "running intersection fails at clique " + std::to_string(i + 1));
      }
    }
    seen.insert(out.cliques[i].begin(), out.cliques[i].end());
  }
  return out;
}

std::vector<int> JunctionTree::roots() const {
  std::vector<int> out;
  for (int i = 0; i < clique_set.size(); ++i) {
    if (!clique_set.rip_parent[i]) out.push_back(i);
  }
  return out;
}

std::vector<int> JunctionTree::children(int clique) const {
  std::vector<int> out;
  for (const auto& [parent, child] : edges) {
    if (parent == clique) out.push_back(child);
  }
  return out;
}

std::vector<int> JunctionTree::assigned_vertices(int clique) const {
  std::vector<int> out;
  for (size_t v = 0; v < family_assignment.size(); ++v) {
    if (family_assignment[v] == clique) out.push_back(static_cast<int>(v) + 1);
  }
  return out;
}

JunctionTree build_junction_tree(const Deun& deun) {
  JunctionTree tree;
  tree.clique_set = enumerate_cliques(deun);
  const auto& cs = tree.clique_set;
  for (int j = 1; j < cs.size(); ++j) {
    if (cs.rip_parent[j]) tree.edges.emplace_back(*cs.rip_parent[j], j);
  }
  const int n = deun.size();
  tree.family_assignment.assign(n, -1);
  for (int v = 1; v <= n; ++v) {
    auto family = deun.prob_parents(v);
    family.insert(std::upper_bound(family.begin(), family.end(), v), v);
    for (int c = 0; c < cs.size(); ++c) {
      const auto& clique = cs.cliques[c];
      if (std::includes(clique.begin(), clique.end(), family.begin(), family.end())) {
        tree.family_assignment[v - 1] = c;
        break;
      }
    }
    if (tree.family_assignment[v - 1] < 0) {
      throw Error(ErrorKind::NotDecomposable,
                  "family of vertex " + std::to_string(v) + " is not inside any clique");
    }
  }
  return tree;
}

}  // namespace deun
