#include "causet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "causet/errors.hpp"

namespace causet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

}  // namespace

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Covariate: return "covariate";
    case NodeRole::Treatment: return "treatment";
    case NodeRole::Outcome: return "outcome";
    case NodeRole::Unobserved: return "unobserved";
  }
  return "covariate";
}

bool is_identifier(std::string_view s) noexcept {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

CausalGraph::CausalGraph(std::vector<Node> nodes,
                         std::vector<std::pair<std::string, std::string>> edges)
    : nodes_(std::move(nodes)) {
  std::map<std::string, std::size_t, std::less<>> lookup;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!is_identifier(nodes_[i].name)) {
      throw ParseError("invalid node name '" + nodes_[i].name + "'");
    }
    if (!lookup.emplace(nodes_[i].name, i).second) {
      throw ParseError("duplicate node '" + nodes_[i].name + "'");
    }
  }
  parents_.assign(nodes_.size(), {});
  children_.assign(nodes_.size(), {});
  for (const auto& [from, to] : edges) {
    const auto f = lookup.find(from);
    const auto t = lookup.find(to);
    if (f == lookup.end()) throw UnknownNode("edge endpoint '" + from + "' is not a declared node");
    if (t == lookup.end()) throw UnknownNode("edge endpoint '" + to + "' is not a declared node");
    const std::pair edge{f->second, t->second};
    if (std::find(edges_.begin(), edges_.end(), edge) != edges_.end()) continue;
    edges_.push_back(edge);
    children_[edge.first].push_back(edge.second);
    parents_[edge.second].push_back(edge.first);
  }

  // Kahn's algorithm, lowest index first so the order is deterministic.
  std::vector<std::size_t> indegree(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) indegree[i] = parents_[i].size();
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const auto i = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(i);
    for (auto c : children_[i]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (topo_.size() != nodes_.size()) {
    std::string cyclic;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (indegree[i] > 0) cyclic += (cyclic.empty() ? "" : ", ") + nodes_[i].name;
    }
    throw CycleError("graph has a directed cycle through: " + cyclic);
  }
}

bool CausalGraph::contains(std::string_view name) const noexcept {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.name == name; });
}

std::size_t CausalGraph::index(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  throw UnknownNode("unknown node '" + std::string(name) + "'");
}

std::optional<std::string> CausalGraph::treatment() const {
  for (const auto& n : nodes_) {
    if (n.role == NodeRole::Treatment) return n.name;
  }
  return std::nullopt;
}

std::optional<std::string> CausalGraph::outcome() const {
  for (const auto& n : nodes_) {
    if (n.role == NodeRole::Outcome) return n.name;
  }
  return std::nullopt;
}

std::vector<bool> CausalGraph::descendants(std::size_t from) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{from};
  seen.at(from) = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto c : children_[v]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return seen;
}

std::vector<bool> CausalGraph::ancestors(const std::vector<bool>& seeds) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i]) {
      seen[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto p : parents_[v]) {
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

CausalGraph CausalGraph::without_outgoing(std::size_t node) const {
  std::vector<std::pair<std::string, std::string>> kept;
  for (const auto& [f, t] : edges_) {
    if (f != node) kept.emplace_back(nodes_[f].name, nodes_[t].name);
  }
  return CausalGraph(nodes_, std::move(kept));
}

bool operator==(const CausalGraph& a, const CausalGraph& b) {
  auto node_set = [](const CausalGraph& g) {
    std::map<std::string, NodeRole> m;
    for (const auto& n : g.nodes_) m.emplace(n.name, n.role);
    return m;
  };
  auto edge_set = [](const CausalGraph& g) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& [f, t] : g.edges_) s.emplace(g.nodes_[f].name, g.nodes_[t].name);
    return s;
  };
  return node_set(a) == node_set(b) && edge_set(a) == edge_set(b);
}

CausalGraph parse_graph(std::string_view text) {
  std::vector<CausalGraph::Node> nodes;
  std::map<std::string, std::size_t, std::less<>> lookup;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, NodeRole> declared_roles;

  auto declare = [&](std::string_view name, std::size_t line) -> std::size_t {
    if (!is_identifier(name)) {
      throw ParseError("line " + std::to_string(line) + ": invalid node name '" +
                       std::string(name) + "'");
    }
    auto it = lookup.find(name);
    if (it != lookup.end()) return it->second;
    nodes.push_back({std::string(name), NodeRole::Covariate});
    lookup.emplace(std::string(name), nodes.size() - 1);
    return nodes.size() - 1;
  };

  std::size_t line_no = 0;
  for (auto raw_line : split_on(text, "\n")) {
    ++line_no;
    if (const auto hash = raw_line.find('#'); hash != std::string_view::npos) {
      raw_line = raw_line.substr(0, hash);
    }
    for (auto stmt : split_on(raw_line, ";")) {
      stmt = trim(stmt);
      if (stmt.empty()) continue;
      if (stmt.front() == '@') {
        const auto space = stmt.find_first_of(" \t");
        if (space == std::string_view::npos) {
          throw ParseError("line " + std::to_string(line_no) + ": role line needs a node name");
        }
        const auto keyword = stmt.substr(1, space - 1);
        const auto name = trim(stmt.substr(space));
        NodeRole role;
        if (keyword == "treatment") role = NodeRole::Treatment;
        else if (keyword == "outcome") role = NodeRole::Outcome;
        else if (keyword == "unobserved") role = NodeRole::Unobserved;
        else if (keyword == "covariate") role = NodeRole::Covariate;
        else {
          throw ParseError("line " + std::to_string(line_no) + ": unknown role '@" +
                           std::string(keyword) + "'");
        }
        const auto idx = declare(name, line_no);
        auto [it, inserted] = declared_roles.emplace(nodes[idx].name, role);
        if (!inserted && it->second != role) {
          throw RoleError("node '" + nodes[idx].name + "' declared with two roles");
        }
        nodes[idx].role = role;
        continue;
      }
      const auto parts = split_on(stmt, "->");
      if (parts.size() == 1) {
        declare(trim(parts[0]), line_no);
        continue;
      }
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const auto from = trim(parts[i]);
        const auto to = trim(parts[i + 1]);
        if (from.empty() || to.empty()) {
          throw ParseError("line " + std::to_string(line_no) + ": malformed edge '" +
                           std::string(stmt) + "'");
        }
        declare(from, line_no);
        declare(to, line_no);
        edges.emplace_back(std::string(from), std::string(to));
      }
    }
  }

  const auto count = [&](NodeRole r) {
    return std::count_if(nodes.begin(), nodes.end(), [&](const auto& n) { return n.role == r; });
  };
  const auto treatments = count(NodeRole::Treatment);
  const auto outcomes = count(NodeRole::Outcome);
  if ((treatments > 0 || outcomes > 0) && (treatments != 1 || outcomes != 1)) {
    throw RoleError("expected exactly one @treatment and one @outcome, found " +
                    std::to_string(treatments) + " and " + std::to_string(outcomes));
  }
  return CausalGraph(std::move(nodes), std::move(edges));
}

CausalGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

std::string serialize_graph(const CausalGraph& g) {
  std::vector<const CausalGraph::Node*> sorted;
  for (const auto& n : g.nodes()) sorted.push_back(&n);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });

  std::ostringstream out;
  for (auto* n : sorted) {
    out << '@' << to_string(n->role) << ' ' << n->name << '\n';
  }
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& [f, t] : g.edges()) edges.emplace(g.name(f), g.name(t));
  for (const auto& [f, t] : edges) out << f << " -> " << t << '\n';
  return out.str();
}

namespace {

constexpr std::size_t kNoCut = static_cast<std::size_t>(-1);

/// Reusable buffers for repeated separation queries on one graph.
struct Scratch {
  std::vector<char> in_z_ancestry;
  std::vector<char> visited;  // 2 per node: arrived going up / going down
  std::vector<std::pair<std::size_t, bool>> queue;
  std::vector<std::size_t> stack;
};

/// d-separation in `g` with the edges leaving `cut` ignored (kNoCut keeps all),
/// by reachability over (node, direction) states: an active trail may pass a
/// non-collider outside z, and a collider that is in z or has a descendant in z.
bool separated(const CausalGraph& g, std::size_t a, std::size_t b, const std::vector<bool>& z,
               std::size_t cut, Scratch& s) {
  const auto n = g.size();
  s.in_z_ancestry.assign(n, 0);
  s.stack.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (z[v]) {
      s.in_z_ancestry[v] = 1;
      s.stack.push_back(v);
    }
  }
  while (!s.stack.empty()) {
    const auto v = s.stack.back();
    s.stack.pop_back();
    for (auto p : g.parents(v)) {
      if (p == cut || s.in_z_ancestry[p]) continue;
      s.in_z_ancestry[p] = 1;
      s.stack.push_back(p);
    }
  }

  s.visited.assign(2 * n, 0);
  s.queue.assign(1, {a, true});
  while (!s.queue.empty()) {
    const auto [v, up] = s.queue.back();
    s.queue.pop_back();
    auto& mark = s.visited[2 * v + (up ? 0 : 1)];
    if (mark) continue;
    mark = 1;
    if (v == b) return false;
    const bool blocked_here = z[v];
    const bool pass_up = up ? !blocked_here : s.in_z_ancestry[v] != 0;
    const bool pass_down = !blocked_here;
    if (pass_up) {
      for (auto p : g.parents(v))
        if (p != cut) s.queue.emplace_back(p, true);
    }
    if (pass_down && v != cut) {
      for (auto c : g.children(v)) s.queue.emplace_back(c, false);
    }
  }
  return true;
}

}  // namespace

bool d_separated(const CausalGraph& g, std::size_t a, std::size_t b, const std::vector<bool>& z) {
  const auto n = g.size();
  if (a >= n || b >= n) throw UnknownNode("node index out of range");
  if (z.size() != n) throw InvalidArgument("conditioning mask has wrong size");
  if (z[a] || z[b]) throw InvalidArgument("d_separated: endpoints must not be in the conditioning set");
  if (a == b) return false;
  Scratch scratch;
  return separated(g, a, b, z, kNoCut, scratch);
}

bool d_separated(const CausalGraph& g, std::string_view a, std::string_view b, const NodeSet& z) {
  std::vector<bool> mask(g.size(), false);
  for (const auto& name : z) mask[g.index(name)] = true;
  return d_separated(g, g.index(a), g.index(b), mask);
}

std::vector<NodeSet> backdoor_sets(const CausalGraph& g, std::string_view t, std::string_view y,
                                   const BackdoorOptions& options) {
  const auto ti = g.index(t);
  const auto yi = g.index(y);
  if (g.role(ti) != NodeRole::Treatment) {
    throw RoleError("'" + std::string(t) + "' does not have the treatment role");
  }
  if (g.role(yi) != NodeRole::Outcome) {
    throw RoleError("'" + std::string(y) + "' does not have the outcome role");
  }

  const auto desc = g.descendants(ti);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == ti || i == yi || desc[i] || g.role(i) == NodeRole::Unobserved) continue;
    candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](auto l, auto r) { return g.name(l) < g.name(r); });

  std::vector<std::vector<std::size_t>> found;
  std::vector<bool> mask(g.size(), false);
  Scratch scratch;

  const auto limit = std::min(options.max_set_size, candidates.size());
  for (std::size_t k = 0; k <= limit; ++k) {
    // Combinations of k candidate positions in lexicographic order.
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::vector<std::size_t> members;
      for (auto p : pick) members.push_back(candidates[p]);

      const bool has_valid_subset = std::any_of(found.begin(), found.end(), [&](const auto& s) {
        return std::includes(members.begin(), members.end(), s.begin(), s.end(),
                             [&](auto l, auto r) { return g.name(l) < g.name(r); });
      });
      if (!has_valid_subset) {
        for (auto m : members) mask[m] = true;
        if (separated(g, ti, yi, mask, ti, scratch)) found.push_back(members);
        for (auto m : members) mask[m] = false;
      }

      // Advance to the next combination.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == candidates.size() - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (auto j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }

  if (found.empty()) {
    std::vector<bool> seeds(g.size(), false);
    seeds[ti] = seeds[yi] = true;
    auto anc = seeds;
    std::vector<std::size_t> stack{ti, yi};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto p : g.parents(v)) {
        if (p == ti || anc[p]) continue;
        anc[p] = true;
        stack.push_back(p);
      }
    }
    std::string hidden;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (anc[i] && g.role(i) == NodeRole::Unobserved) {
        hidden += (hidden.empty() ? "" : ", ") + g.name(i);
      }
    }
    throw NotIdentifiable("no set of observed non-descendants of '" + std::string(t) +
                          "' blocks every backdoor path to '" + std::string(y) + "'" +
                          (hidden.empty() ? std::string() : "; unobserved confounders: " + hidden));
  }

  std::vector<NodeSet> result;
  for (const auto& s : found) {
    NodeSet names;
    for (auto i : s) names.insert(g.name(i));
    result.push_back(std::move(names));
  }
  std::stable_sort(result.begin(), result.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return result;
}

std::vector<NodeSet> backdoor_sets(const CausalGraph& g, const BackdoorOptions& options) {
  const auto t = g.treatment();
  const auto y = g.outcome();
  if (!t || !y) throw RoleError("graph does not declare @treatment and @outcome");
  return backdoor_sets(g, *t, *y, options);
}

}  // namespace causet
