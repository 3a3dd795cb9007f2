#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causet {

enum class NodeRole { Covariate, Treatment, Outcome, Unobserved };

std::string_view to_string(NodeRole role);

using NodeSet = std::set<std::string>;

/// Immutable causal DAG. Nodes keep declaration order; indices are stable.
class CausalGraph {
 public:
  struct Node {
    std::string name;
    NodeRole role = NodeRole::Covariate;
    friend bool operator==(const Node&, const Node&) = default;
  };

  CausalGraph() = default;

  /// Validates acyclicity, identifier syntax and edge endpoints.
  /// Throws ParseError, UnknownNode, CycleError.
  CausalGraph(std::vector<Node> nodes,
              std::vector<std::pair<std::string, std::string>> edges);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept {
    return edges_;
  }

  bool contains(std::string_view name) const noexcept;
  /// Throws UnknownNode.
  std::size_t index(std::string_view name) const;
  const std::string& name(std::size_t i) const { return nodes_.at(i).name; }
  NodeRole role(std::size_t i) const { return nodes_.at(i).role; }

  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }

  /// Node indices in a topological order (parents before children).
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  std::optional<std::string> treatment() const;
  std::optional<std::string> outcome() const;

  /// Indices of `from` and every node reachable from it.
  std::vector<bool> descendants(std::size_t from) const;
  /// Indices of nodes in `seeds` plus all their ancestors.
  std::vector<bool> ancestors(const std::vector<bool>& seeds) const;

  /// Copy of the graph with all edges leaving `node` removed.
  CausalGraph without_outgoing(std::size_t node) const;

  /// Equality is on the node set (name, role) and the edge set; declaration
  /// order does not matter.
  friend bool operator==(const CausalGraph& a, const CausalGraph& b);

 private:
  std::vector<Node> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

/// Parses the line-oriented graph format:
///
///     # comment
///     A -> B          (chains `A -> B -> C` allowed, `;` separates statements)
///     @treatment T
///     @outcome Y
///     @unobserved U1  (repeatable)
///     @covariate X    (declares an isolated node)
///
/// Throws ParseError, CycleError, and RoleError when treatment/outcome roles
/// are declared but not exactly one of each.
CausalGraph parse_graph(std::string_view text);
CausalGraph load_graph(const std::string& path);

/// Canonical text form; parse_graph(serialize_graph(g)) == g.
std::string serialize_graph(const CausalGraph& g);

/// d-separation of `a` and `b` given `z` via reachability in the moralized
/// ancestral graph. Throws UnknownNode, InvalidArgument if a or b is in z.
bool d_separated(const CausalGraph& g, std::string_view a, std::string_view b,
                 const NodeSet& z);
bool d_separated(const CausalGraph& g, std::size_t a, std::size_t b,
                 const std::vector<bool>& z);

struct BackdoorOptions {
  std::size_t max_set_size = 8;
};

/// All inclusion-minimal backdoor adjustment sets for (t, y), ordered by
/// cardinality then lexicographically. Throws NotIdentifiable when no set of
/// observed non-descendants of t (up to the size cap) blocks every backdoor path.
std::vector<NodeSet> backdoor_sets(const CausalGraph& g, std::string_view t,
                                   std::string_view y, const BackdoorOptions& options = {});

/// Uses the graph's declared treatment and outcome roles.
std::vector<NodeSet> backdoor_sets(const CausalGraph& g, const BackdoorOptions& options = {});

bool is_identifier(std::string_view s) noexcept;

}  // namespace causet
