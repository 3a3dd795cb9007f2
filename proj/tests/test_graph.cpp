#include <doctest.h>

#include <random>

#include "causet/errors.hpp"
#include "causet/graph.hpp"
#include "support/graph_oracle.hpp"

using namespace causet;

namespace {

const std::vector<std::string> kNames{"A", "B", "C", "D", "E"};

CausalGraph to_graph(const oracle::SmallDag& d, int t = -1, int y = -1, std::uint32_t hidden = 0) {
  std::vector<CausalGraph::Node> nodes;
  for (int i = 0; i < d.n; ++i) {
    auto role = NodeRole::Covariate;
    if (i == t) role = NodeRole::Treatment;
    else if (i == y) role = NodeRole::Outcome;
    else if ((hidden >> i) & 1u) role = NodeRole::Unobserved;
    nodes.push_back({kNames[i], role});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      if (d.edge(i, j)) edges.emplace_back(kNames[i], kNames[j]);
  return CausalGraph(std::move(nodes), std::move(edges));
}

std::vector<std::vector<std::string>> as_lists(const std::vector<NodeSet>& sets) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

}  // namespace

TEST_CASE("confounded triangle parses") {
  const auto g = parse_graph("Z -> T; Z -> Y; T -> Y\n@treatment T\n@outcome Y\n");
  CHECK(g.size() == 3);
  CHECK(g.edges().size() == 3);
  CHECK(g.treatment() == "T");
  CHECK(g.outcome() == "Y");
  CHECK(g.role(g.index("Z")) == NodeRole::Covariate);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_graph("A -> B; B -> A"), CycleError);
  CHECK_THROWS_AS(parse_graph("A -> A"), CycleError);
  CHECK_THROWS_AS(parse_graph("A => B"), ParseError);
  CHECK_THROWS_AS(parse_graph("1A -> B"), ParseError);
  CHECK_THROWS_AS(parse_graph("@sideways A"), ParseError);
  CHECK_THROWS_AS(parse_graph("A -> B\n@treatment A\n@treatment B\n@outcome B"), RoleError);
  CHECK_THROWS_AS(parse_graph("A -> B\n@treatment A"), RoleError);
}

TEST_CASE("chains, comments and unobserved nodes") {
  const auto g = parse_graph(
      "# windows\n"
      "  U1 -> windows -> elec   # inline\n"
      "U1 -> elec\n"
      "@unobserved U1\n"
      "@treatment windows\n"
      "@outcome elec\n"
      "@covariate lonely\n");
  CHECK(g.size() == 4);
  CHECK(g.edges().size() == 3);
  CHECK(g.role(g.index("U1")) == NodeRole::Unobserved);
  CHECK(g.children(g.index("lonely")).empty());
  CHECK_THROWS_AS(g.index("nobody"), UnknownNode);
}

TEST_CASE("topological order respects edges") {
  const auto g = parse_graph("C -> A; B -> A; C -> B; D");
  std::vector<std::size_t> pos(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) pos[g.topological_order()[k]] = k;
  for (auto [f, t] : g.edges()) CHECK(pos[f] < pos[t]);
}

TEST_CASE("serialize round trip on random graphs") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 6);
    std::vector<CausalGraph::Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({"v" + std::to_string(i), NodeRole::Covariate});
    nodes[0].role = NodeRole::Treatment;
    nodes[1].role = NodeRole::Outcome;
    if (n > 2 && gen() % 2) nodes[2].role = NodeRole::Unobserved;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (gen() % 3 == 0) edges.emplace_back(nodes[i].name, nodes[j].name);
    const CausalGraph g(nodes, edges);
    CHECK(parse_graph(serialize_graph(g)) == g);
  }
}

TEST_CASE("d-separation basics") {
  const auto chain = parse_graph("A -> B -> C");
  CHECK(d_separated(chain, "A", "C", {"B"}));
  CHECK_FALSE(d_separated(chain, "A", "C", {}));
  const auto collider = parse_graph("A -> C; B -> C; C -> D");
  CHECK(d_separated(collider, "A", "B", {}));
  CHECK_FALSE(d_separated(collider, "A", "B", {"C"}));
  CHECK_FALSE(d_separated(collider, "A", "B", {"D"}));
  CHECK_THROWS_AS(d_separated(chain, "A", "Q", {}), UnknownNode);
  CHECK_THROWS_AS(d_separated(chain, "A", "C", {"A"}), InvalidArgument);
}

TEST_CASE("backdoor basics") {
  auto g = parse_graph("Z -> T; Z -> Y; T -> Y\n@treatment T\n@outcome Y");
  CHECK(as_lists(backdoor_sets(g)) == std::vector<std::vector<std::string>>{{"Z"}});
  g = parse_graph("T -> Y\n@treatment T\n@outcome Y");
  CHECK(as_lists(backdoor_sets(g)) == std::vector<std::vector<std::string>>{{}});
  g = parse_graph("U -> T; U -> Y; T -> Y\n@treatment T\n@outcome Y\n@unobserved U");
  CHECK_THROWS_AS(backdoor_sets(g), NotIdentifiable);
  g = parse_graph("T -> Y\n@covariate Q");
  CHECK_THROWS_AS(backdoor_sets(g, "T", "Y"), RoleError);
}

TEST_CASE("backdoor ordering and mediator exclusion") {
  const auto g = parse_graph(
      "A -> T; A -> Y; B -> T; B -> Y; C -> A; C -> B; T -> M; M -> Y\n"
      "@treatment T\n@outcome Y");
  const auto sets = as_lists(backdoor_sets(g));
  CHECK(sets == std::vector<std::vector<std::string>>{{"A", "B"}});
  for (const auto& s : backdoor_sets(g)) CHECK_FALSE(s.contains("M"));
}

TEST_CASE("d-separation symmetry and oracle agreement on random 5-node DAGs") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 300; ++rep) {
    oracle::SmallDag d;
    d.n = 5;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (gen() % 2) d.adj[i] |= 1u << j;
    const auto g = to_graph(d);
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b)
        for (std::uint32_t z = 0; z < 32; ++z) {
          if ((z >> a) & 1u || (z >> b) & 1u) continue;
          NodeSet zs;
          for (int i = 0; i < 5; ++i)
            if ((z >> i) & 1u) zs.insert(kNames[i]);
          const bool got = d_separated(g, kNames[a], kNames[b], zs);
          CHECK(got == d_separated(g, kNames[b], kNames[a], zs));
          CHECK(got == oracle::d_separated(d, a, b, z));
        }
  }
}

TEST_CASE("returned backdoor sets block every backdoor path") {
  for (const auto& d : oracle::all_dags(4)) {
    const auto g = to_graph(d, 0, 3);
    try {
      for (const auto& s : backdoor_sets(g)) {
        const auto cut = g.without_outgoing(0);
        CHECK(d_separated(cut, "A", "D", s));
      }
    } catch (const NotIdentifiable&) {
    }
  }
}

TEST_CASE("backdoor sets match brute force on every 4-node DAG with hidden nodes") {
  const auto dags = oracle::all_dags(4);
  CHECK(dags.size() == 543);
  std::size_t mismatches = 0;
  for (const auto& d : dags) {
    for (int t = 0; t < 4; ++t)
      for (int y = 0; y < 4; ++y) {
        if (t == y) continue;
        const auto valid = oracle::valid_backdoor_sets(d, t, y);
        for (std::uint32_t hidden = 0; hidden < 16; ++hidden) {
          if ((hidden >> t) & 1u || (hidden >> y) & 1u) continue;
          const auto g = to_graph(d, t, y, hidden);
          const std::uint32_t allowed = 0xFu & ~hidden & ~(1u << t) & ~(1u << y);
          const auto expect = oracle::minimal_sets(valid, allowed, std::vector<std::string>(kNames.begin(), kNames.begin() + 4));
          try {
            if (as_lists(backdoor_sets(g)) != expect) ++mismatches;
          } catch (const NotIdentifiable&) {
            if (!expect.empty()) ++mismatches;
          }
        }
      }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("size cap") {
  const auto g = parse_graph("A -> T; A -> Y; B -> T; B -> Y; T -> Y\n@treatment T\n@outcome Y");
  CHECK_THROWS_AS(backdoor_sets(g, "T", "Y", BackdoorOptions{1}), NotIdentifiable);
  CHECK(backdoor_sets(g, "T", "Y", BackdoorOptions{2}).size() == 1);
}
