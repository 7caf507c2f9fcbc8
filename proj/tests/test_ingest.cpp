#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "lpg/graph.hpp"
#include "lpg/ingest.hpp"
#include "lpg/rng.hpp"

using namespace lpg;

namespace {

std::pair<PropertyGraph, IngestReport> load_string(
    const std::string& text, IngestMode mode = IngestMode::strict) {
  std::istringstream in(text);
  return load_jsonl(in, mode);
}

// Random graph with all property value shapes; used for round-trip checks.
PropertyGraph random_graph(Rng& rng, std::size_t max_nodes,
                           std::size_t max_edges) {
  PropertyGraph g;
  const std::size_t n = 1 + rng.below(max_nodes);
  for (std::size_t i = 0; i < n; ++i) {
    Node node;
    node.id = "n" + std::to_string(i);
    const std::size_t n_labels = rng.below(3);
    for (std::size_t l = 0; l < n_labels; ++l)
      node.labels.push_back("L" + std::to_string(l * 7 + rng.below(2) + i % 3));
    std::sort(node.labels.begin(), node.labels.end());
    node.labels.erase(std::unique(node.labels.begin(), node.labels.end()),
                      node.labels.end());
    switch (rng.below(6)) {
      case 0:
        node.properties["name"] = "node ü" + std::to_string(i);
        break;
      case 1:
        node.properties["count"] =
            static_cast<std::int64_t>(rng.next_u64() % 1000);
        break;
      case 2:
        node.properties["score"] = rng.real01() * 100.0;
        break;
      case 3:
        node.properties["flag"] = (rng.below(2) == 1);
        break;
      case 4:
        node.properties["tags"] =
            std::vector<std::string>{"a", "", "with,comma", "quote\"inside"};
        break;
      default:
        break;  // no properties
    }
    g.add_node(std::move(node));
  }
  const std::size_t m = rng.below(max_edges + 1);
  for (std::size_t i = 0; i < m; ++i) {
    Edge edge;
    edge.id = "e" + std::to_string(i);
    edge.src = "n" + std::to_string(rng.below(n));
    edge.dst = "n" + std::to_string(rng.below(n));
    edge.rel_type = rng.below(2) ? "KNOWS" : "LIKES";
    if (rng.below(3) == 0) edge.properties["weight"] = rng.real01();
    g.add_edge(std::move(edge));
  }
  return g;
}

}  // namespace

TEST_CASE("empty stream loads an empty graph") {
  auto [graph, report] = load_string("");
  REQUIRE(graph.node_count() == 0);
  REQUIRE(graph.edge_count() == 0);
  REQUIRE(report.nodes_loaded == 0);
  REQUIRE(report.edges_loaded == 0);
}

TEST_CASE("nodes and edges load regardless of record order") {
  const std::string text =
      R"({"type":"edge","id":"e1","src":"a","dst":"b","rel_type":"KNOWS"})"
      "\n"
      R"({"type":"node","id":"a","labels":["Person"],"properties":{"name":"Ann"}})"
      "\n"
      R"({"type":"node","id":"b","labels":[],"properties":{"age":31}})"
      "\n";
  auto [graph, report] = load_string(text);
  REQUIRE(report.nodes_loaded == 2);
  REQUIRE(report.edges_loaded == 1);
  REQUIRE(graph.node("a").labels == std::vector<std::string>{"Person"});
  REQUIRE(std::get<std::int64_t>(graph.node("b").properties.at("age")) == 31);
  REQUIRE(graph.neighbors("a", Direction::out).size() == 1);
}

TEST_CASE("strict mode reports 1-based line numbers") {
  SECTION("dangling endpoint") {
    const std::string text =
        R"({"type":"edge","id":"e1","src":"a","dst":"zz","rel_type":"R"})"
        "\n";
    try {
      load_string(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::dangling_endpoint);
      REQUIRE(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }

  SECTION("malformed record on a later line") {
    const std::string text =
        R"({"type":"node","id":"a"})"
        "\n"
        "not json\n";
    try {
      load_string(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::malformed_record);
      REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  SECTION("duplicate id") {
    const std::string text =
        R"({"type":"node","id":"a"})"
        "\n"
        R"({"type":"node","id":"a"})"
        "\n";
    try {
      load_string(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::duplicate_id);
      REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("lenient mode skips bad records and keeps the graph valid") {
  const std::string text =
      R"({"type":"node","id":"a"})"
      "\n"
      "garbage\n"
      R"({"type":"node","id":"a"})"
      "\n"
      R"({"type":"edge","id":"e1","src":"a","dst":"missing","rel_type":"R"})"
      "\n"
      R"({"type":"node","id":"b","properties":{"bad":null}})"
      "\n";
  auto [graph, report] = load_string(text, IngestMode::lenient);
  REQUIRE(graph.node_count() == 1);
  REQUIRE(graph.edge_count() == 0);
  REQUIRE(report.records_skipped == 4);
  REQUIRE(report.warnings.size() == 4);
  REQUIRE(report.warnings[0].first == 2);
  REQUIRE(graph.adjacency_consistent());
}

TEST_CASE("nulls and unsupported property types are malformed") {
  REQUIRE_THROWS_MATCHES(
      load_string(R"({"type":"node","id":"a","properties":{"x":null}})"
                  "\n"),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::malformed_record;
      }));
  REQUIRE_THROWS_AS(
      load_string(R"({"type":"node","id":"a","properties":{"x":[1,2]}})"
                  "\n"),
      Error);
  REQUIRE_THROWS_AS(
      load_string(R"({"type":"node","id":"a","properties":{"x":{"y":1}}})"
                  "\n"),
      Error);
}

TEST_CASE("CSV loading maps columns to text properties") {
  std::istringstream nodes(
      "id,labels,name,country\n"
      "p1,Player,\"Megan\",USA\n"
      "p2,Player;Person,Sam,\n");
  std::istringstream edges(
      "id,src,dst,rel_type,since\n"
      "e1,p1,p2,KNOWS,2019\n");
  auto [graph, report] = load_csv(nodes, edges);
  REQUIRE(report.nodes_loaded == 2);
  REQUIRE(report.edges_loaded == 1);
  const Node& p1 = graph.node("p1");
  REQUIRE(p1.labels == std::vector<std::string>{"Player"});
  REQUIRE(std::get<std::string>(p1.properties.at("name")) == "Megan");
  REQUIRE(std::get<std::string>(p1.properties.at("country")) == "USA");
  // empty cell: no property
  REQUIRE(!graph.node("p2").properties.contains("country"));
  // ';' splits labels, order preserved
  REQUIRE(graph.node("p2").labels ==
          std::vector<std::string>{"Player", "Person"});
  REQUIRE(std::get<std::string>(graph.edge("e1").properties.at("since")) ==
          "2019");
}

TEST_CASE("CSV header-only files load an empty graph") {
  std::istringstream nodes("id,labels\n");
  std::istringstream edges("id,src,dst,rel_type\n");
  auto [graph, report] = load_csv(nodes, edges);
  REQUIRE(graph.node_count() == 0);
  REQUIRE(graph.edge_count() == 0);
}

TEST_CASE("CSV missing required columns") {
  std::istringstream nodes("id,name\nn1,x\n");
  std::istringstream edges("id,src,dst,rel_type\n");
  REQUIRE_THROWS_MATCHES(
      load_csv(nodes, edges), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::missing_required_column;
      }));
}

TEST_CASE("CSV quoting: embedded commas, quotes and newlines") {
  std::istringstream nodes(
      "id,labels,bio\n"
      "n1,X,\"line one\nline two, with comma and \"\"quotes\"\"\"\n");
  std::istringstream edges("id,src,dst,rel_type\n");
  auto [graph, report] = load_csv(nodes, edges);
  REQUIRE(std::get<std::string>(graph.node("n1").properties.at("bio")) ==
          "line one\nline two, with comma and \"quotes\"");
}

TEST_CASE("export emits nodes before edges, sorted by id") {
  PropertyGraph g;
  g.add_node(Node{"b", {}, {}});
  g.add_node(Node{"a", {"X"}, {{"k", std::string("v")}}});
  g.add_edge(Edge{"e1", "b", "a", "R", {}});
  std::ostringstream out;
  REQUIRE(export_jsonl(g, out) == 3);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  REQUIRE(line.rfind(R"({"type":"node","id":"a")", 0) == 0);
  std::getline(lines, line);
  REQUIRE(line.rfind(R"({"type":"node","id":"b")", 0) == 0);
  std::getline(lines, line);
  REQUIRE(line.rfind(R"({"type":"edge","id":"e1")", 0) == 0);
}

TEST_CASE("export of an empty graph emits no records") {
  PropertyGraph g;
  std::ostringstream out;
  REQUIRE(export_jsonl(g, out) == 0);
  REQUIRE(out.str().empty());
}

TEST_CASE("round-trip: export then load reconstructs an equal graph") {
  Rng rng(42);
  for (int round = 0; round < 25; ++round) {
    const PropertyGraph original = random_graph(rng, 20, 40);
    std::ostringstream out;
    export_jsonl(original, out);
    auto [reloaded, report] = load_string(out.str());
    REQUIRE(graphs_equal(original, reloaded));
    REQUIRE(report.nodes_loaded == original.node_count());
    REQUIRE(report.edges_loaded == original.edge_count());
  }
}
