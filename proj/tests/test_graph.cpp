#include <vector>

#include <doctest.h>

#include "de2gnn/errors.hpp"
#include "de2gnn/graph.hpp"

using namespace de2gnn;

TEST_SUITE("graph") {

TEST_CASE("edges canonicalize regardless of orientation and duplicates") {
  Graph g = Graph::from_edges(4, {{1, 0}, {0, 1}, {2, 1}, {3, 2}});
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 3);
  CHECK(g.edge_list() == std::vector<EdgePair>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  auto nb = g.neighbors(1);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 0);
  CHECK(nb[1] == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("invalid edges are rejected") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}}), DataError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), DataError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{-1, 1}}), DataError);
}

TEST_CASE("edge removal") {
  Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  Graph h = g.with_edges_removed({{2, 1}});
  CHECK(h.edge_list() == std::vector<EdgePair>{{0, 1}, {2, 3}});
  CHECK(g.num_edges() == 3);  // original untouched
  CHECK_THROWS_AS(g.with_edges_removed({{0, 3}}), DataError);
  // duplicate mentions of one edge collapse before the existence check
  CHECK(g.with_edges_removed({{1, 2}, {2, 1}}).num_edges() == 2);
}

TEST_CASE("edge addition") {
  Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}});
  Graph h = g.with_edges_added({{3, 2}, {2, 3}});
  CHECK(h.edge_list() == std::vector<EdgePair>{{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS_AS(g.with_edges_added({{1, 1}}), DataError);
  // re-adding an existing edge keeps it single
  CHECK(g.with_edges_added({{0, 1}}).num_edges() == 2);
}

TEST_CASE("tail nodes by degree bound") {
  Graph path = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(tail_nodes(path, 1) == std::vector<NodeId>{0, 3});
  CHECK(tail_nodes(path, 2) == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(tail_nodes(path, 0).empty());
  CHECK_THROWS_AS(tail_nodes(path, -1), ConfigError);

  Graph isolate = Graph::from_edges(3, {{0, 1}});
  CHECK(tail_nodes(isolate, 0) == std::vector<NodeId>{2});
}

TEST_CASE("connectivity") {
  CHECK(Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}).is_connected());
  CHECK_FALSE(Graph::from_edges(3, {{0, 1}}).is_connected());
  CHECK(Graph::from_edges(1, {}).is_connected());
}

}  // TEST_SUITE
