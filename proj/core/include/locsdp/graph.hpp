#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "locsdp/geometry.hpp"

namespace locsdp {

struct Edge {
  int u;
  int v;
  double w = 1.0;
};

// Undirected weighted graph on vertices 0..n-1; parallel edges merge by
// adding weights.
class Graph {
 public:
  explicit Graph(int n = 0);

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  void add_edge(int u, int v, double w = 1.0);
  double weight(int u, int v) const;
  double degree(int u) const;
  double total_weight() const;
  DenseMatrix adjacency() const;
  bool connected() const;

 private:
  int n_;
  std::vector<Edge> edges_;
};

// Edge-list lines "u v [w]" with 1-based vertices; '#' starts a comment.
// The vertex count is the largest index seen unless `min_vertices` is larger.
Graph parse_graph(std::istream& in, int min_vertices = 0);
Graph ingest_graph(const std::string& path, int min_vertices = 0);
std::string format_graph(const Graph& g);

// Eigenvalues of I - D^{-1/2} A D^{-1/2}, ascending. Isolated vertices
// contribute a zero row, hence eigenvalue 1 of the identity part; `isolated`
// reports whether any were present.
struct Spectrum {
  std::vector<double> values;
  bool isolated = false;
};
Spectrum laplacian_spectrum(const Graph& g);

Graph cycle_graph(int n);
Graph path_graph(int n);
Graph complete_graph(int n);
Graph complete_bipartite_graph(int a, int b);
Graph petersen_graph();
// Two triangles joined by a perfect matching (n = 2m for the m-prism).
Graph prism_graph(int m);
// Every connected graph on n <= 6 vertices, one per edge set.
std::vector<Graph> all_connected_graphs(int n);
// One representative per isomorphism class of connected unweighted graphs
// on n <= 6 vertices (1, 1, 2, 6, 21, 112 classes for n = 1..6).
std::vector<Graph> connected_graphs_up_to_isomorphism(int n);

// Generated graph from "cycle:N", "path:N", "complete:N", "bipartite:A:B",
// "prism:M" or "petersen". Throws InvalidArgument on an unknown name.
Graph named_graph(const std::string& name);

}  // namespace locsdp
