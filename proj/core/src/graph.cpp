#include "locsdp/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "locsdp/errors.hpp"

namespace locsdp {

Graph::Graph(int n) : n_(n) {
  if (n < 0 || n > 64) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph size " + std::to_string(n) + " outside [0, 64]");
  }
}

void Graph::add_edge(int u, int v, double w) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
  }
  if (u == v) {
    throw Error(ErrorCode::kSelfLoop,
                "self-loop at vertex " + std::to_string(u + 1));
  }
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument, "edge weight must be >= 0");
  }
  if (u > v) std::swap(u, v);
  for (Edge& e : edges_) {
    if (e.u == u && e.v == v) {
      e.w += w;
      return;
    }
  }
  edges_.push_back({u, v, w});
}

double Graph::weight(int u, int v) const {
  if (u > v) std::swap(u, v);
  for (const Edge& e : edges_) {
    if (e.u == u && e.v == v) return e.w;
  }
  return 0.0;
}

double Graph::degree(int u) const {
  double d = 0.0;
  for (const Edge& e : edges_) {
    if (e.u == u || e.v == u) d += e.w;
  }
  return d;
}

double Graph::total_weight() const {
  double t = 0.0;
  for (const Edge& e : edges_) t += e.w;
  return t;
}

DenseMatrix Graph::adjacency() const {
  DenseMatrix a = DenseMatrix::Zero(n_, n_);
  for (const Edge& e : edges_) a(e.u, e.v) = a(e.v, e.u) = e.w;
  return a;
}

bool Graph::connected() const {
  if (n_ == 0) return true;
  std::vector<int> parent(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
    return x;
  };
  int components = n_;
  for (const Edge& e : edges_) {
    if (e.w <= 0.0) continue;
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[static_cast<size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

Graph parse_graph(std::istream& in, int min_vertices) {
  struct Raw {
    int u, v;
    double w;
    int line;
  };
  std::vector<Raw> raw;
  std::string line;
  int line_no = 0, max_vertex = min_vertices;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    std::istringstream ss2(line);
    int u = 0, v = 0;
    double w = 1.0;
    if (!(ss2 >> u >> v)) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": expected 'u v [w]'");
    }
    std::string rest;
    if (ss2 >> rest) {
      std::istringstream ws(rest);
      if (!(ws >> w) || !ws.eof()) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(line_no) + ": bad weight");
      }
      if (ss2 >> rest) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(line_no) + ": trailing tokens");
      }
    }
    if (u < 1 || v < 1) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": vertices are 1-based");
    }
    if (u == v) {
      throw Error(ErrorCode::kSelfLoop,
                  "line " + std::to_string(line_no) + ": self-loop at vertex " +
                      std::to_string(u));
    }
    max_vertex = std::max({max_vertex, u, v});
    raw.push_back({u - 1, v - 1, w, line_no});
  }
  Graph g(max_vertex);
  for (const Raw& r : raw) {
    try {
      g.add_edge(r.u, r.v, r.w);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(r.line) + ": " + e.what());
    }
  }
  return g;
}

Graph ingest_graph(const std::string& path, int min_vertices) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return parse_graph(in, min_vertices);
}

std::string format_graph(const Graph& g) {
  std::ostringstream out;
  out.precision(17);
  for (const Edge& e : g.edges()) {
    out << e.u + 1 << ' ' << e.v + 1;
    if (e.w != 1.0) out << ' ' << e.w;
    out << '\n';
  }
  return out.str();
}

Spectrum laplacian_spectrum(const Graph& g) {
  const int n = g.n();
  Spectrum s;
  if (n == 0) return s;
  DenseVector inv_sqrt(n);
  for (int u = 0; u < n; ++u) {
    const double d = g.degree(u);
    if (d > 0.0) {
      inv_sqrt(u) = 1.0 / std::sqrt(d);
    } else {
      inv_sqrt(u) = 0.0;
      s.isolated = true;
    }
  }
  DenseMatrix lap = DenseMatrix::Identity(n, n);
  for (const Edge& e : g.edges()) {
    const double v = e.w * inv_sqrt(e.u) * inv_sqrt(e.v);
    lap(e.u, e.v) -= v;
    lap(e.v, e.u) -= v;
  }
  // Isolated vertices: zero row and column by convention.
  for (int u = 0; u < n; ++u) {
    if (inv_sqrt(u) == 0.0) lap(u, u) = 0.0;
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(lap, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "Laplacian eigensolve failed");
  }
  s.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return s;
}

Graph cycle_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph path_graph(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph complete_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  }
  return g;
}

Graph complete_bipartite_graph(int a, int b) {
  Graph g(a + b);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
  }
  return g;
}

Graph petersen_graph() {
  Graph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

Graph prism_graph(int m) {
  Graph g(2 * m);
  for (int i = 0; i < m; ++i) {
    g.add_edge(i, (i + 1) % m);
    g.add_edge(m + i, m + (i + 1) % m);
    g.add_edge(i, m + i);
  }
  return g;
}

std::vector<Graph> all_connected_graphs(int n) {
  if (n < 1 || n > 6) {
    throw Error(ErrorCode::kTooLarge, "edge-set enumeration supports n <= 6");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<Graph> out;
  const unsigned long long total = 1ULL << pairs.size();
  for (unsigned long long mask = 0; mask < total; ++mask) {
    Graph g(n);
    for (size_t p = 0; p < pairs.size(); ++p) {
      if ((mask >> p) & 1ULL) g.add_edge(pairs[p].first, pairs[p].second);
    }
    if (g.connected()) out.push_back(std::move(g));
  }
  return out;
}

std::vector<Graph> connected_graphs_up_to_isomorphism(int n) {
  std::vector<int> perm(static_cast<size_t>(n));
  // Canonical form: the smallest adjacency bitmask over all relabelings.
  auto canonical = [&](const Graph& g) {
    std::iota(perm.begin(), perm.end(), 0);
    unsigned long long best = ~0ULL;
    do {
      unsigned long long code = 0;
      for (const Edge& e : g.edges()) {
        int a = perm[static_cast<size_t>(e.u)], b = perm[static_cast<size_t>(e.v)];
        if (a > b) std::swap(a, b);
        code |= 1ULL << (a * n + b);
      }
      best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  };
  std::set<unsigned long long> seen;
  std::vector<Graph> out;
  for (Graph& g : all_connected_graphs(n)) {
    if (seen.insert(canonical(g)).second) out.push_back(std::move(g));
  }
  return out;
}

Graph named_graph(const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream ss(name);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto arg = [&](size_t i) {
    if (i >= parts.size()) {
      throw Error(ErrorCode::kInvalidArgument, "missing size in '" + name + "'");
    }
    try {
      return std::stoi(parts[i]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad size in '" + name + "'");
    }
  };
  const std::string kind = parts.empty() ? "" : parts[0];
  if (kind == "cycle") return cycle_graph(arg(1));
  if (kind == "path") return path_graph(arg(1));
  if (kind == "complete") return complete_graph(arg(1));
  if (kind == "bipartite") return complete_bipartite_graph(arg(1), arg(2));
  if (kind == "prism") return prism_graph(arg(1));
  if (kind == "petersen") return petersen_graph();
  throw Error(ErrorCode::kInvalidArgument, "unknown graph '" + name + "'");
}

}  // namespace locsdp
