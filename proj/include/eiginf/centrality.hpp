#pragma once

// Eigenvector (Katz/Bonacich) centrality of directed trade graphs and its
// sampling inference: Wald-inversion membership tests for score vectors and
// coordinatewise confidence intervals for score ratios s_i / s_p.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eiginf/inference.hpp"
#include "eiginf/matrix_io.hpp"

namespace eiginf {

struct Edge {
  std::string from;
  std::string to;
  double weight = 1.0;  // signed flow; negative entries are allowed
};

class DirectedGraph {
 public:
  DirectedGraph() = default;
  // Vertices are collected from the edges (plus `extra_vertices`) and sorted.
  explicit DirectedGraph(const std::vector<Edge>& edges,
                         const std::vector<std::string>& extra_vertices = {});

  // Adds weight to the (from, to) entry; both endpoints must already exist.
  void add_edge(std::string_view from, std::string_view to, double weight);
  void add_vertex(std::string_view label);

  const std::vector<std::string>& vertex_labels() const { return labels_; }
  // Aggregated edges, one per ordered pair, in (from, to) label order.
  std::vector<Edge> edges() const;
  Index vertex_index(std::string_view label) const;  // throws InputError
  Index size() const { return static_cast<Index>(labels_.size()); }

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;  // raw, possibly repeated
};

// A[i][j] = total weight of edges i -> j in label-lexicographic order.
Mat adjacency(const DirectedGraph& g);
// Adjacency matrices of several snapshots on the union of their vertices.
std::vector<Mat> adjacency_series(const std::vector<DirectedGraph>& graphs,
                                  std::vector<std::string>* labels = nullptr);

// CSV "from,to,weight" (optional header line); JSON {"vertices": [...],
// "edges": [{"from","to","weight"}]} or an array of [from, to, weight].
DirectedGraph parse_edge_list_csv(std::string_view text, std::string_view source = "<csv>");
DirectedGraph graph_from_json(const Json& j, std::string_view source = "<json>");
DirectedGraph read_graph(const std::filesystem::path& path);
// Directory of edge-list files (sorted by name) or a JSON array of graphs.
std::vector<DirectedGraph> read_graph_series(const std::filesystem::path& path);

struct CentralityResult {
  Vec scores;  // unit norm, first nonzero entry positive
  double dominant_root = 0.0;  // modulus when used_modulus
  Complex root;
  bool used_modulus = false;
  std::vector<std::string> warnings;
};

// Dominant right eigenvector. A dominant conjugate pair yields entrywise
// moduli; an exact {rho, -rho} tie resolves to +rho with a warning; any other
// tie at maximal modulus raises DominantRootTieError.
CentralityResult katz_scores(const Mat& a, const SpectralTolerances& tol = {});

struct MembershipResult {
  bool inside = false;
  double threshold = 0.0;  // chi2 upper-alpha quantile on report.df
  TestReport report;
};

MembershipResult score_in_confidence_set(const MatrixSample& sample, const Vec& s0,
                                         double alpha, const TestOptions& options = {});

struct ScoreInterval {
  Index index = 0;  // coordinate i of the ratio s_i / s_p
  double lo = 0.0;
  double estimate = 0.0;
  double hi = 0.0;
  double std_error = 0.0;
};

// d_i +- z_{1-alpha/2} sigma_i for the [d; 1]-normalized dominant vector.
// These are marginal intervals, not a projection of the joint set.
std::vector<ScoreInterval> score_intervals(const MatrixSample& sample, double alpha,
                                           const SpectralTolerances& tol = {});

}  // namespace eiginf
