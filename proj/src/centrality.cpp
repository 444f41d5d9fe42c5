#include "eiginf/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "eiginf/perturb.hpp"

namespace eiginf {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_number(const std::string& field, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(field, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == field.size() && std::isfinite(out);
}

// Unit Euclidean norm, first non-negligible entry positive.
Vec canonical(Vec s) {
  const double norm = s.norm();
  if (norm > 0.0) s /= norm;
  const double cut = 1e-12 * s.cwiseAbs().maxCoeff();
  for (Index i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) > cut) {
      if (s[i] < 0.0) s = -s;
      break;
    }
  }
  return s;
}

}  // namespace

DirectedGraph::DirectedGraph(const std::vector<Edge>& edges,
                             const std::vector<std::string>& extra_vertices) {
  std::set<std::string> vertices(extra_vertices.begin(), extra_vertices.end());
  for (const Edge& e : edges) {
    vertices.insert(e.from);
    vertices.insert(e.to);
  }
  labels_.assign(vertices.begin(), vertices.end());
  for (const Edge& e : edges) add_edge(e.from, e.to, e.weight);
}

void DirectedGraph::add_vertex(std::string_view label) {
  const std::string l(label);
  auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
  if (it == labels_.end() || *it != l) labels_.insert(it, l);
}

Index DirectedGraph::vertex_index(std::string_view label) const {
  const std::string l(label);
  auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
  if (it == labels_.end() || *it != l) throw InputError("unknown vertex '" + l + "'");
  return static_cast<Index>(it - labels_.begin());
}

void DirectedGraph::add_edge(std::string_view from, std::string_view to, double weight) {
  vertex_index(from);
  vertex_index(to);
  if (!std::isfinite(weight)) {
    throw InputError("edge " + std::string(from) + " -> " + std::string(to) +
                     " has a non-finite weight");
  }
  edges_.push_back(Edge{std::string(from), std::string(to), weight});
}

std::vector<Edge> DirectedGraph::edges() const {
  std::map<std::pair<std::string, std::string>, double> total;
  for (const Edge& e : edges_) total[{e.from, e.to}] += e.weight;
  std::vector<Edge> out;
  out.reserve(total.size());
  for (const auto& [key, w] : total) out.push_back(Edge{key.first, key.second, w});
  return out;
}

Mat adjacency(const DirectedGraph& g) {
  const Index p = g.size();
  Mat a = Mat::Zero(p, p);
  for (const Edge& e : g.edges()) a(g.vertex_index(e.from), g.vertex_index(e.to)) += e.weight;
  return a;
}

std::vector<Mat> adjacency_series(const std::vector<DirectedGraph>& graphs,
                                  std::vector<std::string>* labels) {
  std::set<std::string> all;
  for (const auto& g : graphs) all.insert(g.vertex_labels().begin(), g.vertex_labels().end());
  const std::vector<std::string> merged(all.begin(), all.end());
  std::vector<Mat> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) {
    DirectedGraph full(g.edges(), merged);
    out.push_back(adjacency(full));
  }
  if (labels) *labels = merged;
  return out;
}

DirectedGraph parse_edge_list_csv(std::string_view text, std::string_view source) {
  std::vector<Edge> edges;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    auto where = [&](std::size_t col) {
      std::ostringstream os;
      os << source << ":" << line_no << ":" << col;
      return os.str();
    };
    if (fields.size() != 3) {
      throw InputError(where(1) + ": expected 'from,to,weight', got " +
                       std::to_string(fields.size()) + " fields");
    }
    double w = 0.0;
    if (!parse_number(fields[2], w)) {
      if (edges.empty() && line_no == 1) continue;  // header
      throw InputError(where(3) + ": cannot parse weight '" + fields[2] + "'");
    }
    if (fields[0].empty() || fields[1].empty()) throw InputError(where(1) + ": empty vertex label");
    edges.push_back(Edge{fields[0], fields[1], w});
  }
  return DirectedGraph(edges);
}

DirectedGraph graph_from_json(const Json& j, std::string_view source) {
  const std::string src(source);
  std::vector<Edge> edges;
  std::vector<std::string> vertices;
  auto edge_of = [&](const Json& e, std::size_t i) {
    try {
      if (e.is_array() && e.size() == 3) {
        return Edge{e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<double>()};
      }
      if (e.is_object()) {
        return Edge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                    e.value("weight", 1.0)};
      }
    } catch (const Json::exception&) {
    }
    throw InputError(src + ": edge " + std::to_string(i + 1) +
                     " must be [from, to, weight] or {from, to, weight}");
  };
  const Json* list = &j;
  if (j.is_object()) {
    if (!j.contains("edges")) throw InputError(src + ": graph object needs an 'edges' array");
    list = &j.at("edges");
    if (j.contains("vertices")) {
      for (const auto& v : j.at("vertices")) {
        if (!v.is_string()) throw InputError(src + ": vertex labels must be strings");
        vertices.push_back(v.get<std::string>());
      }
    }
  }
  if (!list->is_array()) throw InputError(src + ": edges must be an array");
  for (std::size_t i = 0; i < list->size(); ++i) edges.push_back(edge_of((*list)[i], i));
  if (!vertices.empty()) {
    const std::set<std::string> known(vertices.begin(), vertices.end());
    for (const Edge& e : edges) {
      for (const auto* label : {&e.from, &e.to}) {
        if (!known.count(*label)) throw InputError(src + ": unknown vertex '" + *label + "'");
      }
    }
  }
  return DirectedGraph(edges, vertices);
}

DirectedGraph read_graph(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") {
    try {
      return graph_from_json(Json::parse(text), path.string());
    } catch (const Json::parse_error& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  return parse_edge_list_csv(text, path.string());
}

std::vector<DirectedGraph> read_graph_series(const std::filesystem::path& path) {
  std::vector<DirectedGraph> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(read_graph(f));
  } else {
    Json j;
    try {
      j = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw InputError(path.string() + ": expected an array of graphs");
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(graph_from_json(j[i], path.string() + "[" + std::to_string(i) + "]"));
    }
  }
  if (out.empty()) throw InputError(path.string() + ": no graph snapshots found");
  return out;
}

CentralityResult katz_scores(const Mat& a, const SpectralTolerances& tol) {
  require_square(a, "katz_scores");
  require_finite(a, "katz_scores");
  if (a.rows() == 0) throw DimensionError("katz_scores: empty matrix");
  const Spectrum s = eig_nonsym(a, tol);
  const double top = std::abs(s.eigenvalues[0]);
  std::vector<Index> dominant;
  for (Index i = 0; i < s.size(); ++i) {
    if (top - std::abs(s.eigenvalues[i]) <= tol.cluster_rel * (1.0 + top)) dominant.push_back(i);
  }

  CentralityResult out;
  auto tie = [&]() {
    std::ostringstream os;
    os << "katz_scores: " << dominant.size() << " roots share the maximal modulus " << top
       << "; the dominant eigenvector is not identified (break the symmetry, e.g. "
          "perturb edge weights)";
    return DominantRootTieError(os.str());
  };
  const Complex lead = s.eigenvalues[dominant[0]];
  if (dominant.size() == 1 && s.is_real(dominant[0])) {
    out.root = lead;
    out.dominant_root = lead.real();
    out.scores = canonical(s.right.col(dominant[0]).real());
  } else if (dominant.size() == 2 && !s.is_real(dominant[0]) &&
             std::abs(s.eigenvalues[dominant[1]] - std::conj(lead)) <=
                 tol.cluster_rel * (1.0 + top)) {
    const Index pos = lead.imag() > 0.0 ? dominant[0] : dominant[1];
    out.root = s.eigenvalues[pos];
    out.dominant_root = std::abs(out.root);
    out.used_modulus = true;
    out.scores = canonical(s.right.col(pos).cwiseAbs());
    out.warnings.push_back("dominant root is a complex pair; scores are entrywise moduli");
  } else if (dominant.size() == 2 && s.is_real(dominant[0]) && s.is_real(dominant[1]) &&
             lead.real() > 0.0 && s.eigenvalues[dominant[1]].real() < 0.0) {
    out.root = lead;
    out.dominant_root = lead.real();
    out.scores = canonical(s.right.col(dominant[0]).real());
    out.warnings.push_back("roots +rho and -rho tie in modulus; using +rho");
  } else {
    throw tie();
  }
  if (!out.used_modulus && out.dominant_root < 0.0) {
    out.warnings.push_back("dominant root is negative; Perron-style interpretation fails");
  }
  return out;
}

MembershipResult score_in_confidence_set(const MatrixSample& sample, const Vec& s0,
                                         double alpha, const TestOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgumentError("alpha must lie in (0, 1)");
  if (s0.size() != sample.dim()) {
    throw DimensionError("score vector has length " + std::to_string(s0.size()) +
                         ", expected " + std::to_string(sample.dim()));
  }
  if (!s0.allFinite() || s0.norm() == 0.0) {
    throw InvalidArgumentError("score vector must be finite and nonzero");
  }
  Hypothesis hyp;
  hyp.candidate = s0;
  hyp.selector = RootSelector::largest_modulus(1).close_conjugates();
  MembershipResult out;
  out.report = wald_test(sample, hyp, options);
  out.threshold = upper_quantile(alpha, out.report.reference);
  out.inside = out.report.statistic <= out.threshold;
  return out;
}

std::vector<ScoreInterval> score_intervals(const MatrixSample& sample, double alpha,
                                           const SpectralTolerances& tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgumentError("alpha must lie in (0, 1)");
  const NormalizedEstimate est = estimate_D(sample, RootSelector::largest_modulus(1), tol);
  if (est.roots.size() != 1 || est.roots[0].imag() != 0.0) {
    throw InvalidArgumentError("score_intervals: dominant root must be real and simple");
  }
  const double z = upper_quantile(alpha / 2.0, Distribution::std_normal());
  std::vector<ScoreInterval> out;
  for (Index i = 0; i < est.d_hat.rows(); ++i) {
    const double var = est.variance(i, 0);
    if (var < -1e-12 * est.omega_d.cwiseAbs().maxCoeff()) {
      throw NonpositiveVarianceError("score_intervals: negative variance estimate");
    }
    ScoreInterval ci;
    ci.index = i;
    ci.estimate = est.d_hat(i, 0);
    ci.std_error = std::sqrt(std::max(var, 0.0));
    ci.lo = ci.estimate - z * ci.std_error;
    ci.hi = ci.estimate + z * ci.std_error;
    out.push_back(ci);
  }
  return out;
}

}  // namespace eiginf
