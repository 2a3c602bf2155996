#ifndef HSIGMA_GRAPH_HPP
#define HSIGMA_GRAPH_HPP

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace hsigma {

struct Edge {
  std::size_t i, j;
  double w;
};

/// Finite connected weighted graph on V plus a pinned vertex. Internally the
/// pinned vertex is the last index, so vertex indices 0..n()-1 form V.
class Graph {
 public:
  /// `labels` lists V (without the pinned vertex); `weights` is square of size
  /// labels.size() + 1 with the pinned vertex last.
  Graph(std::vector<std::string> labels, std::string pinned, Eigen::MatrixXd weights);

  static Graph from_edges(std::vector<std::string> labels, std::string pinned,
                          const std::vector<std::tuple<std::string, std::string, double>>& edges);

  /// |V|.
  std::size_t n() const noexcept { return labels_.size(); }
  /// |V| + 1.
  std::size_t size() const noexcept { return labels_.size() + 1; }
  std::size_t pinned_index() const noexcept { return labels_.size(); }

  const Eigen::MatrixXd& weights() const noexcept { return w_; }
  double w(std::size_t i, std::size_t j) const { return w_(i, j); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& pinned() const noexcept { return pinned_; }
  /// Label of any vertex including the pinned one.
  const std::string& label(std::size_t i) const;
  /// Index of a label (the pinned label maps to pinned_index()); throws FixtureError if absent.
  std::size_t index(const std::string& label) const;

  /// Edges with i < j and positive weight.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Same vertex set, new weight matrix (validated).
  Graph with_weights(Eigen::MatrixXd weights) const;

 private:
  std::vector<std::string> labels_;
  std::string pinned_;
  Eigen::MatrixXd w_;
  std::vector<Edge> edges_;
};

/// Infinite graph given by explicit finite data, with an increasing exhaustion.
class GraphTower {
 public:
  GraphTower(std::vector<std::string> universe, std::string pinned,
             const std::vector<std::tuple<std::string, std::string, double>>& edges,
             std::vector<std::vector<std::string>> levels);

  std::size_t n_levels() const noexcept { return levels_.size(); }
  const std::vector<std::string>& universe() const noexcept { return universe_; }
  const std::vector<std::string>& level(std::size_t n) const { return levels_.at(n); }
  const std::string& pinned() const noexcept { return pinned_; }
  double w(const std::string& a, const std::string& b) const;

 private:
  friend Graph wired_subgraph(const GraphTower& tower, std::size_t n);
  std::vector<std::string> universe_;
  std::string pinned_;
  std::map<std::string, std::size_t> index_;
  Eigen::MatrixXd w_;
  std::vector<std::vector<std::string>> levels_;
};

/// Graph on V_n plus a boundary vertex carrying the summed outside weights.
Graph wired_subgraph(const GraphTower& tower, std::size_t n);

/// alpha^(n): alpha on V_n, the pinned entry collects all mass outside V_n.
/// Entries of `alpha` must be <= 0.
Eigen::VectorXd extend_alpha(const GraphTower& tower, const std::map<std::string, double>& alpha,
                             std::size_t n);

/// Malformed JSON and graphs violating the Graph invariants both throw FixtureError.
Graph parse_graph(const std::string& json_text);
Graph load_graph(const std::string& path);
GraphTower parse_tower(const std::string& json_text);
GraphTower load_tower(const std::string& path);
std::string graph_to_json(const Graph& g);

}  // namespace hsigma

#endif  // HSIGMA_GRAPH_HPP
