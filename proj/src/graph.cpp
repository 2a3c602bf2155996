#include "hsigma/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "hsigma/errors.hpp"

namespace hsigma {

namespace {

void validate_weights(const Eigen::MatrixXd& w) {
  const auto m = w.rows();
  if (w.cols() != m || m < 2) throw InvariantViolation("weight matrix must be square with at least two vertices");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (w(i, i) != 0.0) throw InvariantViolation("graph has a direct loop");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
        throw InvariantViolation("edge weights must be finite and nonnegative");
      }
      if (w(i, j) != w(j, i)) throw InvariantViolation("weight matrix is not symmetric");
    }
  }
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::vector<Eigen::Index> stack{m - 1};
  seen[static_cast<std::size_t>(m - 1)] = 1;
  while (!stack.empty()) {
    const Eigen::Index v = stack.back();
    stack.pop_back();
    for (Eigen::Index k = 0; k < m; ++k) {
      if (w(v, k) > 0.0 && !seen[static_cast<std::size_t>(k)]) {
        seen[static_cast<std::size_t>(k)] = 1;
        stack.push_back(k);
      }
    }
  }
  for (char c : seen)
    if (!c) throw InvariantViolation("graph is not connected");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open fixture '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using EdgeList = std::vector<std::tuple<std::string, std::string, double>>;

struct ParsedGraph {
  std::vector<std::string> vertices;
  std::string pinned;
  EdgeList edges;
};

ParsedGraph parse_common(const nlohmann::json& j) {
  ParsedGraph p;
  try {
    p.pinned = j.value("pinned", std::string("delta"));
    for (const auto& v : j.at("vertices")) {
      const std::string id = v.is_string() ? v.get<std::string>() : v.dump();
      if (id != p.pinned) p.vertices.push_back(id);
    }
    for (const auto& e : j.at("edges")) {
      auto id = [](const nlohmann::json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
      p.edges.emplace_back(id(e.at("i")), id(e.at("j")), e.at("w").get<double>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FixtureError(std::string("malformed graph fixture: ") + ex.what());
  }
  return p;
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw FixtureError(std::string("invalid JSON: ") + ex.what());
  }
}

}  // namespace

Graph::Graph(std::vector<std::string> labels, std::string pinned, Eigen::MatrixXd weights)
    : labels_(std::move(labels)), pinned_(std::move(pinned)), w_(std::move(weights)) {
  if (static_cast<std::size_t>(w_.rows()) != labels_.size() + 1) {
    throw InvariantViolation("weight matrix size does not match the vertex count");
  }
  std::set<std::string> unique(labels_.begin(), labels_.end());
  unique.insert(pinned_);
  if (unique.size() != labels_.size() + 1) throw InvariantViolation("vertex labels are not distinct");
  validate_weights(w_);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      if (w_(i, j) > 0.0) edges_.push_back({i, j, w_(i, j)});
}

Graph Graph::from_edges(std::vector<std::string> labels, std::string pinned, const EdgeList& edges) {
  const std::size_t m = labels.size() + 1;
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) idx[labels[i]] = i;
  idx[pinned] = labels.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (const auto& [a, b, x] : edges) {
    auto ia = idx.find(a), ib = idx.find(b);
    if (ia == idx.end() || ib == idx.end()) throw FixtureError("edge references unknown vertex");
    if (ia->second == ib->second) throw InvariantViolation("graph has a direct loop");
    const auto i = static_cast<Eigen::Index>(ia->second), j = static_cast<Eigen::Index>(ib->second);
    if (w(i, j) != 0.0) throw InvariantViolation("parallel edge between '" + a + "' and '" + b + "'");
    w(i, j) = w(j, i) = x;
  }
  return Graph(std::move(labels), std::move(pinned), std::move(w));
}

const std::string& Graph::label(std::size_t i) const {
  if (i == pinned_index()) return pinned_;
  return labels_.at(i);
}

std::size_t Graph::index(const std::string& label) const {
  if (label == pinned_) return pinned_index();
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw FixtureError("unknown vertex '" + label + "'");
}

Graph Graph::with_weights(Eigen::MatrixXd weights) const {
  return Graph(labels_, pinned_, std::move(weights));
}

GraphTower::GraphTower(std::vector<std::string> universe, std::string pinned, const EdgeList& edges,
                       std::vector<std::vector<std::string>> levels)
    : universe_(std::move(universe)), pinned_(std::move(pinned)), levels_(std::move(levels)) {
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (!index_.emplace(universe_[i], i).second) throw InvariantViolation("duplicate vertex in tower");
  }
  if (index_.count(pinned_)) throw InvariantViolation("boundary label collides with a tower vertex");
  const auto m = static_cast<Eigen::Index>(universe_.size());
  w_ = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [a, b, x] : edges) {
    auto ia = index_.find(a), ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) throw FixtureError("tower edge references unknown vertex");
    if (ia == ib) throw InvariantViolation("tower has a direct loop");
    if (!std::isfinite(x) || x < 0.0) throw InvariantViolation("tower weights must be finite and nonnegative");
    const auto i = static_cast<Eigen::Index>(ia->second), j = static_cast<Eigen::Index>(ib->second);
    w_(i, j) = w_(j, i) = x;
  }
  if (levels_.empty()) throw InvariantViolation("tower needs at least one level");
  std::set<std::string> prev;
  for (const auto& lvl : levels_) {
    std::set<std::string> cur;
    for (const auto& v : lvl) {
      if (!index_.count(v)) throw FixtureError("level references unknown vertex '" + v + "'");
      if (!cur.insert(v).second) throw InvariantViolation("duplicate vertex within a level");
    }
    for (const auto& v : prev)
      if (!cur.count(v)) throw InvariantViolation("levels must be nested");
    prev = std::move(cur);
  }
}

double GraphTower::w(const std::string& a, const std::string& b) const {
  return w_(static_cast<Eigen::Index>(index_.at(a)), static_cast<Eigen::Index>(index_.at(b)));
}

Graph wired_subgraph(const GraphTower& tower, std::size_t n) {
  if (n >= tower.levels_.size()) throw DomainError("tower level out of range");
  const auto& lvl = tower.levels_[n];
  const std::size_t k = lvl.size();
  std::vector<Eigen::Index> ids;
  std::vector<char> inside(tower.universe_.size(), 0);
  for (const auto& v : lvl) {
    ids.push_back(static_cast<Eigen::Index>(tower.index_.at(v)));
    inside[tower.index_.at(v)] = 1;
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k + 1));
  for (std::size_t a = 0; a < k; ++a) {
    double outside = 0.0;
    for (Eigen::Index j = 0; j < tower.w_.cols(); ++j)
      if (!inside[static_cast<std::size_t>(j)]) outside += tower.w_(ids[a], j);
    if (!std::isfinite(outside)) throw DomainError("vertex '" + lvl[a] + "' has infinite outside weight");
    const auto ia = static_cast<Eigen::Index>(a);
    w(ia, static_cast<Eigen::Index>(k)) = w(static_cast<Eigen::Index>(k), ia) = outside;
    for (std::size_t b = 0; b < k; ++b) w(ia, static_cast<Eigen::Index>(b)) = tower.w_(ids[a], ids[b]);
  }
  return Graph(lvl, tower.pinned_, std::move(w));
}

Eigen::VectorXd extend_alpha(const GraphTower& tower, const std::map<std::string, double>& alpha,
                             std::size_t n) {
  const auto& lvl = tower.level(n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lvl.size() + 1));
  for (const auto& [label, value] : alpha) {
    if (!(value <= 0.0)) throw DomainError("alpha entries must lie in (-inf, 0]");
    if (std::find(tower.universe().begin(), tower.universe().end(), label) == tower.universe().end()) {
      throw DomainError("alpha references unknown vertex '" + label + "'");
    }
    auto it = std::find(lvl.begin(), lvl.end(), label);
    const auto pos = it == lvl.end() ? static_cast<Eigen::Index>(lvl.size())
                                     : static_cast<Eigen::Index>(it - lvl.begin());
    out(pos) += value;
  }
  return out;
}

Graph parse_graph(const std::string& json_text) {
  ParsedGraph p = parse_common(parse_json(json_text));
  try {
    return Graph::from_edges(std::move(p.vertices), std::move(p.pinned), p.edges);
  } catch (const InvariantViolation& ex) {
    throw FixtureError(std::string("invalid graph fixture: ") + ex.what());
  }
}

Graph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

GraphTower parse_tower(const std::string& json_text) {
  const nlohmann::json j = parse_json(json_text);
  ParsedGraph p = parse_common(j);
  std::vector<std::vector<std::string>> levels;
  try {
    for (const auto& lvl : j.at("levels")) {
      std::vector<std::string> l;
      for (const auto& v : lvl) l.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      levels.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FixtureError(std::string("malformed tower fixture: ") + ex.what());
  }
  try {
    return GraphTower(std::move(p.vertices), std::move(p.pinned), p.edges, std::move(levels));
  } catch (const InvariantViolation& ex) {
    throw FixtureError(std::string("invalid tower fixture: ") + ex.what());
  }
}

GraphTower load_tower(const std::string& path) { return parse_tower(read_file(path)); }

std::string graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["vertices"] = g.labels();
  j["pinned"] = g.pinned();
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({{"i", g.label(e.i)}, {"j", g.label(e.j)}, {"w", e.w}});
  return j.dump();
}

}  // namespace hsigma
