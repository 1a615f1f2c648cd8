#pragma once

// Direct-influence graphs, reachability, and the classification of ordered
// pairs into direct / indirect / no influence.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "locindep/error.hpp"
#include "locindep/format.hpp"
#include "locindep/model.hpp"

namespace locindep {

enum class Provenance { Syntactic, Statistical };

struct Edge {
  std::size_t from;
  std::size_t to;
  Provenance provenance = Provenance::Syntactic;
  std::optional<double> p_value;
};

class InfluenceGraph {
 public:
  explicit InfluenceGraph(std::size_t m = 0) : m_(m), adjacency_(m * m, 0) {}

  std::size_t size() const { return m_; }

  void add_edge(std::size_t from, std::size_t to, Provenance provenance = Provenance::Syntactic,
                std::optional<double> p_value = std::nullopt) {
    check(from, to);
    if (adjacency_[from * m_ + to]) return;
    adjacency_[from * m_ + to] = 1;
    edges_.push_back({from, to, provenance, p_value});
  }

  bool has_edge(std::size_t from, std::size_t to) const {
    check(from, to);
    return adjacency_[from * m_ + to] != 0;
  }

  const std::vector<Edge>& edges() const { return edges_; }

  /// Ordered pairs for which no decision could be made.
  const std::vector<std::pair<std::size_t, std::size_t>>& undecided() const { return undecided_; }
  void mark_undecided(std::size_t from, std::size_t to) {
    check(from, to);
    undecided_.emplace_back(from, to);
  }

  std::set<std::pair<std::size_t, std::size_t>> edge_set() const {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : edges_) out.emplace(e.from, e.to);
    return out;
  }

  /// reached[v] is true when a directed path of length >= 1 leads from
  /// `source` to v.
  std::vector<bool> reachable_from(std::size_t source) const {
    std::vector<bool> reached(m_, false);
    std::deque<std::size_t> queue{source};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < m_; ++v) {
        if (adjacency_[u * m_ + v] && !reached[v]) {
          reached[v] = true;
          queue.push_back(v);
        }
      }
    }
    return reached;
  }

 private:
  void check(std::size_t from, std::size_t to) const {
    if (from >= m_ || to >= m_) throw SpecError("node index out of range");
    if (from == to) throw SpecError("influence graphs have no self-loops");
  }

  std::size_t m_;
  std::vector<unsigned char> adjacency_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> undecided_;
};

enum class PairClass { Direct, Indirect, None };

inline std::string_view to_string(PairClass c) {
  switch (c) {
    case PairClass::Direct: return "direct";
    case PairClass::Indirect: return "indirect";
    case PairClass::None: return "none";
  }
  return "?";
}

/// Edge j -> k exactly when k is not WCLI of j.
inline InfluenceGraph syntactic_graph(const ProcessSpec& spec) {
  InfluenceGraph g(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k)
    for (auto j : dependency_set(spec, k))
      if (j != k && j < spec.size()) g.add_edge(j, k);
  return g;
}

/// None means k is strongly conditionally locally independent of j.
inline PairClass classify_pair(const InfluenceGraph& g, std::size_t j, std::size_t k) {
  if (j == k) throw SpecError("classify_pair needs two distinct components");
  if (g.has_edge(j, k)) return PairClass::Direct;
  return g.reachable_from(j)[k] ? PairClass::Indirect : PairClass::None;
}

/// (class of j -> k, class of k -> j).
inline std::pair<PairClass, PairClass> pair_taxonomy(const InfluenceGraph& g, std::size_t j,
                                                     std::size_t k) {
  return {classify_pair(g, j, k), classify_pair(g, k, j)};
}

/// Every node with a directed path into k, together with k.
inline std::set<std::size_t> ancestors(const InfluenceGraph& g, std::size_t k) {
  if (k >= g.size()) throw SpecError("node index out of range");
  std::set<std::size_t> out{k};
  for (std::size_t j = 0; j < g.size(); ++j)
    if (j != k && g.reachable_from(j)[k]) out.insert(j);
  return out;
}

/// Subgraph keeping only edges whose endpoints both lie in `nodes`.
inline InfluenceGraph induced_subgraph(const InfluenceGraph& g, const std::set<std::size_t>& nodes) {
  InfluenceGraph out(g.size());
  for (const auto& e : g.edges())
    if (nodes.contains(e.from) && nodes.contains(e.to)) out.add_edge(e.from, e.to, e.provenance, e.p_value);
  return out;
}

namespace detail {

inline std::vector<std::string> node_names(const InfluenceGraph& g,
                                           const std::vector<std::string>& names) {
  std::vector<std::string> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = i < names.size() && !names[i].empty() ? names[i] : "X" + std::to_string(i + 1);
  return out;
}

}  // namespace detail

/// Graphviz text. Syntactic edges are solid; statistical edges are dashed
/// and labelled with their p-value.
inline std::string to_dot(const InfluenceGraph& g, const std::vector<std::string>& names = {}) {
  const auto n = detail::node_names(g, names);
  std::ostringstream out;
  out << "digraph influence {\n";
  for (const auto& name : n) out << "  \"" << name << "\";\n";
  for (const auto& e : g.edges()) {
    out << "  \"" << n[e.from] << "\" -> \"" << n[e.to] << "\"";
    if (e.provenance == Provenance::Statistical) {
      out << " [style=dashed";
      if (e.p_value) out << ", label=\"p=" << format_double(*e.p_value) << "\"";
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

/// {"edges": [[j, k], ...]} with 1-based node numbers, plus provenance.
inline nlohmann::json to_json(const InfluenceGraph& g) {
  nlohmann::json doc;
  doc["m"] = g.size();
  doc["edges"] = nlohmann::json::array();
  doc["provenance"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    doc["edges"].push_back({e.from + 1, e.to + 1});
    nlohmann::json p;
    p["kind"] = e.provenance == Provenance::Syntactic ? "syntactic" : "statistical";
    if (e.p_value) p["p_value"] = *e.p_value;
    doc["provenance"].push_back(std::move(p));
  }
  doc["undecided"] = nlohmann::json::array();
  for (const auto& [a, b] : g.undecided()) doc["undecided"].push_back({a + 1, b + 1});
  return doc;
}

/// Text matrix: row j, column k holds the class of j -> k.
inline std::string taxonomy_table(const InfluenceGraph& g,
                                  const std::vector<std::string>& names = {}) {
  const auto n = detail::node_names(g, names);
  std::size_t width = 8;
  for (const auto& s : n) width = std::max(width, s.size() + 1);
  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    out << s << std::string(width > s.size() ? width - s.size() : 1, ' ');
  };
  cell("from\\to");
  for (const auto& s : n) cell(s);
  out << '\n';
  for (std::size_t j = 0; j < g.size(); ++j) {
    cell(n[j]);
    for (std::size_t k = 0; k < g.size(); ++k)
      cell(j == k ? "-" : std::string(to_string(classify_pair(g, j, k))));
    out << '\n';
  }
  return out.str();
}

}  // namespace locindep
