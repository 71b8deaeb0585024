#ifndef CUSPEC_GRAPH_HPP
#define CUSPEC_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cuspec/extended_real.hpp"

namespace cuspec {

using VertexId = std::string;

/// Undirected edge stored once, oriented u -> v in insertion order. Magnetic
/// potentials are indexed by the position of the edge in `WeightedGraph::edges()`.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};

struct Neighbor {
    std::size_t vertex = 0;
    std::size_t edge = 0;
};

struct VertexSpec {
    VertexId id;
    double measure = 1.0;
};

struct EdgeSpec {
    VertexId u;
    VertexId v;
    double weight = 1.0;
};

/// Finite connected weighted graph (E, V, m). Immutable once built; the vertex
/// order is the insertion order and is used for all matrix indexing.
class WeightedGraph {
public:
    /// Validates the invariants and rejects disconnected input. Edges of zero
    /// weight are not edges and are dropped.
    static WeightedGraph build(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges);
    static WeightedGraph build_indexed(std::vector<VertexId> ids, std::vector<double> measure,
                                       std::vector<Edge> edges);

    std::size_t vertex_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::vector<VertexId>& ids() const noexcept { return ids_; }
    const VertexId& id(std::size_t i) const { return ids_.at(i); }
    std::size_t index_of(const VertexId& id) const;
    bool contains(const VertexId& id) const { return index_.count(id) != 0; }

    double measure(std::size_t i) const { return measure_.at(i); }
    const std::vector<double>& measures() const noexcept { return measure_; }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_.at(i); }

    /// Index of the edge joining a and b, if any.
    std::optional<std::size_t> find_edge(std::size_t a, std::size_t b) const;
    /// E(a, b); zero when a and b are not neighbors.
    double weight(std::size_t a, std::size_t b) const;

private:
    WeightedGraph() = default;

    std::vector<VertexId> ids_;
    std::unordered_map<VertexId, std::size_t> index_;
    std::vector<double> measure_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

inline WeightedGraph build_graph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges) {
    return WeightedGraph::build(std::move(vertices), std::move(edges));
}

/// deg(x) = (1/m(x)) sum_y E(x, y).
double degree(const WeightedGraph& g, std::size_t x);
double degree(const WeightedGraph& g, const VertexId& x);
std::vector<double> degrees(const WeightedGraph& g);

/// BFS path length.
std::size_t hop_distance(const WeightedGraph& g, const VertexId& x, const VertexId& y);

/// L(x, y) = sqrt(min(m(x), m(y)) / E(x, y)).
double weighted_length(const WeightedGraph& g, std::size_t edge);
double weighted_length(const WeightedGraph& g, const VertexId& x, const VertexId& y);
std::vector<double> edge_lengths(const WeightedGraph& g);

/// Dijkstra distance over the edge lengths L.
double weighted_distance(const WeightedGraph& g, const VertexId& x, const VertexId& y);

struct WeightedMetricReport {
    std::vector<double> edge_length;
    /// minimum weighted length of a simple cycle (length >= 3) through each edge
    std::vector<ExtendedReal> edge_cycle;
    std::vector<ExtendedReal> vertex_girth;
    ExtendedReal girth = ExtendedReal::infinity();
    ExtendedReal radius = ExtendedReal::infinity();
    std::optional<std::size_t> at_vertex;
    ExtendedReal girth_at = ExtendedReal::infinity();
    ExtendedReal radius_at = ExtendedReal::infinity();
    /// closed vertex sequence (first vertex repeated at the end) realising
    /// `girth_at` when a vertex was given, otherwise `girth`; empty when acyclic
    std::vector<std::size_t> witness_cycle;
};

WeightedMetricReport girth_and_radius(const WeightedGraph& g, std::optional<VertexId> at = std::nullopt);

/// Sum of L over consecutive pairs of a closed vertex sequence.
double cycle_length(const WeightedGraph& g, std::span<const std::size_t> closed_cycle);

}  // namespace cuspec

#endif
