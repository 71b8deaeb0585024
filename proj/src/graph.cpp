#include "cuspec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "cuspec/error.hpp"

namespace cuspec {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<std::size_t> parent;  // predecessor vertex, kNone at the source
};

// Dijkstra from `source`, ignoring edge `skip_edge` (kNone to keep all edges).
ShortestPaths dijkstra(const WeightedGraph& g, const std::vector<double>& length, std::size_t source,
                       std::size_t skip_edge = kNone) {
    const double inf = std::numeric_limits<double>::infinity();
    ShortestPaths sp{std::vector<double>(g.vertex_count(), inf), std::vector<std::size_t>(g.vertex_count(), kNone)};
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    sp.dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d > sp.dist[x]) continue;
        for (const Neighbor& nb : g.neighbors(x)) {
            if (nb.edge == skip_edge) continue;
            double nd = d + length[nb.edge];
            if (nd < sp.dist[nb.vertex]) {
                sp.dist[nb.vertex] = nd;
                sp.parent[nb.vertex] = x;
                heap.emplace(nd, nb.vertex);
            }
        }
    }
    return sp;
}

}  // namespace

WeightedGraph WeightedGraph::build(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges) {
    std::vector<VertexId> ids;
    std::vector<double> measure;
    ids.reserve(vertices.size());
    measure.reserve(vertices.size());
    std::unordered_map<VertexId, std::size_t> index;
    for (auto& v : vertices) {
        if (!index.emplace(v.id, ids.size()).second) {
            throw Error(ErrorKind::DuplicateVertex, "vertex '" + v.id + "' listed twice");
        }
        ids.push_back(std::move(v.id));
        measure.push_back(v.measure);
    }
    std::vector<Edge> indexed;
    indexed.reserve(edges.size());
    for (const auto& e : edges) {
        auto iu = index.find(e.u);
        auto iv = index.find(e.v);
        if (iu == index.end()) throw Error(ErrorKind::UnknownVertex, "edge endpoint '" + e.u + "'");
        if (iv == index.end()) throw Error(ErrorKind::UnknownVertex, "edge endpoint '" + e.v + "'");
        indexed.push_back(Edge{iu->second, iv->second, e.weight});
    }
    return build_indexed(std::move(ids), std::move(measure), std::move(indexed));
}

WeightedGraph WeightedGraph::build_indexed(std::vector<VertexId> ids, std::vector<double> measure,
                                           std::vector<Edge> edges) {
    if (ids.size() != measure.size()) throw Error(ErrorKind::BadParameters, "ids and measures differ in length");
    if (ids.empty()) throw Error(ErrorKind::BadParameters, "graph has no vertices");
    WeightedGraph g;
    g.ids_ = std::move(ids);
    g.measure_ = std::move(measure);
    for (std::size_t i = 0; i < g.ids_.size(); ++i) {
        if (!g.index_.emplace(g.ids_[i], i).second) {
            throw Error(ErrorKind::DuplicateVertex, "vertex '" + g.ids_[i] + "' listed twice");
        }
        if (!(g.measure_[i] > 0.0) || !std::isfinite(g.measure_[i])) {
            throw Error(ErrorKind::NonpositiveMeasure, "m('" + g.ids_[i] + "') must be positive and finite");
        }
    }
    g.adjacency_.resize(g.ids_.size());
    for (const Edge& e : edges) {
        if (e.u >= g.ids_.size() || e.v >= g.ids_.size()) throw Error(ErrorKind::UnknownVertex, "edge index out of range");
        if (e.u == e.v) throw Error(ErrorKind::SelfLoop, "loop at '" + g.ids_[e.u] + "'");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            throw Error(ErrorKind::NegativeWeight,
                        "E('" + g.ids_[e.u] + "', '" + g.ids_[e.v] + "') must be nonnegative and finite");
        }
        if (e.weight == 0.0) continue;
        if (g.find_edge(e.u, e.v)) {
            throw Error(ErrorKind::DuplicateEdge, "edge '" + g.ids_[e.u] + "'-'" + g.ids_[e.v] + "' listed twice");
        }
        std::size_t k = g.edges_.size();
        g.edges_.push_back(e);
        g.adjacency_[e.u].push_back(Neighbor{e.v, k});
        g.adjacency_[e.v].push_back(Neighbor{e.u, k});
    }
    // connectivity
    std::vector<char> seen(g.ids_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        for (const Neighbor& nb : g.adjacency_[x]) {
            if (!seen[nb.vertex]) {
                seen[nb.vertex] = 1;
                ++reached;
                stack.push_back(nb.vertex);
            }
        }
    }
    if (reached != g.ids_.size()) {
        auto it = std::find(seen.begin(), seen.end(), 0);
        throw Error(ErrorKind::DisconnectedGraph,
                    "vertex '" + g.ids_[static_cast<std::size_t>(it - seen.begin())] + "' unreachable from '" +
                        g.ids_[0] + "'");
    }
    return g;
}

std::size_t WeightedGraph::index_of(const VertexId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::UnknownVertex, "'" + id + "'");
    return it->second;
}

std::optional<std::size_t> WeightedGraph::find_edge(std::size_t a, std::size_t b) const {
    const auto& adj = adjacency_.at(a);
    for (const Neighbor& nb : adj) {
        if (nb.vertex == b) return nb.edge;
    }
    return std::nullopt;
}

double WeightedGraph::weight(std::size_t a, std::size_t b) const {
    auto e = find_edge(a, b);
    return e ? edges_[*e].weight : 0.0;
}

double degree(const WeightedGraph& g, std::size_t x) {
    if (x >= g.vertex_count()) throw Error(ErrorKind::UnknownVertex, "index " + std::to_string(x));
    double sum = 0.0;
    for (const Neighbor& nb : g.neighbors(x)) sum += g.edge(nb.edge).weight;
    return sum / g.measure(x);
}

double degree(const WeightedGraph& g, const VertexId& x) { return degree(g, g.index_of(x)); }

std::vector<double> degrees(const WeightedGraph& g) {
    std::vector<double> d(g.vertex_count());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = degree(g, i);
    return d;
}

std::size_t hop_distance(const WeightedGraph& g, const VertexId& x, const VertexId& y) {
    std::size_t s = g.index_of(x);
    std::size_t t = g.index_of(y);
    std::vector<std::size_t> dist(g.vertex_count(), kNone);
    std::queue<std::size_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
        std::size_t a = q.front();
        q.pop();
        if (a == t) return dist[a];
        for (const Neighbor& nb : g.neighbors(a)) {
            if (dist[nb.vertex] == kNone) {
                dist[nb.vertex] = dist[a] + 1;
                q.push(nb.vertex);
            }
        }
    }
    return dist[t];  // unreachable: graphs are connected
}

double weighted_length(const WeightedGraph& g, std::size_t edge) {
    if (edge >= g.edge_count()) throw Error(ErrorKind::NotAnEdge, "edge index " + std::to_string(edge));
    const Edge& e = g.edge(edge);
    return std::sqrt(std::min(g.measure(e.u), g.measure(e.v)) / e.weight);
}

double weighted_length(const WeightedGraph& g, const VertexId& x, const VertexId& y) {
    auto e = g.find_edge(g.index_of(x), g.index_of(y));
    if (!e) throw Error(ErrorKind::NotAnEdge, "'" + x + "'-'" + y + "'");
    return weighted_length(g, *e);
}

std::vector<double> edge_lengths(const WeightedGraph& g) {
    std::vector<double> len(g.edge_count());
    for (std::size_t e = 0; e < len.size(); ++e) len[e] = weighted_length(g, e);
    return len;
}

double weighted_distance(const WeightedGraph& g, const VertexId& x, const VertexId& y) {
    std::size_t s = g.index_of(x);
    std::size_t t = g.index_of(y);
    if (s == t) return 0.0;
    return dijkstra(g, edge_lengths(g), s).dist[t];
}

double cycle_length(const WeightedGraph& g, std::span<const std::size_t> closed_cycle) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < closed_cycle.size(); ++i) {
        auto e = g.find_edge(closed_cycle[i], closed_cycle[i + 1]);
        if (!e) throw Error(ErrorKind::NotACycle, "consecutive vertices are not adjacent");
        total += weighted_length(g, *e);
    }
    return total;
}

WeightedMetricReport girth_and_radius(const WeightedGraph& g, std::optional<VertexId> at) {
    WeightedMetricReport rep;
    rep.edge_length = edge_lengths(g);
    rep.edge_cycle.assign(g.edge_count(), ExtendedReal::infinity());
    rep.vertex_girth.assign(g.vertex_count(), ExtendedReal::infinity());
    std::optional<std::size_t> x;
    if (at) {
        x = g.index_of(*at);
        rep.at_vertex = x;
    }

    // Shortest cycle through e = (u, v): L(e) + d_{G - e}(v, u). The shortest
    // path is simple and cannot be e itself, so the closed walk is a simple
    // cycle of unweighted length >= 3.
    std::size_t best_edge = kNone;
    std::size_t best_at_edge = kNone;
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        ShortestPaths sp = dijkstra(g, rep.edge_length, e.v, k);
        if (!std::isfinite(sp.dist[e.u])) continue;
        ExtendedReal c(rep.edge_length[k] + sp.dist[e.u]);
        rep.edge_cycle[k] = c;
        rep.vertex_girth[e.u] = std::min(rep.vertex_girth[e.u], c);
        rep.vertex_girth[e.v] = std::min(rep.vertex_girth[e.v], c);
        if (c < rep.girth) {
            rep.girth = c;
            best_edge = k;
        }
        if (x && (e.u == *x || e.v == *x) && c < rep.girth_at) {
            rep.girth_at = c;
            best_at_edge = k;
        }
    }
    rep.radius = rep.girth.half();
    rep.girth_at = x ? rep.vertex_girth[*x] : rep.girth;
    rep.radius_at = rep.girth_at.half();

    std::size_t witness = x ? best_at_edge : best_edge;
    if (witness != kNone) {
        const Edge& e = g.edge(witness);
        ShortestPaths sp = dijkstra(g, rep.edge_length, e.v, witness);
        // path u -> ... -> v by walking parents from u back to v
        std::vector<std::size_t> cycle;
        for (std::size_t a = e.u; a != kNone; a = sp.parent[a]) cycle.push_back(a);
        cycle.push_back(e.u);
        if (x) {
            auto pos = std::find(cycle.begin(), cycle.end() - 1, *x);
            std::rotate(cycle.begin(), pos, cycle.end() - 1);
            cycle.back() = cycle.front();
        }
        rep.witness_cycle = std::move(cycle);
    }
    return rep;
}

}  // namespace cuspec
