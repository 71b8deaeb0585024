#include "cuspec/products.hpp"

#include <algorithm>
#include <cmath>

#include "cuspec/error.hpp"
#include "cuspec/operators.hpp"

namespace cuspec {

namespace {

// Largest |log| for which exp stays a normal double with room for sums.
constexpr double kLogRange = 700.0;

ProductGraph make_product(const WeightedGraph& g1, const MagneticPotential& theta1, const WeightedGraph& g2,
                          const MagneticPotential& theta2, std::vector<std::size_t> index_set, ProductKind kind) {
    if (!theta1.fits(g1) || !theta2.fits(g2)) throw Error(ErrorKind::PotentialGraphMismatch, "product factors");
    const std::size_t n1 = g1.vertex_count();
    const std::size_t n2 = g2.vertex_count();
    std::vector<char> in_i(n2, 0);
    for (std::size_t y : index_set) in_i[y] = 1;

    std::vector<VertexId> ids;
    std::vector<double> measure;
    ids.reserve(n1 * n2);
    measure.reserve(n1 * n2);
    for (std::size_t x = 0; x < n1; ++x) {
        for (std::size_t y = 0; y < n2; ++y) {
            ids.push_back(g1.id(x) + "|" + g2.id(y));
            measure.push_back(g1.measure(x) * g2.measure(y));
        }
    }
    std::vector<Edge> edges;
    std::vector<Phase> phases;
    auto idx = [n2](std::size_t x, std::size_t y) { return x * n2 + y; };
    // vertical edges E1(x,x') delta_{yy'} (m2(y) | 1_I(y))
    for (std::size_t k = 0; k < g1.edge_count(); ++k) {
        const Edge& e = g1.edge(k);
        for (std::size_t y = 0; y < n2; ++y) {
            double w = 0.0;
            if (kind == ProductKind::Cartesian) {
                w = e.weight * g2.measure(y);
            } else if (in_i[y]) {
                w = e.weight;
            }
            if (w == 0.0) continue;
            edges.push_back(Edge{idx(e.u, y), idx(e.v, y), w});
            phases.push_back(theta1.on_edge(k));
        }
    }
    // fiber edges delta_{xx'} (m1(x) | 1) E2(y,y')
    for (std::size_t x = 0; x < n1; ++x) {
        for (std::size_t k = 0; k < g2.edge_count(); ++k) {
            const Edge& e = g2.edge(k);
            const double w = kind == ProductKind::Cartesian ? g1.measure(x) * e.weight : e.weight;
            edges.push_back(Edge{idx(x, e.u), idx(x, e.v), w});
            phases.push_back(theta2.on_edge(k));
        }
    }
    WeightedGraph g = WeightedGraph::build_indexed(std::move(ids), std::move(measure), std::move(edges));
    MagneticPotential theta = MagneticPotential::from_edge_phases(g, std::move(phases));
    return ProductGraph{std::move(g), std::move(theta), g1, theta1, g2, theta2, std::move(index_set), kind};
}

}  // namespace

bool ProductGraph::in_index_set(std::size_t y) const {
    return std::binary_search(index_set.begin(), index_set.end(), y);
}

ProductGraph cartesian_product(const WeightedGraph& g1, const MagneticPotential& theta1, const WeightedGraph& g2,
                               const MagneticPotential& theta2) {
    std::vector<std::size_t> all(g2.vertex_count());
    for (std::size_t y = 0; y < all.size(); ++y) all[y] = y;
    return make_product(g1, theta1, g2, theta2, std::move(all), ProductKind::Cartesian);
}

ProductGraph product_through(const WeightedGraph& g1, const MagneticPotential& theta1, const WeightedGraph& g2,
                             const MagneticPotential& theta2, const std::vector<VertexId>& index_set) {
    if (index_set.empty()) throw Error(ErrorKind::EmptyIndexSet, "the product through an empty set is disconnected");
    std::vector<std::size_t> ys;
    ys.reserve(index_set.size());
    for (const auto& id : index_set) ys.push_back(g2.index_of(id));
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    return make_product(g1, theta1, g2, theta2, std::move(ys), ProductKind::ThroughI);
}

LevelChain LevelChain::cusp_example(std::size_t depth) {
    LevelChain c;
    c.log_measure.resize(depth + 1);
    c.log_weight.resize(depth);
    for (std::size_t j = 0; j <= depth; ++j) c.log_measure[j] = -static_cast<double>(j);
    for (std::size_t j = 0; j < depth; ++j) c.log_weight[j] = -(2.0 * static_cast<double>(j) + 1.0) / 2.0;
    return c;
}

double LevelChain::degree(std::size_t j) const {
    if (j >= size()) throw Error(ErrorKind::UnknownVertex, "level " + std::to_string(j));
    double d = 0.0;
    if (j > 0) d += std::exp(log_weight[j - 1] - log_measure[j]);
    if (j < depth()) d += std::exp(log_weight[j] - log_measure[j]);
    return d;
}

WeightedGraph LevelChain::to_graph() const {
    if (log_weight.size() + 1 != log_measure.size()) throw Error(ErrorKind::BadParameters, "chain sizes");
    std::vector<VertexId> ids;
    std::vector<double> m;
    for (std::size_t j = 0; j < size(); ++j) {
        if (std::abs(log_measure[j]) > kLogRange) {
            throw Error(ErrorKind::BadParameters, "measure at level " + std::to_string(j) + " leaves double range");
        }
        ids.push_back(std::to_string(j));
        m.push_back(std::exp(log_measure[j]));
    }
    std::vector<Edge> edges;
    for (std::size_t j = 0; j < depth(); ++j) {
        if (std::abs(log_weight[j]) > kLogRange) {
            throw Error(ErrorKind::BadParameters, "weight at level " + std::to_string(j) + " leaves double range");
        }
        edges.push_back(Edge{j, j + 1, std::exp(log_weight[j])});
    }
    return WeightedGraph::build_indexed(std::move(ids), std::move(m), std::move(edges));
}

Eigen::MatrixXcd Tridiagonal::dense() const {
    const Eigen::Index n = diag.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag(i);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = off(i);
        m(i + 1, i) = off(i);
    }
    return m;
}

Tridiagonal chain_jacobi_matrix(const LevelChain& chain) {
    Tridiagonal t;
    const auto n = static_cast<Eigen::Index>(chain.size());
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (Eigen::Index j = 0; j < n; ++j) t.diag(j) = chain.degree(static_cast<std::size_t>(j));
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const auto k = static_cast<std::size_t>(j);
        t.off(j) = -std::exp(chain.log_weight[k] - 0.5 * (chain.log_measure[k] + chain.log_measure[k + 1]));
    }
    return t;
}

DecompositionDefect tensor_decomposition_defect(const ProductGraph& p) {
    const Eigen::MatrixXcd d = assemble_laplacian(p.graph, p.theta).matrix();
    const Eigen::MatrixXcd d1 = assemble_laplacian(p.base, p.base_theta).matrix();
    const Eigen::MatrixXcd d2 = assemble_laplacian(p.fiber, p.fiber_theta).matrix();
    const auto n1 = static_cast<Eigen::Index>(p.base.vertex_count());
    const auto n2 = static_cast<Eigen::Index>(p.fiber.vertex_count());
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(n2, n2);
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Zero(n1, n1);
    for (Eigen::Index y = 0; y < n2; ++y) {
        if (p.kind == ProductKind::Cartesian) {
            left(y, y) = 1.0;
        } else if (p.in_index_set(static_cast<std::size_t>(y))) {
            left(y, y) = 1.0 / p.fiber.measure(static_cast<std::size_t>(y));
        }
    }
    for (Eigen::Index x = 0; x < n1; ++x) {
        right(x, x) = p.kind == ProductKind::Cartesian ? 1.0 : 1.0 / p.base.measure(static_cast<std::size_t>(x));
    }
    const Eigen::MatrixXcd block = kronecker(d1, left) + kronecker(right, d2);
    DecompositionDefect out;
    out.absolute = (d - block).cwiseAbs().maxCoeff();
    const double scale = d.cwiseAbs().maxCoeff();
    out.relative = scale > 0.0 ? out.absolute / scale : out.absolute;
    return out;
}

std::pair<WeightedGraph, MagneticPotential> unit_cycle(std::size_t n, const Rational& per_edge_turns) {
    if (n < 3) throw Error(ErrorKind::BadParameters, "a cycle needs at least 3 vertices");
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (std::size_t i = 0; i < n; ++i) vs.push_back({std::to_string(i), 1.0});
    for (std::size_t i = 0; i < n; ++i) es.push_back({std::to_string(i), std::to_string((i + 1) % n), 1.0});
    WeightedGraph g = build_graph(std::move(vs), std::move(es));
    std::vector<Phase> ph(g.edge_count(), Phase::from_turns(per_edge_turns));
    MagneticPotential theta = MagneticPotential::from_edge_phases(g, std::move(ph));
    return {std::move(g), std::move(theta)};
}

WeightedGraph unit_path(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::BadParameters, "empty path");
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (std::size_t i = 0; i < n; ++i) vs.push_back({std::to_string(i), 1.0});
    for (std::size_t i = 0; i + 1 < n; ++i) es.push_back({std::to_string(i), std::to_string(i + 1), 1.0});
    return build_graph(std::move(vs), std::move(es));
}

ProductGraph build_cusp_example(std::size_t depth, std::size_t fiber_size, const Rational& kappa) {
    if (depth < 1) throw Error(ErrorKind::BadParameters, "depth N must be >= 1");
    if (depth > kMaxCuspDepth) {
        throw Error(ErrorKind::BadParameters, "depth N must be <= " + std::to_string(kMaxCuspDepth) +
                                                  " (deeper levels leave double range; use the level chain)");
    }
    if (fiber_size < 3) throw Error(ErrorKind::BadParameters, "fiber size n must be >= 3");
    WeightedGraph base = LevelChain::cusp_example(depth).to_graph();
    MagneticPotential base_theta = MagneticPotential::zero(base);
    auto [fiber, fiber_theta] =
        unit_cycle(fiber_size, kappa * Rational(1, 3 * static_cast<std::int64_t>(fiber_size)));
    return product_through(base, base_theta, fiber, fiber_theta, fiber.ids());
}

}  // namespace cuspec
