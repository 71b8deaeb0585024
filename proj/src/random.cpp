#include "cuspec/random.hpp"

#include <string>
#include <vector>

namespace cuspec {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + (hi - lo) * u;
}

namespace {

Phase random_turns(std::mt19937_64& rng, std::int64_t max_den) {
    const auto q = static_cast<std::int64_t>(1 + uniform_index(rng, static_cast<std::size_t>(max_den)));
    const auto p = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(q)));
    return Phase::from_turns(Rational(p, q));
}

}  // namespace

RandomInstance random_instance(std::mt19937_64& rng, const RandomGraphOptions& o) {
    const std::size_t n = o.min_vertices + uniform_index(rng, o.max_vertices - o.min_vertices + 1);
    std::vector<VertexSpec> vs;
    for (std::size_t i = 0; i < n; ++i) vs.push_back({"v" + std::to_string(i), uniform_real(rng, 0.5, 2.0)});
    std::vector<EdgeSpec> es;
    std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = uniform_index(rng, i);
        used[i][j] = used[j][i] = 1;
        es.push_back({vs[j].id, vs[i].id, uniform_real(rng, 0.5, 2.0)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (used[i][j] || uniform_real(rng, 0.0, 1.0) >= o.extra_edge_probability) continue;
            es.push_back({vs[i].id, vs[j].id, uniform_real(rng, 0.5, 2.0)});
        }
    }
    WeightedGraph g = build_graph(std::move(vs), std::move(es));
    std::vector<Phase> phases;
    if (uniform_real(rng, 0.0, 1.0) < o.exact_probability) {
        const GaugeFunction s = random_gauge(rng, g, o.max_denominator);
        for (const Edge& e : g.edges()) phases.push_back(s.sigma[e.v] - s.sigma[e.u]);
    } else {
        for (std::size_t k = 0; k < g.edge_count(); ++k) phases.push_back(random_turns(rng, o.max_denominator));
    }
    MagneticPotential theta = MagneticPotential::from_edge_phases(g, std::move(phases));
    return RandomInstance{std::move(g), std::move(theta)};
}

GaugeFunction random_gauge(std::mt19937_64& rng, const WeightedGraph& g, std::int64_t max_denominator) {
    GaugeFunction s;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) s.sigma.push_back(random_turns(rng, max_denominator));
    return s;
}

}  // namespace cuspec
