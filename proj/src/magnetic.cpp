#include "cuspec/magnetic.hpp"

#include <algorithm>
#include <queue>

#include "cuspec/error.hpp"
#include "cuspec/operators.hpp"

namespace cuspec {

MagneticPotential MagneticPotential::zero(const WeightedGraph& g) {
    MagneticPotential p;
    p.phases_.assign(g.edge_count(), Phase::from_turns(Rational(0)));
    return p;
}

MagneticPotential MagneticPotential::from_edge_phases(const WeightedGraph& g, std::vector<Phase> phases) {
    if (phases.size() != g.edge_count()) {
        throw Error(ErrorKind::PotentialGraphMismatch, std::to_string(phases.size()) + " phases for " +
                                                           std::to_string(g.edge_count()) + " edges");
    }
    MagneticPotential p;
    p.phases_.reserve(phases.size());
    for (auto& ph : phases) p.phases_.push_back(ph.reduced());
    return p;
}

Phase MagneticPotential::oriented(const WeightedGraph& g, std::size_t a, std::size_t b) const {
    auto e = g.find_edge(a, b);
    if (!e) return Phase{};
    const Phase& ph = phases_.at(*e);
    return g.edge(*e).u == a ? ph : -ph;
}

bool MagneticPotential::is_exact() const noexcept {
    return std::all_of(phases_.begin(), phases_.end(), [](const Phase& p) { return p.is_exact(); });
}

MagneticPotential MagneticPotential::scaled(const Rational& lambda) const {
    MagneticPotential p;
    p.phases_.reserve(phases_.size());
    for (const auto& ph : phases_) p.phases_.push_back(ph.scaled(lambda).reduced());
    return p;
}

MagneticPotential MagneticPotential::scaled(double lambda) const {
    MagneticPotential p;
    p.phases_.reserve(phases_.size());
    for (const auto& ph : phases_) p.phases_.push_back(ph.scaled(lambda).reduced());
    return p;
}

CycleBasis cycle_basis(const WeightedGraph& g) {
    const std::size_t n = g.vertex_count();
    CycleBasis b;
    b.parent.assign(n, std::nullopt);
    b.parent_edge.assign(n, std::nullopt);
    b.depth.assign(n, 0);
    b.tree_edge.assign(g.edge_count(), 0);
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(b.root);
    seen[b.root] = 1;
    while (!q.empty()) {
        std::size_t x = q.front();
        q.pop();
        for (const Neighbor& nb : g.neighbors(x)) {
            if (seen[nb.vertex]) continue;
            seen[nb.vertex] = 1;
            b.parent[nb.vertex] = x;
            b.parent_edge[nb.vertex] = nb.edge;
            b.depth[nb.vertex] = b.depth[x] + 1;
            b.tree_edge[nb.edge] = 1;
            q.push(nb.vertex);
        }
    }
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        if (b.tree_edge[k]) continue;
        const Edge& e = g.edge(k);
        // u -> v, then the tree path v -> lca -> u
        std::vector<std::size_t> up_from_v{e.v};
        std::vector<std::size_t> up_from_u{e.u};
        std::size_t a = e.v;
        std::size_t c = e.u;
        while (b.depth[a] > b.depth[c]) up_from_v.push_back(a = *b.parent[a]);
        while (b.depth[c] > b.depth[a]) up_from_u.push_back(c = *b.parent[c]);
        while (a != c) {
            up_from_v.push_back(a = *b.parent[a]);
            up_from_u.push_back(c = *b.parent[c]);
        }
        FundamentalCycle fc;
        fc.non_tree_edge = k;
        fc.vertices.push_back(e.u);
        fc.vertices.insert(fc.vertices.end(), up_from_v.begin(), up_from_v.end());
        // lca already present; descend to u
        for (auto it = up_from_u.rbegin() + 1; it != up_from_u.rend(); ++it) fc.vertices.push_back(*it);
        b.cycles.push_back(std::move(fc));
    }
    return b;
}

Phase holonomy(const WeightedGraph& g, const MagneticPotential& theta, std::span<const std::size_t> closed_cycle) {
    if (!theta.fits(g)) throw Error(ErrorKind::PotentialGraphMismatch, "holonomy");
    if (closed_cycle.size() < 2 || closed_cycle.front() != closed_cycle.back()) {
        throw Error(ErrorKind::NotACycle, "vertex sequence is not closed");
    }
    Phase total = Phase::from_turns(Rational(0));
    for (std::size_t i = 0; i + 1 < closed_cycle.size(); ++i) {
        const std::size_t a = closed_cycle[i];
        const std::size_t c = closed_cycle[i + 1];
        if (a >= g.vertex_count() || c >= g.vertex_count() || !g.find_edge(a, c)) {
            throw Error(ErrorKind::NotACycle, "step " + std::to_string(i) + " is not an edge");
        }
        total += theta.oriented(g, a, c);
    }
    return total;
}

std::vector<Phase> holonomy_vector(const WeightedGraph& g, const MagneticPotential& theta, const CycleBasis& basis) {
    std::vector<Phase> hol;
    hol.reserve(basis.rank());
    for (const auto& c : basis.cycles) hol.push_back(holonomy(g, theta, c.vertices));
    return hol;
}

bool holonomy_vanishes(std::span<const Phase> hol, double tol) {
    return std::all_of(hol.begin(), hol.end(), [tol](const Phase& p) { return p.is_zero_mod_2pi(tol); });
}

MagneticPotential apply_gauge(const WeightedGraph& g, const MagneticPotential& theta, const GaugeFunction& gauge) {
    if (gauge.sigma.size() != g.vertex_count()) throw Error(ErrorKind::BadParameters, "gauge must be total");
    std::vector<Phase> out;
    out.reserve(g.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        out.push_back(theta.on_edge(k) + gauge.sigma[e.v] - gauge.sigma[e.u]);
    }
    return MagneticPotential::from_edge_phases(g, std::move(out));
}

GaugeFunction find_gauge(const WeightedGraph& g, const MagneticPotential& theta1, const MagneticPotential& theta2) {
    if (!theta1.fits(g) || !theta2.fits(g)) throw Error(ErrorKind::PotentialGraphMismatch, "find_gauge");
    CycleBasis basis = cycle_basis(g);
    GaugeFunction gauge;
    gauge.sigma.assign(g.vertex_count(), Phase::from_turns(Rational(0)));
    // BFS order: parents settle before children
    std::vector<std::size_t> order(g.vertex_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return basis.depth[a] < basis.depth[b]; });
    for (std::size_t x : order) {
        if (!basis.parent[x]) continue;
        const std::size_t p = *basis.parent[x];
        // theta2(p,x) + sigma_x - sigma_p = theta1(p,x)
        gauge.sigma[x] = (gauge.sigma[p] + theta1.oriented(g, p, x) - theta2.oriented(g, p, x)).reduced();
    }
    MagneticPotential check = apply_gauge(g, theta2, gauge);
    for (std::size_t i = 0; i < basis.cycles.size(); ++i) {
        const std::size_t k = basis.cycles[i].non_tree_edge;
        if (!check.on_edge(k).equal_mod_2pi(theta1.on_edge(k))) {
            const Edge& e = g.edge(k);
            throw Error(ErrorKind::HolonomyMismatch, "fundamental cycle " + std::to_string(i) + " (edge '" + g.id(e.u) +
                                                         "'->'" + g.id(e.v) + "')");
        }
    }
    return gauge;
}

CouplingPeriod coupling_period(std::span<const Phase> holonomies) {
    // lambda * (p/q) in Z for every nonzero reduced p/q  <=>  lambda in (q/p) Z
    // for each i; the intersection of the lattices (q_i/p_i) Z is
    // (lcm q_i / gcd p_i) Z.
    std::int64_t num = 0;
    std::int64_t den = 0;
    for (const Phase& h : holonomies) {
        if (!h.is_exact()) throw Error(ErrorKind::IrrationalFlux, "holonomy " + h.str() + " is not a rational of 2pi");
        const Rational& r = *h.turns();
        if (r.is_zero()) continue;
        std::int64_t p = r.num() < 0 ? -r.num() : r.num();
        num = num == 0 ? r.den() : lcm64(num, r.den());
        den = den == 0 ? p : gcd64(den, p);
    }
    CouplingPeriod out;
    if (num == 0) return out;
    out.kind = CouplingPeriod::Kind::Period;
    out.nu = Rational(num, den);
    return out;
}

CouplingPeriod coupling_period(const WeightedGraph& g, const MagneticPotential& theta, const CycleBasis& basis) {
    std::vector<Phase> hol = holonomy_vector(g, theta, basis);
    return coupling_period(hol);
}

KernelCheck kernel_dimension_check(const WeightedGraph& g, const MagneticPotential& theta) {
    KernelCheck out;
    std::vector<Phase> hol = holonomy_vector(g, theta, cycle_basis(g));
    out.predicted_nontrivial = holonomy_vanishes(hol);
    out.lambda_min = eigenvalues(assemble_laplacian(g, theta))(0);
    out.measured_nontrivial = out.lambda_min < kKernelThreshold;
    return out;
}

}  // namespace cuspec
