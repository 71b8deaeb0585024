#ifndef CUSPEC_MAGNETIC_HPP
#define CUSPEC_MAGNETIC_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cuspec/graph.hpp"
#include "cuspec/phase.hpp"
#include "cuspec/rational.hpp"

namespace cuspec {

/// Antisymmetric edge phase theta on the edge set of one graph. Entry k is
/// theta(u, v) for the stored orientation u -> v of edge k; theta(v, u) is its
/// negative. Phases are normalised to (-pi, pi] (or (-1/2, 1/2] turns).
class MagneticPotential {
public:
    static MagneticPotential zero(const WeightedGraph& g);
    static MagneticPotential from_edge_phases(const WeightedGraph& g, std::vector<Phase> phases);

    std::size_t edge_count() const noexcept { return phases_.size(); }
    bool fits(const WeightedGraph& g) const noexcept { return g.edge_count() == phases_.size(); }

    const Phase& on_edge(std::size_t edge) const { return phases_.at(edge); }
    const std::vector<Phase>& phases() const noexcept { return phases_; }
    /// theta(a, b); zero when a and b are not adjacent.
    Phase oriented(const WeightedGraph& g, std::size_t a, std::size_t b) const;

    bool is_exact() const noexcept;

    /// lambda * theta, with the product taken on the stored lift before
    /// normalisation.
    MagneticPotential scaled(const Rational& lambda) const;
    MagneticPotential scaled(double lambda) const;

private:
    std::vector<Phase> phases_;
};

struct CycleStep {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t edge = 0;
};

struct FundamentalCycle {
    std::size_t non_tree_edge = 0;
    /// closed vertex sequence u, v, ..., u starting with the non-tree edge u -> v
    std::vector<std::size_t> vertices;
};

/// BFS spanning tree rooted at vertex 0 and one fundamental cycle per
/// non-tree edge; rank = |E| - |V| + 1.
struct CycleBasis {
    std::size_t root = 0;
    std::vector<std::optional<std::size_t>> parent;
    std::vector<std::optional<std::size_t>> parent_edge;
    std::vector<std::size_t> depth;
    std::vector<char> tree_edge;
    std::vector<FundamentalCycle> cycles;

    std::size_t rank() const noexcept { return cycles.size(); }
};

CycleBasis cycle_basis(const WeightedGraph& g);

/// Sum of theta along a closed vertex sequence (first == last), on the lift.
Phase holonomy(const WeightedGraph& g, const MagneticPotential& theta, std::span<const std::size_t> closed_cycle);
std::vector<Phase> holonomy_vector(const WeightedGraph& g, const MagneticPotential& theta, const CycleBasis& basis);
bool holonomy_vanishes(std::span<const Phase> hol, double tol = 1e-10);

/// sigma_x per vertex.
struct GaugeFunction {
    std::vector<Phase> sigma;
};

/// U*(theta)_{xy} = theta_{xy} + sigma_y - sigma_x, renormalised.
MagneticPotential apply_gauge(const WeightedGraph& g, const MagneticPotential& theta, const GaugeFunction& gauge);

/// sigma with apply_gauge(theta2, sigma) == theta1, rooted at sigma(root) = 0.
/// Throws HolonomyMismatch naming the first fundamental cycle that differs.
GaugeFunction find_gauge(const WeightedGraph& g, const MagneticPotential& theta1, const MagneticPotential& theta2);

/// {lambda : Hol_{lambda theta} = 0}: all of R (Trivial) or nu Z.
struct CouplingPeriod {
    enum class Kind { Trivial, Period };
    Kind kind = Kind::Trivial;
    Rational nu;
};

/// Requires exact (rational) fundamental holonomies, else IrrationalFlux.
CouplingPeriod coupling_period(const WeightedGraph& g, const MagneticPotential& theta, const CycleBasis& basis);
CouplingPeriod coupling_period(std::span<const Phase> holonomies);

struct KernelCheck {
    double lambda_min = 0.0;
    bool predicted_nontrivial = false;  // every fundamental holonomy vanishes
    bool measured_nontrivial = false;   // lambda_min < threshold
    bool consistent() const noexcept { return predicted_nontrivial == measured_nontrivial; }
};

inline constexpr double kKernelThreshold = 1e-8;

KernelCheck kernel_dimension_check(const WeightedGraph& g, const MagneticPotential& theta);

}  // namespace cuspec

#endif
