#ifndef CUSPEC_PRODUCTS_HPP
#define CUSPEC_PRODUCTS_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cuspec/graph.hpp"
#include "cuspec/magnetic.hpp"
#include "cuspec/rational.hpp"

namespace cuspec {

enum class ProductKind { Cartesian, ThroughI };

/// Product graph with its factors. Vertex (x, y) has id "x|y" and index
/// x * |V2| + y, so matrices on the product are Kronecker-ordered (x-major).
struct ProductGraph {
    WeightedGraph graph;
    MagneticPotential theta;
    WeightedGraph base;
    MagneticPotential base_theta;
    WeightedGraph fiber;
    MagneticPotential fiber_theta;
    /// fiber vertex indices of I, ascending; all of V2 for Cartesian products
    std::vector<std::size_t> index_set;
    ProductKind kind = ProductKind::Cartesian;

    std::size_t index(std::size_t x, std::size_t y) const noexcept { return x * fiber.vertex_count() + y; }
    std::size_t level_of(std::size_t v) const noexcept { return v / fiber.vertex_count(); }
    std::size_t fiber_of(std::size_t v) const noexcept { return v % fiber.vertex_count(); }
    bool in_index_set(std::size_t y) const;
};

ProductGraph cartesian_product(const WeightedGraph& g1, const MagneticPotential& theta1, const WeightedGraph& g2,
                               const MagneticPotential& theta2);

/// Product through I; `index_set` holds fiber vertex ids. Throws EmptyIndexSet.
ProductGraph product_through(const WeightedGraph& g1, const MagneticPotential& theta1, const WeightedGraph& g2,
                             const MagneticPotential& theta2, const std::vector<VertexId>& index_set);

/// Half-line 0..N stored by log m(j) and log E(j, j+1), so that depths where
/// e^{-N} underflows a double can still produce the level operator.
struct LevelChain {
    std::vector<double> log_measure;  // N + 1 entries
    std::vector<double> log_weight;   // N entries, edge (j, j+1)

    /// m(j) = e^{-j}, E(j, j+1) = e^{-(2j+1)/2}.
    static LevelChain cusp_example(std::size_t depth);

    std::size_t depth() const noexcept { return log_weight.size(); }
    std::size_t size() const noexcept { return log_measure.size(); }
    double degree(std::size_t j) const;
    /// Throws BadParameters when a measure or weight leaves the double range.
    WeightedGraph to_graph() const;
};

/// Real symmetric tridiagonal matrix.
struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    Eigen::MatrixXcd dense() const;
};

/// U Delta_{chain,0} U^{-1} for the unitary (U f)(j) = sqrt(m(j)) f(j): the
/// Jacobi matrix with diagonal deg(j) and off-diagonal -E/sqrt(m(j) m(j+1)).
Tridiagonal chain_jacobi_matrix(const LevelChain& chain);

/// Deepest level accepted by `build_cusp_example`; e^{-N} must stay normal.
inline constexpr std::size_t kMaxCuspDepth = 600;

/// Base: the cusp half-line truncated at depth N, theta1 = 0. Fiber: the
/// unit-weight n-cycle with phase kappa / (3n) turns on each edge i -> i+1,
/// i.e. fiber flux kappa * 2pi/3. Product through I = V2.
ProductGraph build_cusp_example(std::size_t depth, std::size_t fiber_size, const Rational& kappa);

/// Largest entrywise |Delta_G - block form| where the block form is
/// Delta_1 (x) 1 + 1 (x) Delta_2 (Cartesian) or
/// Delta_1 (x) (1_I / m2) + (1/m1) (x) Delta_2 (through I).
struct DecompositionDefect {
    double absolute = 0.0;
    double relative = 0.0;  // absolute / max |entry|
};
DecompositionDefect tensor_decomposition_defect(const ProductGraph& p);

/// Unit-weight, unit-measure cycle on n vertices ids "0".."n-1" with phase
/// `per_edge_turns` on each edge i -> i+1 (mod n).
std::pair<WeightedGraph, MagneticPotential> unit_cycle(std::size_t n, const Rational& per_edge_turns);
/// Unit path 0 - 1 - ... - (n-1).
WeightedGraph unit_path(std::size_t n);

}  // namespace cuspec

#endif
