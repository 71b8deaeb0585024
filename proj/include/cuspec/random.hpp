#ifndef CUSPEC_RANDOM_HPP
#define CUSPEC_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>

#include "cuspec/graph.hpp"
#include "cuspec/magnetic.hpp"

namespace cuspec {

/// Draws below map raw mt19937_64 output by hand: the standard distributions
/// are implementation-defined, and seeded runs must be byte-identical.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);
double uniform_real(std::mt19937_64& rng, double lo, double hi);

struct RandomGraphOptions {
    std::size_t min_vertices = 2;
    std::size_t max_vertices = 10;
    double extra_edge_probability = 0.3;
    std::int64_t max_denominator = 6;
    /// probability that the potential is a pure gauge (all holonomies vanish)
    double exact_probability = 0.35;
};

struct RandomInstance {
    WeightedGraph graph;
    MagneticPotential theta;
};

/// Random spanning tree plus extra edges; measures and weights in [0.5, 2];
/// rational edge phases, or sigma_y - sigma_x for a random rational sigma.
RandomInstance random_instance(std::mt19937_64& rng, const RandomGraphOptions& options = {});

/// sigma_x = p/q turns with q <= max_denominator.
GaugeFunction random_gauge(std::mt19937_64& rng, const WeightedGraph& g, std::int64_t max_denominator = 12);

}  // namespace cuspec

#endif
