#include <doctest.h>

#include <cmath>
#include <random>

#include "brute_cycles.hpp"
#include "cuspec/error.hpp"
#include "cuspec/graph.hpp"
#include "cuspec/products.hpp"
#include "cuspec/random.hpp"

using namespace cuspec;

namespace {

WeightedGraph square_with_chord() {
    return WeightedGraph::build({{"a", 1.0}, {"b", 2.0}, {"c", 1.0}, {"d", 4.0}},
                                {{"a", "b", 1.0}, {"b", "c", 2.0}, {"c", "d", 1.0}, {"d", "a", 0.5}, {"a", "c", 3.0}});
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::BadParameters;
}

}  // namespace

TEST_CASE("construction rejects invalid graphs") {
    CHECK(kind_of([] { WeightedGraph::build({{"a", 1.0}, {"b", 1.0}}, {}); }) == ErrorKind::DisconnectedGraph);
    CHECK(kind_of([] { WeightedGraph::build({{"a", 0.0}}, {}); }) == ErrorKind::NonpositiveMeasure);
    CHECK(kind_of([] { WeightedGraph::build({{"a", 1.0}}, {{"a", "a", 1.0}}); }) == ErrorKind::SelfLoop);
    CHECK(kind_of([] { WeightedGraph::build({{"a", 1.0}, {"b", 1.0}}, {{"a", "b", -1.0}}); }) ==
          ErrorKind::NegativeWeight);
    CHECK(kind_of([] { WeightedGraph::build({{"a", 1.0}, {"b", 1.0}}, {{"a", "z", 1.0}}); }) ==
          ErrorKind::UnknownVertex);
    CHECK(kind_of([] { WeightedGraph::build({{"a", 1.0}, {"a", 1.0}}, {}); }) == ErrorKind::DuplicateVertex);
    CHECK(kind_of([] {
              WeightedGraph::build({{"a", 1.0}, {"b", 1.0}}, {{"a", "b", 1.0}, {"b", "a", 2.0}});
          }) == ErrorKind::DuplicateEdge);
}

TEST_CASE("a single vertex is connected") {
    const WeightedGraph g = WeightedGraph::build({{"only", 3.0}}, {});
    CHECK(g.vertex_count() == 1);
    CHECK(degree(g, 0) == 0.0);
}

TEST_CASE("degree is the measure-normalized weight sum") {
    const WeightedGraph g = square_with_chord();
    CHECK(degree(g, "a") == doctest::Approx((1.0 + 0.5 + 3.0) / 1.0));
    CHECK(degree(g, "b") == doctest::Approx((1.0 + 2.0) / 2.0));
    CHECK(degree(g, "d") == doctest::Approx((1.0 + 0.5) / 4.0));
    CHECK(g.weight(0, 3) == 0.5);
    CHECK(g.weight(1, 3) == 0.0);
}

TEST_CASE("hop and weighted distances") {
    const WeightedGraph g = square_with_chord();
    CHECK(hop_distance(g, "a", "c") == 1);
    CHECK(hop_distance(g, "b", "d") == 2);
    CHECK(hop_distance(g, "b", "b") == 0);
    // length sqrt(min m / E)
    CHECK(weighted_length(g, "a", "c") == doctest::Approx(std::sqrt(1.0 / 3.0)));
    CHECK(weighted_length(g, "d", "a") == doctest::Approx(std::sqrt(1.0 / 0.5)));
    const double via_a = weighted_length(g, "b", "a") + weighted_length(g, "a", "d");
    const double via_c = weighted_length(g, "b", "c") + weighted_length(g, "c", "d");
    const double via_ac = weighted_length(g, "b", "a") + weighted_length(g, "a", "c") + weighted_length(g, "c", "d");
    CHECK(weighted_distance(g, "b", "d") == doctest::Approx(std::min({via_a, via_c, via_ac})));
}

TEST_CASE("weighted distance is a metric on random graphs") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        const RandomInstance r = random_instance(rng);
        const auto& ids = r.graph.ids();
        for (const auto& x : ids) {
            for (const auto& y : ids) {
                const double dxy = weighted_distance(r.graph, x, y);
                CHECK(dxy == doctest::Approx(weighted_distance(r.graph, y, x)));
                if (x == y) CHECK(dxy == 0.0);
                else CHECK(dxy > 0.0);
                for (const auto& z : ids) {
                    CHECK(dxy <= weighted_distance(r.graph, x, z) + weighted_distance(r.graph, z, y) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("girth of a tree is infinite") {
    const WeightedGraph g = unit_path(5);
    const WeightedMetricReport r = girth_and_radius(g, std::string("2"));
    CHECK(r.girth.is_infinite());
    CHECK(r.radius.is_infinite());
    CHECK(r.girth_at.is_infinite());
    CHECK(r.witness_cycle.empty());
}

TEST_CASE("girth and radius agree with exhaustive cycle enumeration") {
    std::mt19937_64 rng(5);
    RandomGraphOptions opts;
    opts.max_vertices = 9;
    for (int t = 0; t < 40; ++t) {
        const RandomInstance r = random_instance(rng, opts);
        const testing::BruteCycles b = testing::brute_force_cycles(r.graph);
        const WeightedMetricReport rep = girth_and_radius(r.graph);
        if (std::isinf(b.girth)) {
            CHECK(rep.girth.is_infinite());
            continue;
        }
        REQUIRE(rep.girth.is_finite());
        CHECK(rep.girth.value() == doctest::Approx(b.girth).epsilon(1e-12));
        CHECK(rep.radius.value() == doctest::Approx(b.girth / 2).epsilon(1e-12));
        // witness is a closed simple cycle of the reported length
        CHECK(rep.witness_cycle.front() == rep.witness_cycle.back());
        CHECK(cycle_length(r.graph, rep.witness_cycle) == doctest::Approx(b.girth).epsilon(1e-12));
        for (std::size_t x = 0; x < r.graph.vertex_count(); ++x) {
            const WeightedMetricReport at = girth_and_radius(r.graph, r.graph.id(x));
            if (std::isinf(b.through[x])) CHECK(at.girth_at.is_infinite());
            else CHECK(at.girth_at.value() == doctest::Approx(b.through[x]).epsilon(1e-12));
        }
    }
}

TEST_CASE("local radius on the cusp truncation") {
    // fiber edges at level x have length e^{-x/2}; vertical ones e^{-1/4}
    const ProductGraph p = build_cusp_example(3, 3, Rational(1));
    REQUIRE(p.graph.vertex_count() == 12);
    const testing::BruteCycles b = testing::brute_force_cycles(p.graph);
    for (std::size_t x = 0; x <= 3; ++x) {
        for (std::size_t y = 0; y < 3; ++y) {
            const std::size_t v = p.index(x, y);
            const WeightedMetricReport r = girth_and_radius(p.graph, p.graph.id(v));
            CHECK(r.radius_at.value() == doctest::Approx(b.through[v] / 2).epsilon(1e-12));
            if (x >= 2) CHECK(r.radius_at.value() == doctest::Approx(1.5 * std::exp(-0.5 * x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("index lookup") {
    const WeightedGraph g = square_with_chord();
    CHECK(g.index_of("c") == 2);
    CHECK_THROWS_AS(g.index_of("zz"), Error);
    CHECK(g.find_edge(0, 2).has_value());
    CHECK_FALSE(g.find_edge(1, 3).has_value());
}
