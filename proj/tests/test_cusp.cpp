#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cuspec/cusp.hpp"
#include "cuspec/error.hpp"

using namespace cuspec;
using std::numbers::pi;

namespace {

const double kM = std::exp(0.5) + std::exp(-0.5);

// fiber eigenvalues of the unit n-cycle with total flux kappa 2pi/3
std::vector<double> fiber_closed_form(std::size_t n, double kappa) {
    std::vector<double> v;
    for (std::size_t k = 0; k < n; ++k) v.push_back(2 - 2 * std::cos((kappa * 2 * pi / 3 + 2 * pi * k) / n));
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("cusp constants") {
    const CuspProduct c = make_cusp(build_cusp_example(10, 3, Rational(1)));
    CHECK(c.M == doctest::Approx(2.255252).epsilon(1e-6));
    CHECK_FALSE(c.fiber_holonomy_trivial());
    CHECK(c.levels() == 11);
    const std::vector<double> f = fiber_closed_form(3, 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.fiber.values(i) == doctest::Approx(f[i]).epsilon(1e-12));
    const CuspProduct t = make_cusp(build_cusp_example(10, 4, Rational(3)));
    CHECK(t.fiber_holonomy_trivial());
    CHECK(t.low_modes.size() == 1);
    CHECK(t.high_modes.size() == 3);
    const WeightedGraph p = unit_path(3);
    CHECK_THROWS_AS(make_cusp(cartesian_product(p, MagneticPotential::zero(p), p, MagneticPotential::zero(p))),
                    Error);
}

TEST_CASE("hypotheses hold on the example family and fail on a growing base") {
    std::vector<std::size_t> depths;
    for (std::size_t d = 1; d <= 30; ++d) depths.push_back(d);
    const CuspHypothesisReport r = check_discrete_cusp(
        [](std::size_t d) { return build_cusp_example(d, 3, Rational(1)); }, depths, kM);
    CHECK(r.holds());
    CHECK(r.sup_base_degree <= kM * (1 + 1e-12));
    CHECK(r.min_base_measure == doctest::Approx(std::exp(-30.0)));

    const WeightedGraph base =
        WeightedGraph::build({{"0", 1.0}, {"1", 2.0}, {"2", 4.0}}, {{"0", "1", 1.0}, {"1", "2", 1.0}});
    auto [fib, th] = unit_cycle(3, Rational(1, 9));
    const ProductGraph bad = product_through(base, MagneticPotential::zero(base), fib, th, fib.ids());
    const CuspHypothesisReport b = check_discrete_cusp(bad, 10.0);
    CHECK_FALSE(b.h1);
    CHECK_FALSE(b.measure_decreasing);
    CHECK_FALSE(b.detail.empty());
    CHECK_FALSE(check_discrete_cusp(build_cusp_example(5, 3, Rational(1)), 1.0).h3);
}

TEST_CASE("model operator spectrum is lambda_i e^x") {
    const CuspProduct c = make_cusp(build_cusp_example(12, 3, Rational(1)));
    const Spectrum s = model_operator_spectrum(c);
    std::vector<double> expect;
    for (double l : fiber_closed_form(3, 1.0))
        for (int x = 0; x <= 12; ++x) expect.push_back(l * std::exp(x));
    std::sort(expect.begin(), expect.end());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(s.values(i) == doctest::Approx(expect[i]).epsilon(1e-12));
    const HermitianOperator h = model_operator(c);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Eigen::VectorXcd v = s.vectors.col(i);
        CHECK((h.matrix() * v - s.values(i) * v).norm() <= 1e-10 * s.values(i) * v.norm());
    }
}

TEST_CASE("keystone inequalities at N = 30") {
    const KeystoneReport k = verify_keystone(make_cusp(build_cusp_example(30, 3, Rational(1))));
    CHECK(k.holds());
    CHECK(k.M == doctest::Approx(kM));
    CHECK(k.c > 0.0);
    CHECK_FALSE(k.c_degenerate);
    for (const TwoSidedCheck* t : {&k.degree, &k.laplacian, &k.form_degree}) {
        CHECK(t->lower.witness >= -1e-9);
        CHECK(t->upper.witness >= -1e-9);
    }
}

TEST_CASE("keystone with vanishing fiber holonomy") {
    const KeystoneReport k = verify_keystone(make_cusp(build_cusp_example(15, 3, Rational(0))));
    CHECK(k.c_degenerate);
    CHECK(k.c == 0.0);
    CHECK(k.holds());
}

TEST_CASE("eigenvalue sandwich and ratio at N = 60") {
    const CuspProduct c = make_cusp(build_cusp_example(60, 3, Rational(1)));
    const auto grid = exponential_grid(1, 30);
    const AsymptoticsReport r = eigen_ratio_series(c, grid, 30);
    CHECK(r.eigen.size() == 183);
    CHECK(r.sandwich_all);
    CHECK(r.counting_all);
    CHECK(r.ratio_min >= 1.0 - 1e-12);
    CHECK(r.ratio_max <= 1.01);
    for (const auto& row : r.eigen) {
        CHECK(row.full >= row.model - sandwich_tolerance(row.model));
        CHECK(row.full <= row.model + 2 * kM + sandwich_tolerance(row.model));
    }
    CHECK_THROWS_AS(eigen_ratio_series(make_cusp(build_cusp_example(10, 3, Rational(3))), grid), Error);
}

TEST_CASE("counting sandwich at N = 40") {
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(1)));
    const std::vector<double> grid = exponential_grid(1, 30);
    const std::vector<CountingRow> rows = counting_sandwich(c, grid);
    REQUIRE(rows.size() == 30);
    const std::vector<double> f = fiber_closed_form(3, 1.0);
    for (const auto& row : rows) {
        CHECK(row.sandwich_ok);
        CHECK(row.model_shifted <= row.full);
        CHECK(row.full <= row.model);
        CHECK(row.model == geometric_model_count(f, 40, row.lambda));
    }
}

TEST_CASE("geometric model count by direct enumeration") {
    const std::vector<double> f{0.5, 1.0, 3.0};
    for (double lambda : {0.1, 0.5, 2.0, 40.0, 1e5}) {
        std::size_t n = 0;
        for (double l : f)
            for (int x = 0; x <= 20; ++x) n += l * std::exp(x) <= lambda * (1 + 1e-12) ? 1 : 0;
        CHECK(geometric_model_count(f, 20, lambda) == n);
    }
}

TEST_CASE("compact resolvent diagnostic") {
    const CompactResolventDiagnostic on = compact_resolvent_diagnostic(make_cusp(build_cusp_example(20, 3, Rational(1))));
    CHECK(on.fiber_holonomy_nonzero);
    CHECK(on.model_zero_multiplicity == 0);
    CHECK(on.tail_diverges);
    const CompactResolventDiagnostic off =
        compact_resolvent_diagnostic(make_cusp(build_cusp_example(20, 3, Rational(0))));
    CHECK_FALSE(off.fiber_holonomy_nonzero);
    CHECK(off.model_zero_multiplicity == 21);
    CHECK_FALSE(off.tail_diverges);
}

TEST_CASE("form-domain probe") {
    const CuspProduct c = make_cusp(build_cusp_example(20, 3, Rational(1)));
    const double c1 = verify_keystone(c).c;
    const FormDomainProbe on = form_domain_probe(c, c1);
    CHECK(on.fiber_holonomy_nonzero);
    CHECK(on.uniform_bound.holds);
    for (double r : on.required_c2) CHECK(r <= c1 * c.M + 1e-9);
    // too large a constant breaks the bound
    CHECK_FALSE(form_domain_probe(c, 1.0).uniform_bound.holds);
    const FormDomainProbe off = form_domain_probe(make_cusp(build_cusp_example(20, 3, Rational(0))), 1.0);
    CHECK_FALSE(off.fiber_holonomy_nonzero);
    // degree grows like e^x while the constant-in-fiber mode costs O(1)
    CHECK(off.required_c2.back() > 100 * off.required_c2.front());
}

TEST_CASE("le/he split reconstructs the operator") {
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(0)));
    const SectorSplit s = le_he_split(c);
    CHECK(s.low_modes.size() == 1);
    CHECK(s.high_modes.size() == 2);
    CHECK(s.reconstruction_defect < 1e-12);
    CHECK(s.low.dim() == 41);
    CHECK(s.high.dim() == 82);
    CHECK(sector_level(5, 2) == 2);
    // the low block is the level chain itself
    const Tridiagonal t = chain_jacobi_matrix(LevelChain::cusp_example(40));
    CHECK((s.low.matrix() - t.dense()).cwiseAbs().maxCoeff() < 1e-12);

    const WeightedGraph base = LevelChain::cusp_example(5).to_graph();
    const WeightedGraph fib =
        WeightedGraph::build({{"a", 1.0}, {"b", 2.0}, {"c", 1.0}}, {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}});
    const ProductGraph uneven =
        product_through(base, MagneticPotential::zero(base), fib, MagneticPotential::zero(fib), fib.ids());
    CHECK_THROWS_AS(le_he_split(make_cusp(uneven)), Error);
}

TEST_CASE("he counting over deg counting drifts toward 2/3") {
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(0)));
    const SectorSplit s = le_he_split(c);
    const Eigen::VectorXd he = eigenvalues(s.high);
    std::vector<double> deg = degrees(c.product.graph);
    std::sort(deg.begin(), deg.end());
    const Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(deg.data(), static_cast<Eigen::Index>(deg.size()));
    double previous = 0.0;
    for (int k = 20; k <= 30; ++k) {
        const double lambda = std::exp(k);
        const double ratio =
            static_cast<double>(counting_function(he, lambda)) / static_cast<double>(counting_function(d, lambda));
        CHECK(ratio >= previous - 1e-12);
        previous = ratio;
    }
    const double closed = 2 * (30 - std::log(3.0)) / (3 * (30 - std::log(2.0)));
    CHECK(closed == doctest::Approx(0.6575).epsilon(1e-3));
    CHECK(std::abs(previous - closed) <= 0.02);
}

TEST_CASE("Jacobi reduction of the low-energy block") {
    const JacobiReport j = jacobi_reduction(LevelChain::cusp_example(30));
    CHECK(j.matches());
    CHECK(j.max_offdiag_defect <= 1e-12);
    CHECK(j.max_interior_defect <= 1e-12);
    CHECK(j.interior_expected == doctest::Approx(kM));
    CHECK(j.site0_measured == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(j.site0_displayed == doctest::Approx(std::exp(0.5) + 2 * std::exp(-0.5) - 2).epsilon(1e-12));
    CHECK(j.site0_discrepancy);
    CHECK_FALSE(j.note.empty());
    // the product route agrees with the chain route
    const JacobiReport p = jacobi_reduction(make_cusp(build_cusp_example(30, 3, Rational(0))));
    CHECK((p.matrix.diag - j.matrix.diag).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(jacobi_reduction(make_cusp(build_cusp_example(30, 3, Rational(1)))), Error);
}

TEST_CASE("a.c. band of the low-energy block") {
    const AcIntervalReport a = ac_interval(400);
    CHECK(std::abs(a.values(0)) < 1e-10);
    CHECK(a.band_low == doctest::Approx(kM - 2));
    CHECK(a.band_high == doctest::Approx(kM + 2));
    CHECK(a.values(1) == doctest::Approx(kM - 2).epsilon(0.02));
    CHECK(a.values(a.values.size() - 1) <= kM + 2 + 0.02);
    CHECK(a.fraction_inside >= 0.99);
}

TEST_CASE("F(alpha) on the flux triangle") {
    const CuspProduct c = make_cusp(build_cusp_example(1, 3, Rational(1)));
    const std::vector<double> f = fiber_closed_form(3, 1.0);
    const std::vector<double> d(3, 2.0);
    double direct = 0.0;
    for (double l : f) direct += 2.0 / l;
    CHECK(F_alpha(c, 1.0) == doctest::Approx(direct / 3).epsilon(1e-12));
    CHECK(F_alpha(f, d, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(F_alpha(f, d, 0.0) == doctest::Approx(1.0));
    CHECK(solve_alpha(f, d, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
    const double a3 = solve_alpha(f, d, 3.0);
    CHECK(F_alpha(f, d, a3) == doctest::Approx(3.0).epsilon(1e-9));
    // F >= 1 with equality only at alpha = 0
    CHECK_THROWS_AS(solve_alpha(f, d, 1.0), Error);
    CHECK_THROWS_AS(solve_alpha(f, d, 0.5), Error);
    const std::vector<double> with_zero{0.0, 1.0, 3.0};
    CHECK_THROWS_AS(F_alpha(with_zero, d, 1.0), Error);
    const std::vector<double> uneven{2.0, 2.0, 3.0};
    CHECK_THROWS_AS(F_alpha(f, uneven, 1.0), Error);
}

TEST_CASE("weights realising a counting profile") {
    const WeightedGraph base = LevelChain::cusp_example(20).to_graph();
    const TargetFunction sq{[](double t) { return t * t; }, nullptr};
    const ReweightedBase r = build_weights_for_f(base, sq);
    CHECK(r.degree_dominated);
    for (std::size_t x = 0; x < base.vertex_count(); ++x) CHECK(r.degree_after[x] <= r.degree_before[x] * (1 + 1e-12));
    for (double lambda : {1.3, 2.05, 3.7, 4.2}) {
        CHECK(inverse_measure_count(r.measure, lambda) == static_cast<std::size_t>(std::floor(lambda * lambda)));
    }
    const TargetFunction bad{[](double t) { return 2 * t; }, nullptr};
    CHECK_THROWS_AS(build_weights_for_f(base, bad), Error);
}

TEST_CASE("dynamics: he eigenvectors are stationary, le packets leave") {
    const CuspProduct c = make_cusp(build_cusp_example(30, 3, Rational(0)));
    const SectorOperator he = sector_operator(c, Sector::High);
    const Spectrum s = eigensolve(he.op);
    const std::vector<std::size_t> region = indices_in_levels(he, 0, 10);
    const OccupationTrace t = dynamics_experiment(he, s.vectors.col(7), region, 100.0, 200);
    const auto [lo, hi] = std::minmax_element(t.running_mean.begin(), t.running_mean.end());
    CHECK(*hi - *lo < 1e-10);

    const SectorOperator le = chain_sector_operator(LevelChain::cusp_example(300));
    CHECK(le.op.dim() == 301);
    const std::vector<std::size_t> x = indices_in_levels(le, 0, 20);
    CHECK(x.size() == 21);
    const Eigen::VectorXcd start = normalized_point_mass(le.op.weight(), indices_in_levels(le, 10, 10).front());
    const OccupationTrace w = dynamics_experiment(le, start, x, 100.0, 500);
    CHECK(w.occupation.front() == doctest::Approx(1.0));
    CHECK(w.occupation.back() < 0.2);
    CHECK_THROWS_AS(sector_operator(make_cusp(build_cusp_example(5, 3, Rational(1))), Sector::Low), Error);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK(worker_count() >= 1);
}
