// One line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cuspec/cusp.hpp"
#include "cuspec/random.hpp"

using namespace cuspec;
using std::numbers::pi;

namespace {

const double kM = std::exp(0.5) + std::exp(-0.5);

struct Outcome {
    bool pass = true;
    std::string detail;
};

// accumulates a verdict and a short human-readable trail
struct Verdict {
    bool ok = true;
    std::ostringstream os;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            os << "[x] " << what << "; ";
        }
    }
    void note(const std::string& s) { os << s << "; "; }
    Outcome done() { return {ok, os.str()}; }
};

std::string num(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

std::pair<WeightedGraph, MagneticPotential> triangle(double flux) {
    WeightedGraph g = WeightedGraph::build({{"a", 1.0}, {"b", 1.0}, {"c", 1.0}},
                                           {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}});
    MagneticPotential th = MagneticPotential::from_edge_phases(
        g, {Phase::from_radians(flux), Phase::from_turns(Rational(0)), Phase::from_turns(Rational(0))});
    return {std::move(g), std::move(th)};
}

Outcome c1_triangle() {
    Verdict v;
    double worst = 0.0;
    for (double phi : {0.0, pi / 2, pi, 2 * pi / 3}) {
        auto [g, th] = triangle(phi);
        const Eigen::VectorXd got = eigenvalues(assemble_laplacian(g, th));
        std::vector<double> want;
        for (int k = 0; k < 3; ++k) want.push_back(2 - 2 * std::cos((phi + 2 * pi * k) / 3));
        std::sort(want.begin(), want.end());
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(got(k) - want[k]));
    }
    v.require(worst <= 1e-10, "max deviation " + num(worst));
    auto [g0, t0] = triangle(0.0);
    const Eigen::VectorXd z = eigenvalues(assemble_laplacian(g0, t0));
    v.require(std::abs(z(0)) <= 1e-10 && std::abs(z(1) - 3) <= 1e-10 && std::abs(z(2) - 3) <= 1e-10, "{0,3,3}");
    auto [gp, tp] = triangle(pi);
    const Eigen::VectorXd h = eigenvalues(assemble_laplacian(gp, tp));
    v.require(std::abs(h(0) - 1) <= 1e-10 && std::abs(h(1) - 1) <= 1e-10 && std::abs(h(2) - 4) <= 1e-10, "{1,1,4}");
    v.note("max deviation " + num(worst, 3));
    return v.done();
}

Outcome c2_kernel() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    int vanishing = 0, bad = 0;
    for (int t = 0; t < 50; ++t) {
        const RandomInstance r = random_instance(rng);
        const bool hol0 = holonomy_vanishes(holonomy_vector(r.graph, r.theta, cycle_basis(r.graph)));
        const double lmin = eigenvalues(assemble_laplacian(r.graph, r.theta))(0);
        if (hol0 != (lmin < 1e-8)) ++bad;
        vanishing += hol0 ? 1 : 0;
    }
    v.require(bad == 0, std::to_string(bad) + " inconsistent graphs");
    v.note("50 graphs, " + std::to_string(vanishing) + " with vanishing holonomy");
    return v.done();
}

Outcome c3_gauge() {
    Verdict v;
    std::mt19937_64 rng(20240602);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const RandomInstance r = random_instance(rng);
        const GaugeFunction s = random_gauge(rng, r.graph);
        const Eigen::VectorXd a = eigenvalues(assemble_laplacian(r.graph, r.theta));
        const Eigen::VectorXd b = eigenvalues(assemble_laplacian(r.graph, apply_gauge(r.graph, r.theta, s)));
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    v.require(worst <= 1e-10, "deviation " + num(worst));
    v.note("50 gauges, max deviation " + num(worst, 3));
    return v.done();
}

Outcome c4_nu() {
    Verdict v;
    auto check = [&](const WeightedGraph& g, const MagneticPotential& th, Rational expect) {
        const CycleBasis b = cycle_basis(g);
        const CouplingPeriod p = coupling_period(g, th, b);
        v.require(p.kind == CouplingPeriod::Kind::Period && p.nu == expect, "nu = " + p.nu.str() + ", want " + expect.str());
        for (std::int64_t k = 1; k <= 3; ++k) {
            v.require(holonomy_vanishes(holonomy_vector(g, th.scaled(p.nu * Rational(k)), b)),
                      "Hol(" + std::to_string(k) + " nu theta) != 0");
        }
        v.require(!holonomy_vanishes(holonomy_vector(g, th.scaled(p.nu * Rational(1, 2)), b)), "Hol(nu/2 theta) = 0");
        v.require(!holonomy_vanishes(holonomy_vector(g, th.scaled(p.nu * Rational(1, 3)), b)), "Hol(nu/3 theta) = 0");
        v.note("nu = " + p.nu.str());
    };
    auto [g, th] = unit_cycle(3, Rational(1, 9));
    check(g, th, Rational(3));
    const WeightedGraph bow = WeightedGraph::build(
        {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}, {"e", 1.0}},
        {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}, {"c", "d", 1.0}, {"d", "e", 1.0}, {"e", "c", 1.0}});
    const Phase z = Phase::from_turns(Rational(0));
    check(bow,
          MagneticPotential::from_edge_phases(
              bow, {Phase::from_turns(Rational(1, 2)), z, z, Phase::from_turns(Rational(1, 3)), z, z}),
          Rational(6));
    return v.done();
}

Outcome c5_decomposition() {
    Verdict v;
    const WeightedGraph p5 = unit_path(5);
    const MagneticPotential z5 = MagneticPotential::zero(p5);
    auto [t3, th3] = unit_cycle(3, Rational(1, 9));
    const Eigen::MatrixXcd d1 = assemble_laplacian(p5, z5).matrix();
    const Eigen::MatrixXcd d2 = assemble_laplacian(t3, th3).matrix();
    const Eigen::MatrixXcd i3 = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd i5 = Eigen::MatrixXcd::Identity(5, 5);

    const ProductGraph cart = cartesian_product(p5, z5, t3, th3);
    const double dc = (assemble_laplacian(cart.graph, cart.theta).matrix() - kronecker(d1, i3) - kronecker(i5, d2))
                          .cwiseAbs()
                          .maxCoeff();
    v.require(dc <= 1e-12, "cartesian defect " + num(dc));

    // unit measures: 1_I / m2 is the indicator, 1 / m1 is the identity
    for (const std::vector<VertexId>& ids : {t3.ids(), std::vector<VertexId>{"1"}}) {
        const ProductGraph thr = product_through(p5, z5, t3, th3, ids);
        Eigen::MatrixXcd ind = Eigen::MatrixXcd::Zero(3, 3);
        for (const auto& id : ids) ind(t3.index_of(id), t3.index_of(id)) = 1.0;
        const double dt = (assemble_laplacian(thr.graph, thr.theta).matrix() - kronecker(d1, ind) - kronecker(i5, d2))
                              .cwiseAbs()
                              .maxCoeff();
        v.require(dt <= 1e-12, "through-I defect " + num(dt) + " for |I| = " + std::to_string(ids.size()));
    }
    v.note("cartesian defect " + num(dc, 3));
    return v.done();
}

Outcome c6_keystone() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(30, 3, Rational(1)));
    const KeystoneReport k = verify_keystone(c, 1e-9);
    v.require(std::abs(k.M - 2.255252) <= 1e-6, "M = " + num(k.M, 10));
    double least = std::numeric_limits<double>::infinity();
    for (const TwoSidedCheck* t : {&k.degree, &k.laplacian, &k.form_degree}) {
        least = std::min({least, t->lower.witness, t->upper.witness});
        v.require(t->lower.witness >= -1e-9 && t->upper.witness >= -1e-9, t->name);
    }
    v.note("M = " + num(k.M, 10) + ", c = " + num(k.c) + ", least witness " + num(least, 3));
    return v.done();
}

Outcome c7_sandwich() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(60, 3, Rational(1)));
    const std::vector<double> grid = exponential_grid(1, 30);
    const AsymptoticsReport r = eigen_ratio_series(c, grid, 30);
    std::size_t bad = 0;
    for (const auto& row : r.eigen) {
        const bool ok = row.model <= row.full + sandwich_tolerance(row.model) &&
                        row.full <= row.model + 2 * r.M + sandwich_tolerance(row.model);
        bad += ok ? 0 : 1;
    }
    v.require(r.eigen.size() == 183, "dimension " + std::to_string(r.eigen.size()));
    v.require(bad == 0, std::to_string(bad) + " eigenvalues outside the sandwich");
    v.require(r.ratio_min >= 1.0 - 1e-12 && r.ratio_max <= 1.01, "ratio range");
    v.note("ratio over n >= 30 in [" + num(r.ratio_min, 15) + ", " + num(r.ratio_max, 7) + "]");
    return v.done();
}

Outcome c8_counting() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(1)));
    const std::vector<double> grid = exponential_grid(1, 30);
    const std::vector<CountingRow> rows = counting_sandwich(c, grid);
    std::size_t bad = 0;
    for (const auto& row : rows) bad += (row.model_shifted <= row.full && row.full <= row.model) ? 0 : 1;
    v.require(rows.size() == 30, "grid size");
    v.require(bad == 0, std::to_string(bad) + " violations");
    v.note("k = 1..30, N = 40");
    return v.done();
}

Outcome c9_he_ratio() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(0)));
    const SectorSplit s = le_he_split(c);
    const Eigen::VectorXd he = eigenvalues(s.high);
    std::vector<double> deg = degrees(c.product.graph);
    std::sort(deg.begin(), deg.end());
    const Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(deg.data(), static_cast<Eigen::Index>(deg.size()));
    double prev = -1.0, last = 0.0;
    bool monotone = true;
    for (int k = 20; k <= 30; ++k) {
        const double lambda = std::exp(k);
        last = static_cast<double>(counting_function(he, lambda)) / static_cast<double>(counting_function(d, lambda));
        monotone = monotone && last >= prev;
        prev = last;
    }
    const double closed = 2 * (30 - std::log(3.0)) / (3 * (30 - std::log(2.0)));
    v.require(std::abs(last - 0.6575) <= 0.02, "ratio " + num(last));
    v.require(monotone, "drift is not monotone over k = 20..30");
    v.note("ratio at e^30 = " + num(last) + ", closed form " + num(closed));
    return v.done();
}

Outcome c10_jacobi() {
    Verdict v;
    const JacobiReport j = jacobi_reduction(LevelChain::cusp_example(30));
    v.require(j.max_offdiag_defect <= 1e-12, "off-diagonal defect " + num(j.max_offdiag_defect));
    v.require(j.max_interior_defect <= 1e-12, "interior defect " + num(j.max_interior_defect));
    v.require(std::abs(j.site0_measured - 0.606531) <= 1e-6, "site 0 = " + num(j.site0_measured));
    v.require(!j.note.empty(), "no discrepancy note");
    v.note("site 0 = " + num(j.site0_measured) + " vs displayed " + num(j.site0_displayed));
    return v.done();
}

Outcome c11_ac() {
    Verdict v;
    const AcIntervalReport a = ac_interval(2000);
    const Eigen::VectorXd& e = a.values;
    const Eigen::Index n = e.size();
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < n; ++i) inside += (e(i) >= 0.245 && e(i) <= 4.266) ? 1 : 0;
    const double frac = static_cast<double>(inside) / static_cast<double>(n);
    v.require(std::abs(e(0)) <= 1e-10, "lambda_1 = " + num(e(0)));
    v.require(std::abs(e(1) - 0.255252) <= 0.02, "lambda_2 = " + num(e(1)));
    v.require(std::abs(e(n - 1) - 4.255252) <= 0.02, "lambda_max = " + num(e(n - 1)));
    v.require(frac >= 0.999, "fraction " + num(frac));
    v.note("lambda_2 = " + num(e(1)) + ", lambda_max = " + num(e(n - 1)) + ", fraction " + num(frac));
    return v.done();
}

Outcome c12_falpha() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(1, 3, Rational(1)));
    const double f1 = F_alpha(c, 1.0);
    std::vector<double> vals(c.fiber.values.data(), c.fiber.values.data() + c.fiber.values.size());
    const double a2 = solve_alpha(vals, degrees(c.product.fiber), 2.0);
    v.require(std::abs(f1 - 2.0) <= 1e-9, "F(1) = " + num(f1, 12));
    v.require(std::abs(a2 - 1.0) <= 1e-6, "alpha(2) = " + num(a2, 12));

    const std::size_t depth = 40;
    const WeightedGraph base = LevelChain::cusp_example(depth).to_graph();
    const ReweightedBase r = build_weights_for_f(base, {[](double t) { return t * t; }, nullptr});
    v.require(r.degree_dominated, "reweighted degree exceeds the original");
    // covered range: lambda^2 below the number of base vertices, away from squares
    std::size_t plus_one = 0, floor_only = 0, points = 0;
    for (std::size_t k = 1; k + 1 < base.vertex_count(); ++k) {
        for (double frac : {0.25, 0.5, 0.75}) {
            const double lambda = std::sqrt(static_cast<double>(k) + frac);
            const std::size_t got = inverse_measure_count(r.measure, lambda);
            const auto fl = static_cast<std::size_t>(std::floor(lambda * lambda));
            plus_one += got == fl + 1 ? 1 : 0;
            floor_only += got == fl ? 1 : 0;
            ++points;
        }
    }
    v.require(plus_one == points, "count = floor(lambda^2) + 1 at " + std::to_string(plus_one) + "/" +
                                      std::to_string(points) + " points (count = floor(lambda^2) at " +
                                      std::to_string(floor_only) + ")");
    v.note("F(1) = " + num(f1, 12) + ", alpha(2) = " + num(a2, 12));
    return v.done();
}

Outcome c13_dynamics() {
    Verdict v;
    const CuspProduct c = make_cusp(build_cusp_example(40, 3, Rational(0)));
    const SectorOperator he = sector_operator(c, Sector::High);
    const Spectrum s = eigensolve(he.op);
    const std::vector<std::size_t> region_he = indices_in_levels(he, 0, 20);
    double spread = 0.0;
    for (std::size_t i : {std::size_t{0}, s.size() / 2, s.size() - 1}) {
        const OccupationTrace t = dynamics_experiment(he, s.vectors.col(static_cast<Eigen::Index>(i)), region_he, 200.0, 400);
        const auto [lo, hi] = std::minmax_element(t.running_mean.begin(), t.running_mean.end());
        spread = std::max(spread, *hi - *lo);
    }
    v.require(spread <= 1e-10, "he time-average varies by " + num(spread));

    const SectorOperator le = chain_sector_operator(LevelChain::cusp_example(800));
    const std::vector<std::size_t> x = indices_in_levels(le, 0, 20);
    const Eigen::VectorXcd start = normalized_point_mass(le.op.weight(), indices_in_levels(le, 10, 10).front());
    const OccupationTrace w = dynamics_experiment(le, start, x, 200.0, 2000);
    v.require(w.occupation.back() <= 0.2, "le occupation at t = 200 is " + num(w.occupation.back()));
    v.note("he spread " + num(spread, 3) + ", le occupation " + num(w.occupation.back()));
    return v.done();
}

Outcome c14_trace() {
    Verdict v;
    double worst = 0.0;
    auto check = [&](const WeightedGraph& g, const MagneticPotential& th) {
        const Eigen::VectorXd e = eigenvalues(assemble_laplacian(g, th));
        double d = 0.0;
        for (double x : degrees(g)) d += x;
        worst = std::max(worst, std::abs(e.sum() - d) / std::max(1.0, d));
    };
    int instances = 0;
    for (double phi : {0.0, pi / 2, pi, 2 * pi / 3}) {
        auto [g, th] = triangle(phi);
        check(g, th);
        ++instances;
    }
    for (std::size_t n = 3; n <= 8; ++n) {
        for (std::int64_t kappa = 0; kappa <= 3; ++kappa) {
            auto [g, th] = unit_cycle(n, Rational(kappa, static_cast<std::int64_t>(3 * n)));
            check(g, th);
            ++instances;
        }
    }
    std::mt19937_64 rng(20240614);
    for (int t = 0; t < 50; ++t) {
        const RandomInstance r = random_instance(rng);
        check(r.graph, r.theta);
        ++instances;
    }
    v.require(worst <= 1e-10, "relative trace defect " + num(worst));
    v.note(std::to_string(instances) + " fibers, worst " + num(worst, 3));
    return v.done();
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "magnetic triangle closed form", 1, c1_triangle},
        {2, "kernel-holonomy dichotomy", 5, c2_kernel},
        {3, "gauge invariance", 5, c3_gauge},
        {4, "coupling period", 1, c4_nu},
        {5, "tensor decompositions", 1, c5_decomposition},
        {6, "keystone inequalities", 5, c6_keystone},
        {7, "eigenvalue sandwich and ratio", 30, c7_sandwich},
        {8, "counting sandwich", 10, c8_counting},
        {9, "(n-1)/n counting law", 10, c9_he_ratio},
        {10, "Jacobi reduction", 1, c10_jacobi},
        {11, "a.c. interval", 60, c11_ac},
        {12, "F(alpha) and reweighted counting", 5, c12_falpha},
        {13, "dynamics dichotomy", 60, c13_dynamics},
        {14, "trace identity", 1, c14_trace},
    };
    int failures = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= c.limit_s) {
            o.pass = false;
            o.detail += "[x] over the time limit; ";
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %s: %s (%.3f s / %.0f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                    c.limit_s, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
