#include "cuspec/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cuspec/cusp.hpp"
#include "cuspec/error.hpp"
#include "cuspec/io.hpp"
#include "cuspec/random.hpp"

namespace cuspec::cli {

namespace {

struct Options {
    std::string output;
    std::string graph;
    std::string target;
    std::string flux;
    std::string kappa = "1";
    std::string method = "auto";
    std::string vectors;
    bool check_trace = false;

    bool kernel_suite = false;
    std::uint64_t seed = 1;
    std::size_t count = 50;
    bool verify = false;

    std::string base;
    std::string fiber_doc;
    std::string through;
    bool check = false;

    std::size_t depth = 0;
    std::size_t fiber = 3;
    std::string fiber_graph;
    double tol = 1e-9;
    double bound = std::exp(0.5) + std::exp(-0.5);
    double epsilon = 1e-6;
    std::size_t ratio_from = 30;
    int kmin = 1;
    int kmax = 30;
    bool he_ratio = false;
    bool ac = false;
    double widen = 0.01;

    std::vector<double> alpha;
    std::vector<double> solve;

    std::string profile = "power:2";
    bool counts = false;

    std::string sector = "le";
    std::size_t start = 10;
    std::string region = "0:20";
    double horizon = 200.0;
    std::size_t steps = 2000;
    std::string initial = "point";
    std::size_t eigen_index = 0;

    std::string vertex;
};

/// A claimed inequality or identity failed; maps to exit code 2.
struct CheckFailed {
    std::string what;
};

std::string fmt(double v) { return format_double(v); }
const char* yes(bool b) { return b ? "true" : "false"; }

GraphDocument load_with_flux(const Options& o) {
    GraphDocument doc = load_graph_document(o.graph);
    if (!o.flux.empty()) {
        const Rational f = Rational::parse(o.flux);
        const CycleBasis basis = cycle_basis(doc.graph);
        std::vector<Phase> phases(doc.graph.edge_count(), Phase::from_turns(Rational(0)));
        for (const auto& c : basis.cycles) phases[c.non_tree_edge] = Phase::from_turns(f);
        doc.theta = MagneticPotential::from_edge_phases(doc.graph, std::move(phases));
    } else if (o.kappa != "1") {
        doc.theta = doc.theta.scaled(Rational::parse(o.kappa));
    }
    return doc;
}

EigenMethod parse_method(const std::string& m) {
    if (m == "auto") return EigenMethod::Auto;
    if (m == "householder") return EigenMethod::Householder;
    if (m == "jacobi") return EigenMethod::Jacobi;
    throw Error(ErrorKind::BadParameters, "unknown method '" + m + "' (auto, householder, jacobi)");
}

void require_depth(const Options& o) {
    if (o.depth < 1) throw Error(ErrorKind::BadParameters, "--depth must be >= 1");
}

ProductGraph build_product(const Options& o) {
    require_depth(o);
    const Rational kappa = Rational::parse(o.kappa);
    if (o.fiber_graph.empty()) return build_cusp_example(o.depth, o.fiber, kappa);
    if (o.depth > kMaxCuspDepth) throw Error(ErrorKind::BadParameters, "--depth too large for a full product");
    GraphDocument f = load_graph_document(o.fiber_graph);
    WeightedGraph base = LevelChain::cusp_example(o.depth).to_graph();
    MagneticPotential zero = MagneticPotential::zero(base);
    return product_through(base, zero, f.graph, f.theta.scaled(kappa), f.graph.ids());
}

CuspProduct build_cusp(const Options& o) { return make_cusp(build_product(o)); }

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            auto v = static_cast<std::size_t>(std::stoull(text));
            return {v, v};
        }
        return {static_cast<std::size_t>(std::stoull(text.substr(0, colon))),
                static_cast<std::size_t>(std::stoull(text.substr(colon + 1)))};
    } catch (const std::exception&) {
        throw Error(ErrorKind::BadParameters, "level range must be 'a:b', got '" + text + "'");
    }
}

TargetFunction parse_profile(const std::string& spec) {
    if (spec == "log") {
        return {[](double t) { return 1.0 + std::log(t); }, [](double n) { return std::exp(n - 1.0); }};
    }
    double p = 1.0;
    if (spec.rfind("power:", 0) == 0) {
        try {
            p = std::stod(spec.substr(6));
        } catch (const std::exception&) {
            throw Error(ErrorKind::BadTargetFunction, "bad exponent in '" + spec + "'");
        }
    } else if (spec != "identity") {
        throw Error(ErrorKind::BadTargetFunction, "unknown profile '" + spec + "' (identity, power:p, log)");
    }
    if (!(p > 0.0)) throw Error(ErrorKind::BadTargetFunction, "exponent must be positive");
    return {[p](double t) { return std::pow(t, p); }, [p](double n) { return std::pow(n, 1.0 / p); }};
}

// ------------------------------------------------------------ subcommands

void cmd_spectrum(const Options& o, std::ostream& out) {
    const GraphDocument doc = load_with_flux(o);
    const HermitianOperator h = assemble_laplacian(doc.graph, doc.theta);
    const EigenMethod method = parse_method(o.method);
    if (!o.vectors.empty()) {
        const Spectrum s = eigensolve(h, method);
        write_spectrum_csv(out, s.values);
        std::ofstream bin(o.vectors, std::ios::binary);
        if (!bin) throw Error(ErrorKind::BadDocument, "cannot write " + o.vectors);
        write_eigenvector_dump(bin, s.vectors);
    } else {
        write_spectrum_csv(out, eigenvalues(h, method));
    }
    if (o.check_trace) {
        const Eigen::VectorXd v = eigenvalues(h, method);
        double deg = 0.0;
        for (double d : degrees(doc.graph)) deg += d;
        if (std::abs(v.sum() - deg) > 1e-10 * std::max(1.0, std::abs(deg))) {
            throw CheckFailed{"trace identity: sum of eigenvalues " + fmt(v.sum()) + " vs sum of degrees " + fmt(deg)};
        }
    }
}

void cmd_holonomy(const Options& o, std::ostream& out) {
    if (o.kernel_suite) {
        std::mt19937_64 rng(o.seed);
        out << "trial,vertices,edges,lambda_min,predicted_kernel,measured_kernel,consistent\n";
        bool all = true;
        for (std::size_t t = 0; t < o.count; ++t) {
            const RandomInstance r = random_instance(rng);
            const KernelCheck k = kernel_dimension_check(r.graph, r.theta);
            all = all && k.consistent();
            out << t << ',' << r.graph.vertex_count() << ',' << r.graph.edge_count() << ',' << fmt(k.lambda_min) << ','
                << yes(k.predicted_nontrivial) << ',' << yes(k.measured_nontrivial) << ',' << yes(k.consistent()) << '\n';
        }
        if (!all) throw CheckFailed{"kernel/holonomy dichotomy violated"};
        return;
    }
    if (o.graph.empty()) throw CLI::RequiredError("--graph");
    const GraphDocument doc = load_with_flux(o);
    const CycleBasis basis = cycle_basis(doc.graph);
    write_holonomy_csv(out, doc.graph, basis, holonomy_vector(doc.graph, doc.theta, basis));
}

void cmd_gauge(const Options& o, std::ostream& out) {
    const GraphDocument doc = load_with_flux(o);
    if (!o.target.empty()) {
        const GraphDocument other = load_graph_document(o.target);
        if (other.graph.ids() != doc.graph.ids() || other.graph.edge_count() != doc.graph.edge_count()) {
            throw Error(ErrorKind::PotentialGraphMismatch, "--target must be the same graph");
        }
        const GaugeFunction s = find_gauge(doc.graph, doc.theta, other.theta);
        out << "vertex,sigma_radians,sigma_rational_p,sigma_rational_q\n";
        for (std::size_t x = 0; x < doc.graph.vertex_count(); ++x) {
            const Phase p = s.sigma[x].reduced();
            out << doc.graph.id(x) << ',' << fmt(p.radians()) << ',';
            if (p.is_exact()) out << p.turns()->num() << ',' << p.turns()->den();
            else out << ',';
            out << '\n';
        }
        return;
    }
    std::mt19937_64 rng(o.seed);
    const Eigen::VectorXd ref = eigenvalues(assemble_laplacian(doc.graph, doc.theta));
    out << "trial,max_eigenvalue_deviation\n";
    double worst = 0.0;
    for (std::size_t t = 0; t < o.count; ++t) {
        const GaugeFunction s = random_gauge(rng, doc.graph);
        const Eigen::VectorXd v = eigenvalues(assemble_laplacian(doc.graph, apply_gauge(doc.graph, doc.theta, s)));
        const double dev = (v - ref).cwiseAbs().maxCoeff();
        worst = std::max(worst, dev);
        out << t << ',' << fmt(dev) << '\n';
    }
    if (worst > 1e-10) throw CheckFailed{"gauge invariance: spectra differ by " + fmt(worst)};
}

void cmd_nu(const Options& o, std::ostream& out) {
    const GraphDocument doc = load_with_flux(o);
    const CycleBasis basis = cycle_basis(doc.graph);
    const CouplingPeriod p = coupling_period(doc.graph, doc.theta, basis);
    if (p.kind == CouplingPeriod::Kind::Trivial) {
        out << "nu = trivial\n";
        return;
    }
    out << "nu = " << p.nu.str() << '\n';
    if (!o.verify) return;
    bool ok = true;
    for (std::int64_t k = 1; k <= 3; ++k) {
        const bool zero = holonomy_vanishes(holonomy_vector(doc.graph, doc.theta.scaled(p.nu * Rational(k)), basis));
        out << "Hol(" << (p.nu * Rational(k)).str() << " theta) = 0: " << yes(zero) << '\n';
        ok = ok && zero;
    }
    for (std::int64_t d : {2, 3}) {
        const Rational part = p.nu * Rational(1, d);
        const bool zero = holonomy_vanishes(holonomy_vector(doc.graph, doc.theta.scaled(part), basis));
        out << "Hol(" << part.str() << " theta) = 0: " << yes(zero) << '\n';
        ok = ok && !zero;
    }
    if (!ok) throw CheckFailed{"coupling period does not generate the vanishing set"};
}

void cmd_product(const Options& o, std::ostream& out, std::ostream& err) {
    const GraphDocument a = load_graph_document(o.base);
    const GraphDocument b = load_graph_document(o.fiber_doc);
    ProductGraph p = [&] {
        if (o.through.empty()) return cartesian_product(a.graph, a.theta, b.graph, b.theta);
        std::vector<VertexId> ids;
        std::stringstream ss(o.through);
        for (std::string id; std::getline(ss, id, ',');) {
            if (!id.empty()) ids.push_back(id);
        }
        return product_through(a.graph, a.theta, b.graph, b.theta, ids);
    }();
    out << graph_document_json(p.graph, p.theta);
    if (o.check) {
        const DecompositionDefect d = tensor_decomposition_defect(p);
        err << "decomposition defect " << fmt(d.absolute) << '\n';
        if (d.absolute > 1e-12) throw CheckFailed{"tensor decomposition defect " + fmt(d.absolute)};
    }
}

void cmd_cusp_build(const Options& o, std::ostream& out) {
    const ProductGraph p = build_product(o);
    out << graph_document_json(p.graph, p.theta);
}

void cmd_cusp_check(const Options& o, std::ostream& out) {
    require_depth(o);
    std::vector<std::size_t> depths;
    for (std::size_t d = 1; d <= o.depth; ++d) depths.push_back(d);
    Options copy = o;
    const CuspHypothesisReport r = check_discrete_cusp(
        [&copy](std::size_t d) {
            Options local = copy;
            local.depth = d;
            return build_product(local);
        },
        depths, o.bound, o.epsilon);
    const CompactResolventDiagnostic cr = compact_resolvent_diagnostic(build_cusp(o));
    out << "depths=1.." << o.depth << '\n'
        << "h1=" << yes(r.h1) << '\n'
        << "h2=" << yes(r.h2) << '\n'
        << "h3=" << yes(r.h3) << '\n'
        << "sup_base_degree=" << fmt(r.sup_base_degree) << '\n'
        << "min_base_measure=" << fmt(r.min_base_measure) << '\n'
        << "fiber_size=" << r.fiber_size << '\n'
        << "fiber_holonomy_nonzero=" << yes(cr.fiber_holonomy_nonzero) << '\n'
        << "model_zero_multiplicity=" << cr.model_zero_multiplicity << '\n'
        << "model_bottom_diverges=" << yes(cr.tail_diverges) << '\n';
    if (!r.detail.empty()) out << "detail=" << r.detail << '\n';
    if (!r.holds()) throw CheckFailed{"discrete cusp hypotheses fail"};
}

void cmd_keystone(const Options& o, std::ostream& out) {
    const KeystoneReport k = verify_keystone(build_cusp(o), o.tol);
    out << "M=" << fmt(k.M) << '\n' << "c=" << fmt(k.c) << '\n';
    out << "check,lower_witness,upper_witness,lower_raw,upper_raw,holds\n";
    for (const TwoSidedCheck* t : {&k.degree, &k.laplacian, &k.form_degree}) {
        out << t->name << ',' << fmt(t->lower.witness) << ',' << fmt(t->upper.witness) << ','
            << fmt(t->lower.raw_witness) << ',' << fmt(t->upper.raw_witness) << ',' << yes(t->holds()) << '\n';
    }
    if (k.c_degenerate) out << "note=c = 0 (fiber holonomy vanishes); the lower form-degree bound is 0 <= Delta\n";
    if (!k.holds()) throw CheckFailed{"keystone inequality violated"};
}

void cmd_asymptotics(const Options& o, std::ostream& out) {
    const std::vector<double> grid = exponential_grid(o.kmin, o.kmax);
    const AsymptoticsReport r = eigen_ratio_series(build_cusp(o), grid, o.ratio_from);
    write_asymptotics_csv(out, r);
    if (!r.sandwich_all) throw CheckFailed{"eigenvalue sandwich violated"};
}

void cmd_counting(const Options& o, std::ostream& out) {
    const CuspProduct c = build_cusp(o);
    const std::vector<double> grid = exponential_grid(o.kmin, o.kmax);
    if (o.he_ratio) {
        const SectorSplit s = le_he_split(c);
        if (s.high_modes.empty()) throw Error(ErrorKind::BadParameters, "empty high-energy sector");
        const Eigen::VectorXd he = eigenvalues(s.high);
        std::vector<double> deg = degrees(c.product.graph);
        std::sort(deg.begin(), deg.end());
        const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(deg.data(), static_cast<Eigen::Index>(deg.size()));
        out << "lambda,N_he,N_deg,ratio\n";
        for (double lambda : grid) {
            const std::size_t a = counting_function(he, lambda);
            const std::size_t b = counting_function(d, lambda);
            out << fmt(lambda) << ',' << a << ',' << b << ',' << (b ? fmt(static_cast<double>(a) / b) : "nan") << '\n';
        }
        return;
    }
    const std::vector<CountingRow> rows = counting_sandwich(c, grid);
    write_counting_csv(out, rows);
    for (const auto& r : rows) {
        if (!r.sandwich_ok) throw CheckFailed{"counting sandwich violated at lambda = " + fmt(r.lambda)};
    }
}

void cmd_jacobi(const Options& o, std::ostream& out) {
    require_depth(o);
    const JacobiReport j = jacobi_reduction(LevelChain::cusp_example(o.depth));
    out << "depth=" << o.depth << '\n'
        << "offdiag_max_defect=" << fmt(j.max_offdiag_defect) << '\n'
        << "interior_expected=" << fmt(j.interior_expected) << '\n'
        << "interior_max_defect=" << fmt(j.max_interior_defect) << '\n'
        << "site0_measured=" << fmt(j.site0_measured) << '\n'
        << "site0_displayed=" << fmt(j.site0_displayed) << '\n'
        << "last_site=" << fmt(j.last_site) << '\n'
        << "note=" << j.note << '\n';
    if (o.ac) {
        const AcIntervalReport a = ac_interval(o.depth, o.widen);
        const Eigen::Index n = a.values.size();
        out << "lambda_1=" << fmt(a.values(0)) << '\n'
            << "lambda_2=" << fmt(n > 1 ? a.values(1) : a.values(0)) << '\n'
            << "lambda_max=" << fmt(a.values(n - 1)) << '\n'
            << "band=[" << fmt(a.band_low) << ", " << fmt(a.band_high) << "]\n"
            << "fraction_inside_widened=" << fmt(a.fraction_inside) << '\n'
            << "bottom_sign=" << a.bottom_sign << '\n';
    }
    if (!j.matches()) throw CheckFailed{"Jacobi coefficients differ from -1 / e^{1/2}+e^{-1/2}"};
}

void cmd_falpha(const Options& o, std::ostream& out) {
    Options local = o;
    local.depth = 1;
    const CuspProduct c = build_cusp(local);
    std::vector<double> v(c.fiber.values.data(), c.fiber.values.data() + c.fiber.values.size());
    const std::vector<double> d = degrees(c.product.fiber);
    for (double a : o.alpha) out << "F(" << fmt(a) << ") = " << fmt(F_alpha(v, d, a)) << '\n';
    for (double a : o.solve) out << "alpha(" << fmt(a) << ") = " << fmt(solve_alpha(v, d, a)) << '\n';
}

void cmd_build_weights(const Options& o, std::ostream& out) {
    require_depth(o);
    const TargetFunction f = parse_profile(o.profile);
    const WeightedGraph base = LevelChain::cusp_example(o.depth).to_graph();
    const ReweightedBase r = build_weights_for_f(base, f);
    if (o.counts) {
        out << "lambda,count,floor_f\n";
        // midpoints between consecutive levels of f keep clear of jumps
        for (std::size_t n = 1; n < base.vertex_count(); ++n) {
            const double lambda = f.inverse(static_cast<double>(n) + 0.5);
            out << fmt(lambda) << ',' << inverse_measure_count(r.measure, lambda) << ','
                << static_cast<long long>(std::floor(f.f(lambda))) << '\n';
        }
    } else {
        out << graph_document_json(r.graph, MagneticPotential::zero(r.graph));
    }
    if (!r.degree_dominated) throw CheckFailed{"reweighted degree exceeds the original"};
}

void cmd_evolve(const Options& o, std::ostream& out) {
    require_depth(o);
    SectorOperator s = [&] {
        if (o.sector == "le" && o.fiber_graph.empty()) {
            const Rational kappa = Rational::parse(o.kappa);
            // fiber flux kappa 2pi/3 vanishes exactly when kappa is a multiple of 3
            if (!(kappa * Rational(1, 3)).is_integer()) {
                throw Error(ErrorKind::BadParameters, "no low-energy sector: fiber holonomy is nonzero");
            }
            return chain_sector_operator(LevelChain::cusp_example(o.depth));
        }
        const CuspProduct c = build_cusp(o);
        if (o.sector == "le") return sector_operator(c, Sector::Low);
        if (o.sector == "he") return sector_operator(c, Sector::High);
        if (o.sector == "full") return sector_operator(c, Sector::Full);
        throw Error(ErrorKind::BadParameters, "--sector must be le, he or full");
    }();
    const auto [lo, hi] = parse_range(o.region);
    const std::vector<std::size_t> region = indices_in_levels(s, lo, hi);
    const Spectrum spec = eigensolve(s.op);
    Eigen::VectorXcd v;
    if (o.initial == "point") {
        const std::vector<std::size_t> at = indices_in_levels(s, o.start, o.start);
        if (at.empty()) throw Error(ErrorKind::BadParameters, "--start level outside the truncation");
        v = normalized_point_mass(s.op.weight(), at.front());
    } else if (o.initial == "eigen") {
        if (o.eigen_index >= spec.size()) throw Error(ErrorKind::BadParameters, "--eigen-index out of range");
        v = spec.vectors.col(static_cast<Eigen::Index>(o.eigen_index));
    } else {
        throw Error(ErrorKind::BadParameters, "--initial must be point or eigen");
    }
    const OccupationTrace t = occupation_trace(spec, v, region, o.horizon, o.steps);
    out << "time,occupation,running_mean\n";
    for (std::size_t k = 0; k < t.time.size(); ++k) {
        out << fmt(t.time[k]) << ',' << fmt(t.occupation[k]) << ',' << fmt(t.running_mean[k]) << '\n';
    }
}

void cmd_girth(const Options& o, std::ostream& out) {
    const GraphDocument doc = load_graph_document(o.graph);
    std::optional<VertexId> at;
    if (!o.vertex.empty()) at = o.vertex;
    const WeightedMetricReport r = girth_and_radius(doc.graph, at);
    auto ext = [](ExtendedReal e) { return e.is_finite() ? fmt(e.value()) : std::string("inf"); };
    out << "girth=" << ext(r.girth) << '\n' << "radius=" << ext(r.radius) << '\n';
    if (at) out << "girth_at=" << ext(r.girth_at) << '\n' << "radius_at=" << ext(r.radius_at) << '\n';
    out << "witness=";
    for (std::size_t i = 0; i < r.witness_cycle.size(); ++i) out << (i ? " " : "") << doc.graph.id(r.witness_cycle[i]);
    out << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"cuspec: magnetic Laplacians on weighted graphs and discrete cusps", "cuspec"};
    app.require_subcommand(1, 1);
    app.add_option("-o,--output", o.output, "write the result here instead of stdout");

    auto graph_opts = [&](CLI::App* s, bool required) {
        auto* g = s->add_option("--graph", o.graph, "graph document (JSON)");
        if (required) g->required();
        s->add_option("--flux", o.flux, "put 2pi p/q on every non-tree edge of the BFS cycle basis");
        s->add_option("--kappa", o.kappa, "scale the document potential by p/q");
    };
    auto cusp_opts = [&](CLI::App* s, std::size_t depth, const char* kappa = "1") {
        o.depth = depth;
        o.kappa = kappa;
        s->add_option("--depth", o.depth, "truncation depth N")->capture_default_str();
        s->add_option("--fiber", o.fiber, "fiber cycle size n")->capture_default_str();
        s->add_option("--kappa", o.kappa, "coupling p/q; fiber flux kappa 2pi/3")->capture_default_str();
        s->add_option("--fiber-graph", o.fiber_graph, "fiber graph document instead of the cycle");
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the magnetic Laplacian");
    graph_opts(spectrum, true);
    spectrum->add_option("--method", o.method, "auto, householder or jacobi")->capture_default_str();
    spectrum->add_option("--vectors", o.vectors, "also dump eigenvectors (binary) to this file");
    spectrum->add_flag("--check-trace", o.check_trace, "verify sum of eigenvalues = sum of degrees");

    auto* holonomy = app.add_subcommand("holonomy", "fundamental-cycle holonomies");
    graph_opts(holonomy, false);
    holonomy->add_flag("--kernel-suite", o.kernel_suite, "random kernel/holonomy dichotomy suite");
    holonomy->add_option("--seed", o.seed)->capture_default_str();
    holonomy->add_option("--count", o.count)->capture_default_str();

    auto* gauge = app.add_subcommand("gauge", "find a gauge, or test gauge invariance on random gauges");
    graph_opts(gauge, true);
    gauge->add_option("--target", o.target, "second document; prints sigma with U*(target) = graph");
    gauge->add_option("--seed", o.seed)->capture_default_str();
    gauge->add_option("--count", o.count)->capture_default_str();

    auto* nu = app.add_subcommand("nu", "coupling period of the potential");
    graph_opts(nu, true);
    nu->add_flag("--verify", o.verify, "check Hol(k nu theta) = 0 and Hol(nu/2 theta) != 0");

    auto* product = app.add_subcommand("product", "Cartesian product or product through I of two documents");
    product->add_option("--base", o.base, "G1 document")->required();
    product->add_option("--fiber", o.fiber_doc, "G2 document")->required();
    product->add_option("--through", o.through, "comma-separated I subset of V2 (default: Cartesian)");
    product->add_flag("--check", o.check, "verify the tensor decomposition to 1e-12");

    auto* cusp_build = app.add_subcommand("cusp-build", "the example cusp truncation as a graph document");
    cusp_opts(cusp_build, 1);

    auto* cusp_check = app.add_subcommand("cusp-check", "hypotheses over truncations 1..N");
    cusp_opts(cusp_check, 30);
    cusp_check->add_option("--bound", o.bound, "declared bound on deg_G1")->capture_default_str();
    cusp_check->add_option("--epsilon", o.epsilon)->capture_default_str();

    auto* keystone = app.add_subcommand("keystone", "form inequalities on a cusp truncation");
    cusp_opts(keystone, 30);
    keystone->add_option("--tol", o.tol)->capture_default_str();

    auto* asymptotics = app.add_subcommand("asymptotics", "eigenvalue sandwich and ratio");
    cusp_opts(asymptotics, 60);
    asymptotics->add_option("--ratio-from", o.ratio_from)->capture_default_str();
    asymptotics->add_option("--kmin", o.kmin)->capture_default_str();
    asymptotics->add_option("--kmax", o.kmax)->capture_default_str();

    auto* counting = app.add_subcommand("counting", "counting sandwich on lambda = e^k");
    cusp_opts(counting, 40);
    counting->add_option("--kmin", o.kmin)->capture_default_str();
    counting->add_option("--kmax", o.kmax)->capture_default_str();
    counting->add_flag("--he-ratio", o.he_ratio, "N(Delta^he) / N(deg_G) instead (needs a trivial fiber holonomy)");

    auto* jacobi = app.add_subcommand("jacobi", "Jacobi form of the low-energy block");
    o.depth = 30;
    jacobi->add_option("--depth", o.depth)->capture_default_str();
    jacobi->add_flag("--ac", o.ac, "spectral summary against the a.c. band");
    jacobi->add_option("--widen", o.widen)->capture_default_str();

    auto* falpha = app.add_subcommand("falpha", "F(alpha) and its inverse for the fiber");
    falpha->add_option("--fiber", o.fiber)->capture_default_str();
    falpha->add_option("--kappa", o.kappa)->capture_default_str();
    falpha->add_option("--fiber-graph", o.fiber_graph);
    falpha->add_option("--alpha", o.alpha, "evaluate F here");
    falpha->add_option("--solve", o.solve, "find the smallest alpha with F(alpha) = a");

    auto* build_weights = app.add_subcommand("build-weights", "reweight the half-line for a counting profile");
    build_weights->add_option("--depth", o.depth)->required();
    build_weights->add_option("--target", o.profile, "identity, power:p or log")->capture_default_str();
    build_weights->add_flag("--counts", o.counts, "emit counting CSV instead of the graph");

    auto* evolve = app.add_subcommand("evolve", "occupation of a region under e^{it Delta}");
    cusp_opts(evolve, 800, "0");
    evolve->add_option("--sector", o.sector, "le, he or full")->capture_default_str();
    evolve->add_option("--start", o.start, "level of the initial point mass")->capture_default_str();
    evolve->add_option("--region", o.region, "levels a:b of X")->capture_default_str();
    evolve->add_option("--horizon", o.horizon)->capture_default_str();
    evolve->add_option("--steps", o.steps)->capture_default_str();
    evolve->add_option("--initial", o.initial, "point or eigen")->capture_default_str();
    evolve->add_option("--eigen-index", o.eigen_index)->capture_default_str();

    auto* girth = app.add_subcommand("girth", "weighted girth and radius of injectivity");
    girth->add_option("--graph", o.graph)->required();
    girth->add_option("--vertex", o.vertex, "also report the girth through this vertex");
    o.kappa = "1";

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    // per-subcommand defaults share one Options; reapply the ones not given
    auto given = [](CLI::App* s, const char* name) { return s->count(name) > 0; };
    auto defaults = [&](CLI::App* s, std::size_t depth, const char* kappa) {
        if (!given(s, "--depth")) o.depth = depth;
        if (!given(s, "--kappa")) o.kappa = kappa;
    };

    std::ostringstream buf;
    try {
        if (spectrum->parsed()) {
            cmd_spectrum(o, buf);
        } else if (holonomy->parsed()) {
            cmd_holonomy(o, buf);
        } else if (gauge->parsed()) {
            cmd_gauge(o, buf);
        } else if (nu->parsed()) {
            cmd_nu(o, buf);
        } else if (product->parsed()) {
            cmd_product(o, buf, err);
        } else if (cusp_build->parsed()) {
            defaults(cusp_build, 1, "1");
            cmd_cusp_build(o, buf);
        } else if (cusp_check->parsed()) {
            defaults(cusp_check, 30, "1");
            cmd_cusp_check(o, buf);
        } else if (keystone->parsed()) {
            defaults(keystone, 30, "1");
            cmd_keystone(o, buf);
        } else if (asymptotics->parsed()) {
            defaults(asymptotics, 60, "1");
            cmd_asymptotics(o, buf);
        } else if (counting->parsed()) {
            defaults(counting, 40, "1");
            cmd_counting(o, buf);
        } else if (jacobi->parsed()) {
            if (!given(jacobi, "--depth")) o.depth = 30;
            cmd_jacobi(o, buf);
        } else if (falpha->parsed()) {
            if (!given(falpha, "--kappa")) o.kappa = "1";
            cmd_falpha(o, buf);
        } else if (build_weights->parsed()) {
            cmd_build_weights(o, buf);
        } else if (evolve->parsed()) {
            defaults(evolve, 800, "0");
            cmd_evolve(o, buf);
        } else if (girth->parsed()) {
            cmd_girth(o, buf);
        }
    } catch (const CLI::RequiredError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const CheckFailed& f) {
        err << "check failed: " << f.what << '\n';
        // partial output is still useful for diagnosis
        if (o.output.empty()) out << buf.str();
        return kExitCheckFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    if (o.output.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(o.output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << o.output << '\n';
            return kExitValidation;
        }
        f << buf.str();
    }
    return kExitOk;
}

}  // namespace cuspec::cli
