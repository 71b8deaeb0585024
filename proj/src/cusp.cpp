#include "cuspec/cusp.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "cuspec/error.hpp"

namespace cuspec {

namespace {

const double kSqrtE = std::exp(0.5);
const double kInvSqrtE = std::exp(-0.5);

Eigen::VectorXd base_measure(const CuspProduct& c) {
    const auto& m = c.product.base.measures();
    return Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
}

Eigen::VectorXd fiber_measure(const CuspProduct& c) {
    const auto& m = c.product.fiber.measures();
    return Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
}

Eigen::VectorXd product_weight(const CuspProduct& c) {
    const auto& m = c.product.graph.measures();
    return Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
}

std::vector<double> sorted_model_values(const CuspProduct& c) {
    std::vector<double> v;
    v.reserve(c.levels() * c.fiber.size());
    for (std::size_t x = 0; x < c.levels(); ++x) {
        const double inv = 1.0 / c.product.base.measure(x);
        for (std::size_t i = 0; i < c.fiber.size(); ++i) v.push_back(c.fiber.values(static_cast<Eigen::Index>(i)) * inv);
    }
    std::sort(v.begin(), v.end());
    return v;
}

std::size_t count_sorted(const std::vector<double>& v, double lambda) {
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), lambda + kCountingTolerance) - v.begin());
}

Eigen::VectorXd full_spectrum(const CuspProduct& c) {
    return eigenvalues(assemble_laplacian(c.product.graph, c.product.theta));
}

std::vector<CountingRow> counting_rows(const CuspProduct& c, const std::vector<double>& model,
                                       const Eigen::VectorXd& full, std::span<const double> grid) {
    std::vector<CountingRow> rows;
    rows.reserve(grid.size());
    for (double lambda : grid) {
        CountingRow r;
        r.lambda = lambda;
        r.model_shifted = count_sorted(model, lambda - 2.0 * c.M);
        r.full = counting_function(full, lambda);
        r.model = count_sorted(model, lambda);
        r.sandwich_ok = r.model_shifted <= r.full && r.full <= r.model;
        rows.push_back(r);
    }
    return rows;
}

bool is_constant(const std::vector<double>& v, double rel = 1e-12) {
    if (v.empty()) return true;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo <= rel * std::abs(*hi);
}

}  // namespace

CuspProduct make_cusp(ProductGraph product) {
    if (product.kind != ProductKind::ThroughI) {
        throw Error(ErrorKind::NotThroughIProduct, "cusp analysis needs a product through I");
    }
    CuspProduct c{std::move(product), 0.0, {}, {}, {}, {}, {}};
    double sup_deg = 0.0;
    for (double d : degrees(c.product.base)) sup_deg = std::max(sup_deg, d);
    double max_inv = 0.0;
    for (double m : c.product.fiber.measures()) max_inv = std::max(max_inv, 1.0 / m);
    c.M = sup_deg * max_inv;

    c.fiber = eigensolve(assemble_laplacian(c.product.fiber, c.product.fiber_theta));
    const auto n2 = static_cast<Eigen::Index>(c.fiber.size());
    Eigen::MatrixXcd low = Eigen::MatrixXcd::Zero(n2, n2);
    const Eigen::VectorXd w = fiber_measure(c);
    for (Eigen::Index i = 0; i < n2; ++i) {
        if (c.fiber.values(i) < kFiberKernelThreshold) {
            c.low_modes.push_back(static_cast<std::size_t>(i));
            low += c.fiber.vectors.col(i) * c.fiber.vectors.col(i).adjoint();
        } else {
            c.high_modes.push_back(static_cast<std::size_t>(i));
        }
    }
    // P f = sum_i g_i <g_i, f>_{m2}
    c.p_low = low * w.cast<Complex>().asDiagonal();
    c.p_high = Eigen::MatrixXcd::Identity(n2, n2) - c.p_low;
    return c;
}

// ---------------------------------------------------------------- hypotheses

CuspHypothesisReport check_discrete_cusp(const ProductGraph& product, double degree_bound, double epsilon) {
    if (product.kind != ProductKind::ThroughI) {
        throw Error(ErrorKind::NotThroughIProduct, "hypotheses are stated for products through I");
    }
    CuspHypothesisReport r;
    r.depths = {product.base.vertex_count() - 1};
    const auto& m = product.base.measures();
    bool decreasing = true;
    for (std::size_t j = 1; j < m.size(); ++j) decreasing = decreasing && m[j] < m[j - 1];
    r.measure_decreasing = decreasing;
    r.min_base_measure = *std::min_element(m.begin(), m.end());
    r.h1 = decreasing && r.min_base_measure < epsilon;
    r.fiber_size = product.fiber.vertex_count();
    r.h2 = r.fiber_size > 0;
    for (double d : degrees(product.base)) r.sup_base_degree = std::max(r.sup_base_degree, d);
    r.h3 = r.sup_base_degree <= degree_bound * (1.0 + 1e-12);
    std::ostringstream os;
    if (!decreasing) os << "m1 does not decrease along the base order; ";
    if (r.min_base_measure >= epsilon) os << "min m1 = " << r.min_base_measure << " is not below " << epsilon << "; ";
    if (!r.h3) os << "sup deg_G1 = " << r.sup_base_degree << " exceeds " << degree_bound << "; ";
    r.detail = os.str();
    return r;
}

CuspHypothesisReport check_discrete_cusp(const std::function<ProductGraph(std::size_t)>& truncation,
                                         std::span<const std::size_t> depths, double degree_bound, double epsilon) {
    if (depths.empty()) throw Error(ErrorKind::BadParameters, "empty truncation family");
    std::vector<CuspHypothesisReport> parts(depths.size());
    parallel_for(depths.size(), [&](std::size_t k) {
        // epsilon is judged on the whole family below
        parts[k] = check_discrete_cusp(truncation(depths[k]), degree_bound, 0.0);
    });
    CuspHypothesisReport r;
    r.depths.assign(depths.begin(), depths.end());
    r.h1 = true;
    r.measure_decreasing = true;
    r.h2 = true;
    r.h3 = true;
    r.min_base_measure = std::numeric_limits<double>::infinity();
    std::ostringstream os;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& p = parts[k];
        const bool decreasing = p.measure_decreasing;
        r.h1 = r.h1 && decreasing;
        r.measure_decreasing = r.measure_decreasing && decreasing;
        r.h2 = r.h2 && p.h2;
        r.h3 = r.h3 && p.h3;
        r.sup_base_degree = std::max(r.sup_base_degree, p.sup_base_degree);
        r.min_base_measure = std::min(r.min_base_measure, p.min_base_measure);
        r.fiber_size = p.fiber_size;
        if (!decreasing) os << "depth " << depths[k] << ": m1 does not decrease along the base order; ";
        if (!p.h3) os << "depth " << depths[k] << ": sup deg_G1 = " << p.sup_base_degree << "; ";
    }
    if (r.min_base_measure >= epsilon) {
        r.h1 = false;
        os << "min m1 over the family = " << r.min_base_measure << " is not below " << epsilon << "; ";
    }
    r.detail = os.str();
    return r;
}

// ------------------------------------------------------------------ model

HermitianOperator model_operator(const CuspProduct& c) {
    const HermitianOperator d2 = assemble_laplacian(c.product.fiber, c.product.fiber_theta);
    const Eigen::VectorXd m1 = base_measure(c);
    Eigen::MatrixXcd inv = Eigen::MatrixXcd::Zero(m1.size(), m1.size());
    inv.diagonal() = m1.cwiseInverse().cast<Complex>();
    return HermitianOperator(kronecker(inv, d2.matrix()), product_weight(c));
}

HermitianOperator model_degree(const CuspProduct& c) {
    const std::vector<double> d2 = degrees(c.product.fiber);
    const std::size_t n2 = d2.size();
    Eigen::VectorXd d(static_cast<Eigen::Index>(c.levels() * n2));
    for (std::size_t x = 0; x < c.levels(); ++x) {
        for (std::size_t y = 0; y < n2; ++y) {
            d(static_cast<Eigen::Index>(x * n2 + y)) = d2[y] / c.product.base.measure(x);
        }
    }
    return HermitianOperator::diagonal(d, product_weight(c));
}

Spectrum model_operator_spectrum(const CuspProduct& c) {
    const std::size_t n2 = c.fiber.size();
    const std::size_t total = c.levels() * n2;
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(total);
    for (std::size_t x = 0; x < c.levels(); ++x) {
        for (std::size_t i = 0; i < n2; ++i) {
            order.emplace_back(c.fiber.values(static_cast<Eigen::Index>(i)) / c.product.base.measure(x), x * n2 + i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Spectrum s;
    s.weight = product_weight(c);
    s.values.resize(static_cast<Eigen::Index>(total));
    s.vectors = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    for (std::size_t k = 0; k < total; ++k) {
        const auto [value, key] = order[k];
        const std::size_t x = key / n2;
        const auto i = static_cast<Eigen::Index>(key % n2);
        s.values(static_cast<Eigen::Index>(k)) = value;
        const double scale = 1.0 / std::sqrt(c.product.base.measure(x));
        for (std::size_t y = 0; y < n2; ++y) {
            s.vectors(static_cast<Eigen::Index>(x * n2 + y), static_cast<Eigen::Index>(k)) =
                scale * c.fiber.vectors(static_cast<Eigen::Index>(y), i);
        }
    }
    return s;
}

// --------------------------------------------------------------- keystone

KeystoneReport verify_keystone(const CuspProduct& c, double tol) {
    const HermitianOperator deg = assemble_degree(c.product.graph);
    const HermitianOperator lap = assemble_laplacian(c.product.graph, c.product.theta);
    const HermitianOperator mdeg = model_degree(c);
    const HermitianOperator model = model_operator(c);

    KeystoneReport r;
    r.M = c.M;
    double max_deg2 = 0.0;
    for (double d : degrees(c.product.fiber)) max_deg2 = std::max(max_deg2, d);
    r.c = std::max(0.0, c.fiber.values(0)) / max_deg2;
    r.c_degenerate = c.fiber_holonomy_trivial();
    if (r.c_degenerate) r.c = 0.0;

    r.degree = {"model degree <= deg_G <= model degree + M", form_leq(mdeg, deg, tol),
                form_leq(deg, mdeg.shifted(c.M), tol)};
    r.laplacian = {"model <= Delta_G <= model + 2M", form_leq(model, lap, tol), form_leq(lap, model.shifted(2.0 * c.M), tol)};
    r.form_degree = {"c (deg_G - M) <= Delta_G <= 2M + 2 deg_G", form_leq(r.c * deg.shifted(-c.M), lap, tol),
                     form_leq(lap, (2.0 * deg).shifted(2.0 * c.M), tol)};
    return r;
}

// ----------------------------------------------------------- asymptotics

std::vector<double> exponential_grid(int first, int last) {
    std::vector<double> g;
    for (int k = first; k <= last; ++k) g.push_back(std::exp(static_cast<double>(k)));
    return g;
}

AsymptoticsReport eigen_ratio_series(const CuspProduct& c, std::span<const double> lambda_grid, std::size_t ratio_from) {
    if (c.fiber_holonomy_trivial()) {
        throw Error(ErrorKind::TrivialFiberHolonomy, "eigenvalue ratios need a fiber potential with nonzero holonomy");
    }
    const std::vector<double> model = sorted_model_values(c);
    const Eigen::VectorXd full = full_spectrum(c);

    AsymptoticsReport r;
    r.M = c.M;
    r.ratio_from = ratio_from;
    r.sandwich_all = true;
    r.ratio_min = std::numeric_limits<double>::infinity();
    r.ratio_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < model.size(); ++k) {
        EigenPairRow row;
        row.n = k + 1;
        row.model = model[k];
        row.full = full(static_cast<Eigen::Index>(k));
        row.ratio = row.full / row.model;
        const double t = sandwich_tolerance(row.model);
        row.sandwich_ok = row.model - t <= row.full && row.full <= row.model + 2.0 * c.M + t;
        r.sandwich_all = r.sandwich_all && row.sandwich_ok;
        if (row.n >= ratio_from) {
            r.ratio_min = std::min(r.ratio_min, row.ratio);
            r.ratio_max = std::max(r.ratio_max, row.ratio);
        }
        r.eigen.push_back(row);
    }
    r.counting = counting_rows(c, model, full, lambda_grid);
    r.counting_all = std::all_of(r.counting.begin(), r.counting.end(), [](const CountingRow& x) { return x.sandwich_ok; });
    return r;
}

std::vector<CountingRow> counting_sandwich(const CuspProduct& c, std::span<const double> lambda_grid) {
    return counting_rows(c, sorted_model_values(c), full_spectrum(c), lambda_grid);
}

std::size_t geometric_model_count(std::span<const double> fiber_values, std::size_t depth, double lambda) {
    std::size_t total = 0;
    for (double li : fiber_values) {
        if (li < kFiberKernelThreshold) {
            if (lambda >= 0.0) total += depth + 1;
            continue;
        }
        if (lambda < li) continue;
        const auto levels = static_cast<std::size_t>(std::floor(std::log(lambda / li))) + 1;
        total += std::min(depth + 1, levels);
    }
    return total;
}

CompactResolventDiagnostic compact_resolvent_diagnostic(const CuspProduct& c) {
    CompactResolventDiagnostic d;
    d.fiber_holonomy_nonzero = !c.fiber_holonomy_trivial();
    d.model_zero_multiplicity = c.low_modes.size() * c.levels();
    const double bottom = d.fiber_holonomy_nonzero ? c.fiber.values(0) : 0.0;
    d.tail_bottom.resize(c.levels());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = c.levels(); k-- > 0;) {
        best = std::min(best, bottom / c.product.base.measure(k));
        d.tail_bottom[k] = best;
    }
    bool nondecreasing = true;
    for (std::size_t k = 1; k < d.tail_bottom.size(); ++k) nondecreasing = nondecreasing && d.tail_bottom[k] >= d.tail_bottom[k - 1];
    d.tail_diverges = d.fiber_holonomy_nonzero && nondecreasing && d.tail_bottom.back() > 1e3 * d.tail_bottom.front();
    return d;
}

FormDomainProbe form_domain_probe(const CuspProduct& c, double c1, double tol) {
    FormDomainProbe p;
    p.c1 = c1;
    p.fiber_holonomy_nonzero = !c.fiber_holonomy_trivial();
    const std::size_t n2 = c.fiber.size();
    const std::size_t dim = c.product.graph.vertex_count();
    const std::vector<double> deg = degrees(c.product.graph);
    const Eigen::VectorXcd g1 = c.fiber.vectors.col(0);
    for (std::size_t x = 0; x < c.levels(); ++x) {
        Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        const double s = 1.0 / std::sqrt(c.product.base.measure(x));
        double deg_form = 0.0;
        for (std::size_t y = 0; y < n2; ++y) {
            const auto v = static_cast<Eigen::Index>(x * n2 + y);
            f(v) = s * g1(static_cast<Eigen::Index>(y));
            deg_form += c.product.graph.measure(static_cast<std::size_t>(v)) * std::norm(f(v)) * deg[static_cast<std::size_t>(v)];
        }
        p.required_c2.push_back(c1 * deg_form - quadratic_form(c.product.graph, c.product.theta, f));
    }
    const HermitianOperator degop = assemble_degree(c.product.graph);
    p.uniform_bound = form_leq(c1 * degop.shifted(-c.M), assemble_laplacian(c.product.graph, c.product.theta), tol);
    return p;
}

// ---------------------------------------------------------- le/he splitting

SectorSplit le_he_split(const CuspProduct& c) {
    const ProductGraph& p = c.product;
    const std::size_t n2 = p.fiber.vertex_count();
    if (p.index_set.size() != n2) throw Error(ErrorKind::NotSplittable, "the split needs I = V2");
    if (!is_constant(p.fiber.measures(), 1e-14)) throw Error(ErrorKind::NotSplittable, "the split needs constant m2");
    const double m2 = p.fiber.measure(0);
    const std::size_t L = c.levels();
    const auto N2 = static_cast<Eigen::Index>(n2);

    // flat fiber eigenbasis
    const Eigen::MatrixXcd G = std::sqrt(m2) * c.fiber.vectors;
    const Eigen::MatrixXcd S1 = assemble_laplacian(p.base, p.base_theta).conjugated();
    const Eigen::MatrixXcd S = assemble_laplacian(p.graph, p.theta).conjugated();

    // rotated matrix R0 = (1 (x) G)^* S (1 (x) G), block by block over levels
    const auto D = static_cast<Eigen::Index>(L * n2);
    Eigen::MatrixXcd R0 = Eigen::MatrixXcd::Zero(D, D);
    for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t xp = 0; xp < L; ++xp) {
            const auto bx = static_cast<Eigen::Index>(x * n2);
            const auto bxp = static_cast<Eigen::Index>(xp * n2);
            auto block = S.block(bx, bxp, N2, N2);
            if (block.cwiseAbs().maxCoeff() == 0.0) continue;
            R0.block(bx, bxp, N2, N2) = G.adjoint() * block * G;
        }
    }
    // analytic assembly S1/m2 (x) 1 + diag(1/m1) (x) diag(lambda)
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(D, D);
    for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t xp = 0; xp < L; ++xp) {
            const Complex s1 = S1(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(xp)) / m2;
            if (s1 == Complex(0.0)) continue;
            for (Eigen::Index i = 0; i < N2; ++i) {
                B(static_cast<Eigen::Index>(x * n2) + i, static_cast<Eigen::Index>(xp * n2) + i) = s1;
            }
        }
        for (Eigen::Index i = 0; i < N2; ++i) {
            B(static_cast<Eigen::Index>(x * n2) + i, static_cast<Eigen::Index>(x * n2) + i) +=
                c.fiber.values(i) / p.base.measure(x);
        }
    }
    // entries of level block (x, x') are sums of |V2|^2 products of S entries
    // from that block, so compare against sqrt(|S_xx| |S_x'x'|) per level
    std::vector<double> level_norm(L);
    for (std::size_t x = 0; x < L; ++x) {
        const auto bx = static_cast<Eigen::Index>(x * n2);
        level_norm[x] = std::max(S.block(bx, bx, N2, N2).cwiseAbs().maxCoeff(), 1.0);
    }
    double defect = 0.0;
    for (Eigen::Index b = 0; b < D; ++b) {
        for (Eigen::Index a = 0; a < D; ++a) {
            const double scale = std::sqrt(level_norm[static_cast<std::size_t>(a / N2)] *
                                           level_norm[static_cast<std::size_t>(b / N2)]);
            defect = std::max(defect, std::abs(R0(a, b) - B(a, b)) / scale);
        }
    }

    SectorSplit out{HermitianOperator::flat(Eigen::MatrixXcd()), HermitianOperator::flat(Eigen::MatrixXcd()), L,
                    c.low_modes, c.high_modes, defect, Eigen::MatrixXcd::Zero(D, D)};
    auto extract = [&](const std::vector<std::size_t>& modes, Eigen::Index column_offset) {
        const auto r = static_cast<Eigen::Index>(modes.size());
        Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L) * r, static_cast<Eigen::Index>(L) * r);
        for (std::size_t x = 0; x < L; ++x) {
            for (Eigen::Index k = 0; k < r; ++k) {
                const Eigen::Index row = static_cast<Eigen::Index>(x * n2 + modes[static_cast<std::size_t>(k)]);
                const Eigen::Index col = column_offset + static_cast<Eigen::Index>(x) * r + k;
                out.basis.block(static_cast<Eigen::Index>(x * n2), col, N2, 1) =
                    G.col(static_cast<Eigen::Index>(modes[static_cast<std::size_t>(k)]));
                for (std::size_t xp = 0; xp < L; ++xp) {
                    for (Eigen::Index kp = 0; kp < r; ++kp) {
                        const Eigen::Index rowp = static_cast<Eigen::Index>(xp * n2 + modes[static_cast<std::size_t>(kp)]);
                        blk(static_cast<Eigen::Index>(x) * r + k, static_cast<Eigen::Index>(xp) * r + kp) = B(row, rowp);
                    }
                }
            }
        }
        return HermitianOperator::flat(std::move(blk));
    };
    out.low = extract(c.low_modes, 0);
    out.high = extract(c.high_modes, static_cast<Eigen::Index>(L * c.low_modes.size()));
    return out;
}

// --------------------------------------------------------- Jacobi reduction

JacobiReport jacobi_reduction(const LevelChain& chain) {
    if (chain.depth() < 2 || chain.log_weight.size() + 1 != chain.log_measure.size()) {
        throw Error(ErrorKind::WrongWeights, "the reduction needs a half-line of depth >= 2");
    }
    const LevelChain expected = LevelChain::cusp_example(chain.depth());
    for (std::size_t j = 0; j < chain.size(); ++j) {
        if (std::abs(chain.log_measure[j] - expected.log_measure[j]) > 1e-12) {
            throw Error(ErrorKind::WrongWeights, "m1(" + std::to_string(j) + ") is not e^-" + std::to_string(j));
        }
    }
    for (std::size_t j = 0; j < chain.depth(); ++j) {
        if (std::abs(chain.log_weight[j] - expected.log_weight[j]) > 1e-12) {
            throw Error(ErrorKind::WrongWeights, "E1(" + std::to_string(j) + ", " + std::to_string(j + 1) +
                                                     ") is not e^-(2j+1)/2");
        }
    }
    JacobiReport r;
    r.matrix = chain_jacobi_matrix(chain);
    r.interior_expected = kSqrtE + kInvSqrtE;
    for (Eigen::Index j = 0; j < r.matrix.off.size(); ++j) {
        r.max_offdiag_defect = std::max(r.max_offdiag_defect, std::abs(r.matrix.off(j) + 1.0));
    }
    const Eigen::Index last = r.matrix.diag.size() - 1;
    for (Eigen::Index j = 1; j < last; ++j) {
        r.max_interior_defect = std::max(r.max_interior_defect, std::abs(r.matrix.diag(j) - r.interior_expected));
    }
    r.site0_measured = r.matrix.diag(0);
    r.last_site = r.matrix.diag(last);
    // Delta_N has 1 at site 0; the displayed constant and delta_0 coefficient are added on top
    r.site0_displayed = 1.0 + (kInvSqrtE - 1.0) + kSqrtE + kInvSqrtE - 2.0;
    r.site0_discrepancy = std::abs(r.site0_measured - r.site0_displayed) > 1e-12;
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << "site-0 diagonal " << r.site0_measured << " (direct conjugation, e^{-1/2})";
    if (r.site0_discrepancy) {
        os << " differs from " << r.site0_displayed
           << " given by Delta_N + (e^{-1/2} - 1) delta_0 + e^{1/2} + e^{-1/2} - 2; the difference is a rank-one "
              "perturbation at site 0 and leaves the essential spectrum unchanged";
    }
    r.note = os.str();
    return r;
}

JacobiReport jacobi_reduction(const CuspProduct& c) {
    if (!c.fiber_holonomy_trivial()) {
        throw Error(ErrorKind::BadParameters, "no low-energy sector: the fiber holonomy is nonzero");
    }
    const WeightedGraph& base = c.product.base;
    LevelChain chain;
    for (std::size_t j = 0; j < base.vertex_count(); ++j) chain.log_measure.push_back(std::log(base.measure(j)));
    if (base.edge_count() + 1 != base.vertex_count()) throw Error(ErrorKind::WrongWeights, "base is not a path");
    for (std::size_t j = 0; j + 1 < base.vertex_count(); ++j) {
        const double w = base.weight(j, j + 1);
        if (w <= 0.0) throw Error(ErrorKind::WrongWeights, "base is not the path 0 - 1 - ... - N");
        chain.log_weight.push_back(std::log(w));
    }
    return jacobi_reduction(chain);
}

AcIntervalReport ac_interval(std::size_t depth, double widen) {
    const Tridiagonal t = chain_jacobi_matrix(LevelChain::cusp_example(depth));
    AcIntervalReport r;
    r.depth = depth;
    r.values = tridiagonal_eigenvalues(t.diag, t.off);
    r.band_low = kSqrtE + kInvSqrtE - 2.0;
    r.band_high = kSqrtE + kInvSqrtE + 2.0;
    r.widen = widen;
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < r.values.size(); ++i) {
        if (r.values(i) >= r.band_low - widen && r.values(i) <= r.band_high + widen) ++inside;
    }
    r.fraction_inside = static_cast<double>(inside) / static_cast<double>(r.values.size());
    const double b = r.values(0);
    r.bottom_sign = std::abs(b) < 1e-10 ? 0 : (b < 0 ? -1 : 1);
    return r;
}

// ------------------------------------------------------------------- F(alpha)

double F_alpha(std::span<const double> fiber_values, std::span<const double> fiber_degrees, double alpha) {
    if (fiber_values.empty() || fiber_values.size() != fiber_degrees.size()) {
        throw Error(ErrorKind::DimensionMismatch, "one degree per fiber vertex is needed");
    }
    std::vector<double> d(fiber_degrees.begin(), fiber_degrees.end());
    if (!is_constant(d)) throw Error(ErrorKind::NonregularFiber, "deg_G2 is not constant");
    double sum = 0.0;
    for (double li : fiber_values) {
        if (li < kFiberKernelThreshold) throw Error(ErrorKind::ZeroFiberEigenvalue, "fiber Laplacian has a kernel");
        sum += std::exp(alpha * std::log(d[0] / li));
    }
    return sum / static_cast<double>(fiber_values.size());
}

double F_alpha(const CuspProduct& c, double alpha) {
    std::vector<double> v(c.fiber.values.data(), c.fiber.values.data() + c.fiber.values.size());
    return F_alpha(v, degrees(c.product.fiber), alpha);
}

double solve_alpha(std::span<const double> fiber_values, std::span<const double> fiber_degrees, double a,
                   const AlphaSearch& search) {
    if (!(a >= 1.0)) throw Error(ErrorKind::BadParameters, "target a must be >= 1");
    if (search.grid < 2 || !(search.alpha_min > 0.0) || !(search.alpha_max > search.alpha_min)) {
        throw Error(ErrorKind::BadParameters, "alpha search grid");
    }
    auto g = [&](double alpha) { return F_alpha(fiber_values, fiber_degrees, alpha) - a; };
    auto bisect = [&](double lo, double hi, double glo) {
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if (gm == 0.0) return mid;
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    // F(0) = 1, so for a > 1 a root below the first grid point is bracketed by [0, alpha_min]
    double prev_alpha = search.alpha_min;
    double prev = g(prev_alpha);
    if (prev == 0.0) return prev_alpha;
    if (a > 1.0 && prev > 0.0) return bisect(0.0, prev_alpha, 1.0 - a);
    const double ratio = std::log(search.alpha_max / search.alpha_min) / static_cast<double>(search.grid - 1);
    for (std::size_t k = 1; k < search.grid; ++k) {
        const double alpha = k + 1 == search.grid ? search.alpha_max
                                                  : search.alpha_min * std::exp(ratio * static_cast<double>(k));
        const double cur = g(alpha);
        if (cur == 0.0) return alpha;
        if ((cur < 0.0) != (prev < 0.0)) return bisect(prev_alpha, alpha, prev);
        prev_alpha = alpha;
        prev = cur;
    }
    std::ostringstream os;
    os << "F(alpha) = " << a << " has no sign change on (0, " << search.alpha_max << "]";
    throw Error(ErrorKind::NoBracket, os.str());
}

// --------------------------------------------------------- weights for f

ReweightedBase build_weights_for_f(const WeightedGraph& g1, const TargetFunction& target,
                                   std::vector<VertexId> enumeration) {
    if (!target.f) throw Error(ErrorKind::BadTargetFunction, "no target function");
    const std::size_t n = g1.vertex_count();
    if (enumeration.empty()) enumeration = g1.ids();
    if (enumeration.size() != n) throw Error(ErrorKind::BadParameters, "enumeration must list every vertex once");
    std::vector<std::size_t> phi(n);
    std::vector<char> seen(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        phi[k] = g1.index_of(enumeration[k]);
        if (seen[phi[k]]) throw Error(ErrorKind::BadParameters, "enumeration repeats " + enumeration[k]);
        seen[phi[k]] = 1;
    }
    const double f1 = target.f(1.0);
    if (!std::isfinite(f1) || std::abs(f1 - 1.0) > 1e-12) {
        throw Error(ErrorKind::BadTargetFunction, "f(1) must be 1");
    }
    auto invert = [&](double level) {
        if (target.inverse) {
            const double t = target.inverse(level);
            const double back = target.f(t);
            if (!std::isfinite(t) || t < 1.0 || std::abs(back - level) > 1e-9 * level) {
                throw Error(ErrorKind::BadTargetFunction, "inverse is inconsistent with f at " + std::to_string(level));
            }
            return t;
        }
        double lo = 1.0;
        double hi = 2.0;
        while (!(target.f(hi) >= level)) {
            if (!std::isfinite(target.f(hi)) || hi > 1e300) {
                throw Error(ErrorKind::BadTargetFunction, "f does not reach " + std::to_string(level));
            }
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (target.f(mid) >= level ? hi : lo) = mid;
        }
        return hi;
    };
    ReweightedBase out{g1, std::vector<double>(n), {}, degrees(g1), {}, false};
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = invert(static_cast<double>(k + 1));
        if (k > 0 && !(t > prev)) throw Error(ErrorKind::BadTargetFunction, "f is not strictly increasing");
        prev = t;
        out.measure[phi[k]] = 1.0 / t;
    }
    std::vector<Edge> edges;
    for (const Edge& e : g1.edges()) {
        const double w = e.weight * std::min(out.measure[e.u], out.measure[e.v]) /
                         std::max(g1.measure(e.u), g1.measure(e.v));
        if (!(w > 0.0)) throw Error(ErrorKind::BadTargetFunction, "reweighted edge underflows to zero");
        out.edge_weight.push_back(w);
        edges.push_back(Edge{e.u, e.v, w});
    }
    out.graph = WeightedGraph::build_indexed(g1.ids(), out.measure, std::move(edges));
    out.degree_after = degrees(out.graph);
    out.degree_dominated = true;
    for (std::size_t x = 0; x < n; ++x) {
        out.degree_dominated = out.degree_dominated && out.degree_after[x] <= out.degree_before[x] * (1.0 + 1e-12);
    }
    return out;
}

std::size_t inverse_measure_count(std::span<const double> measure, double lambda) {
    return static_cast<std::size_t>(
        std::count_if(measure.begin(), measure.end(), [lambda](double m) { return 1.0 / m <= lambda + kCountingTolerance; }));
}

// ---------------------------------------------------------------- dynamics

SectorOperator sector_operator(const CuspProduct& c, Sector sector) {
    if (sector == Sector::Full) {
        SectorOperator s{assemble_laplacian(c.product.graph, c.product.theta), {}};
        for (std::size_t v = 0; v < c.product.graph.vertex_count(); ++v) s.level.push_back(c.product.level_of(v));
        return s;
    }
    SectorSplit split = le_he_split(c);
    const std::size_t modes = sector == Sector::Low ? split.low_modes.size() : split.high_modes.size();
    if (modes == 0) throw Error(ErrorKind::BadParameters, "the requested sector is empty");
    SectorOperator s{sector == Sector::Low ? std::move(split.low) : std::move(split.high), {}};
    for (std::size_t k = 0; k < s.op.dim(); ++k) s.level.push_back(sector_level(k, modes));
    return s;
}

SectorOperator chain_sector_operator(const LevelChain& chain) {
    SectorOperator s{HermitianOperator::flat(chain_jacobi_matrix(chain).dense()), {}};
    for (std::size_t j = 0; j < chain.size(); ++j) s.level.push_back(j);
    return s;
}

std::vector<std::size_t> indices_in_levels(const SectorOperator& s, std::size_t first, std::size_t last) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.level.size(); ++k) {
        if (s.level[k] >= first && s.level[k] <= last) out.push_back(k);
    }
    return out;
}

OccupationTrace dynamics_experiment(const SectorOperator& s, const Eigen::VectorXcd& initial,
                                    std::span<const std::size_t> region, double horizon, std::size_t steps) {
    if (static_cast<std::size_t>(initial.size()) != s.op.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "initial vector does not live on the sector");
    }
    return occupation_trace(eigensolve(s.op), initial, region, horizon, steps);
}

// ------------------------------------------------------------- parallelism

std::size_t worker_count() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CUSPEC_THREADS")) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc() && v > 0) return std::min(v, hw);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace cuspec
