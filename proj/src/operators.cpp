#include "cuspec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cuspec/error.hpp"

namespace cuspec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kGradingRatio = 1e6;
constexpr std::size_t kJacobiMaxDim = 2000;

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& s) { return 0.5 * (s + s.adjoint()); }

bool is_graded(const Eigen::MatrixXcd& s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        double d = std::abs(s(i, i));
        if (d == 0.0) continue;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi > 0.0 && hi / lo > kGradingRatio;
}

EigenMethod resolve(EigenMethod method, const Eigen::MatrixXcd& s) {
    if (method != EigenMethod::Auto) return method;
    if (static_cast<std::size_t>(s.rows()) <= kJacobiMaxDim && is_graded(s)) return EigenMethod::Jacobi;
    return EigenMethod::Householder;
}

Eigen::MatrixXcd checked_flat(const HermitianOperator& h) {
    if (h.hermitian_defect() > 1e-12) {
        throw Error(ErrorKind::NonHermitian, "relative defect " + std::to_string(h.hermitian_defect()));
    }
    return hermitian_part(h.conjugated());
}

}  // namespace

HermitianOperator::HermitianOperator(Eigen::MatrixXcd matrix, Eigen::VectorXd weight)
    : matrix_(std::move(matrix)), weight_(std::move(weight)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != weight_.size()) {
        throw Error(ErrorKind::DimensionMismatch, "operator matrix and weight sizes differ");
    }
    for (Eigen::Index i = 0; i < weight_.size(); ++i) {
        if (!(weight_(i) > 0.0)) throw Error(ErrorKind::NonpositiveMeasure, "inner-product weight must be positive");
    }
}

HermitianOperator HermitianOperator::flat(Eigen::MatrixXcd matrix) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(matrix.rows());
    return HermitianOperator(std::move(matrix), std::move(w));
}

HermitianOperator HermitianOperator::diagonal(const Eigen::VectorXd& values, Eigen::VectorXd weight) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(values.size(), values.size());
    m.diagonal() = values.cast<Complex>();
    return HermitianOperator(std::move(m), std::move(weight));
}

Eigen::MatrixXcd HermitianOperator::conjugated() const {
    Eigen::VectorXd s = weight_.cwiseSqrt();
    Eigen::VectorXd si = s.cwiseInverse();
    return s.asDiagonal() * matrix_ * si.asDiagonal();
}

double HermitianOperator::hermitian_defect() const {
    Eigen::MatrixXcd s = conjugated();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            double scale = std::max(std::abs(s(i, j)), std::abs(s(j, i)));
            if (scale == 0.0) continue;
            worst = std::max(worst, std::abs(s(i, j) - std::conj(s(j, i))) / scale);
        }
    }
    return worst;
}

HermitianOperator HermitianOperator::shifted(double c) const {
    Eigen::MatrixXcd m = matrix_;
    m.diagonal().array() += c;
    return HermitianOperator(std::move(m), weight_);
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "operator sum");
    if ((a.weight_ - b.weight_).cwiseAbs().maxCoeff() > 1e-14 * a.weight_.cwiseAbs().maxCoeff()) {
        throw Error(ErrorKind::DimensionMismatch, "operators live on different inner products");
    }
    return HermitianOperator(a.matrix_ + b.matrix_, a.weight_);
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) { return a + (-1.0) * b; }

HermitianOperator operator*(double s, const HermitianOperator& a) { return HermitianOperator(s * a.matrix_, a.weight_); }

HermitianOperator assemble_laplacian(const WeightedGraph& g, const MagneticPotential& theta) {
    if (!theta.fits(g)) {
        throw Error(ErrorKind::PotentialGraphMismatch, "potential has " + std::to_string(theta.edge_count()) +
                                                           " edges, graph has " + std::to_string(g.edge_count()));
    }
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXd w(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        w(x) = g.measure(static_cast<std::size_t>(x));
        h(x, x) = degree(g, static_cast<std::size_t>(x));
    }
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        const double phase = theta.on_edge(k).radians();
        const Complex twist = std::polar(1.0, phase);
        const auto u = static_cast<Eigen::Index>(e.u);
        const auto v = static_cast<Eigen::Index>(e.v);
        h(u, v) = -e.weight * twist / w(u);
        h(v, u) = -e.weight * std::conj(twist) / w(v);
    }
    return HermitianOperator(std::move(h), std::move(w));
}

HermitianOperator assemble_degree(const WeightedGraph& g) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(g.vertex_count()));
    Eigen::VectorXd w(d.size());
    for (Eigen::Index x = 0; x < d.size(); ++x) {
        d(x) = degree(g, static_cast<std::size_t>(x));
        w(x) = g.measure(static_cast<std::size_t>(x));
    }
    return HermitianOperator::diagonal(d, std::move(w));
}

double quadratic_form(const WeightedGraph& g, const MagneticPotential& theta, const Eigen::VectorXcd& f) {
    if (!theta.fits(g)) throw Error(ErrorKind::PotentialGraphMismatch, "quadratic form");
    if (static_cast<std::size_t>(f.size()) != g.vertex_count()) throw Error(ErrorKind::DimensionMismatch, "f");
    // each unordered pair appears twice in the symmetric double sum
    double q = 0.0;
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge(k);
        Complex d = f(static_cast<Eigen::Index>(e.u)) -
                    std::polar(1.0, theta.on_edge(k).radians()) * f(static_cast<Eigen::Index>(e.v));
        q += e.weight * std::norm(d);
    }
    return q;
}

Complex inner(const Eigen::VectorXd& weight, const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) {
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += weight(i) * std::conj(f(i)) * h(i);
    return s;
}

double norm_squared(const Eigen::VectorXd& weight, const Eigen::VectorXcd& f) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += weight(i) * std::norm(f(i));
    return s;
}

Eigen::VectorXcd normalized_point_mass(const Eigen::VectorXd& weight, std::size_t x) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(weight.size());
    v(static_cast<Eigen::Index>(x)) = 1.0 / std::sqrt(weight(static_cast<Eigen::Index>(x)));
    return v;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXcd> jacobi_eigen(Eigen::MatrixXcd a, bool want_vectors) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd v;
    if (want_vectors) v = Eigen::MatrixXcd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = a(i, i).real();

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                if (r == 0.0 || r <= kEps * std::sqrt(std::abs(app * aqq)) || r < 1e-300) continue;
                rotated = true;
                const Complex phase = apq / r;  // e^{i phi}
                const double tau = (aqq - app) / (2.0 * r);
                double t;
                if (std::abs(tau) > 1e150) {
                    t = r / (aqq - app);
                } else {
                    t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex sq = s * std::conj(phase);  // s e^{-i phi}
                const Complex cq = c * std::conj(phase);  // c e^{-i phi}
                for (Eigen::Index k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    const Complex np = c * akp - sq * akq;
                    const Complex nq = s * akp + cq * akq;
                    a(k, p) = np;
                    a(k, q) = nq;
                    a(p, k) = std::conj(np);
                    a(q, k) = std::conj(nq);
                }
                a(p, p) = app - t * r;
                a(q, q) = aqq + t * r;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (want_vectors) {
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const Complex vkp = v(k, p);
                        const Complex vkq = v(k, q);
                        v(k, p) = c * vkp - sq * vkq;
                        v(k, q) = s * vkp + cq * vkq;
                    }
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
    Eigen::VectorXd values(n);
    Eigen::MatrixXcd vectors;
    if (want_vectors) vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
        if (want_vectors) vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return {values, vectors};
}

Spectrum eigensolve(const HermitianOperator& h, EigenMethod method) {
    Eigen::MatrixXcd s = checked_flat(h);
    Spectrum spec;
    spec.weight = h.weight();
    Eigen::MatrixXcd z;
    if (resolve(method, s) == EigenMethod::Jacobi) {
        auto [values, vectors] = jacobi_eigen(std::move(s), true);
        spec.values = std::move(values);
        z = std::move(vectors);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s);
        if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonHermitian, "eigensolver did not converge");
        spec.values = solver.eigenvalues();
        z = solver.eigenvectors();
    }
    spec.vectors = h.weight().cwiseSqrt().cwiseInverse().asDiagonal() * z;
    return spec;
}

Eigen::VectorXd eigenvalues(const HermitianOperator& h, EigenMethod method) {
    Eigen::MatrixXcd s = checked_flat(h);
    if (resolve(method, s) == EigenMethod::Jacobi) return jacobi_eigen(std::move(s), false).first;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonHermitian, "eigensolver did not converge");
    return solver.eigenvalues();
}

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
    if (off.size() + 1 != diag.size()) throw Error(ErrorKind::DimensionMismatch, "tridiagonal sizes");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonHermitian, "tridiagonal QR did not converge");
    return solver.eigenvalues();
}

std::size_t counting_function(const Eigen::VectorXd& ascending_values, double lambda) {
    const double* begin = ascending_values.data();
    const double* end = begin + ascending_values.size();
    return static_cast<std::size_t>(std::upper_bound(begin, end, lambda + kCountingTolerance) - begin);
}

std::size_t counting_function(const Spectrum& spec, double lambda) { return counting_function(spec.values, lambda); }

FormComparison form_leq(const HermitianOperator& a, const HermitianOperator& b, double tol) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "form comparison of different sizes");
    if ((a.weight() - b.weight()).cwiseAbs().maxCoeff() > 1e-14 * a.weight().cwiseAbs().maxCoeff()) {
        throw Error(ErrorKind::DimensionMismatch, "form comparison across different inner products");
    }
    Eigen::MatrixXcd fa = checked_flat(a);
    Eigen::MatrixXcd fb = checked_flat(b);
    Eigen::MatrixXcd diff = fb - fa;
    Eigen::VectorXd allowance = 8.0 * kEps * (fa.diagonal().cwiseAbs() + fb.diagonal().cwiseAbs());

    FormComparison out;
    Eigen::MatrixXcd adjusted = diff;
    adjusted.diagonal() += allowance.cast<Complex>();
    // grade by the operands as well: B - A may look flat after cancellation
    const bool jacobi = static_cast<std::size_t>(diff.rows()) <= kJacobiMaxDim &&
                        (is_graded(fa) || is_graded(fb) || is_graded(diff));
    auto smallest = [jacobi](const Eigen::MatrixXcd& m) {
        if (jacobi) return jacobi_eigen(m, false).first(0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(0);
    };
    out.witness = smallest(adjusted);
    out.raw_witness = smallest(diff);
    out.holds = out.witness >= -tol;
    return out;
}

Eigen::VectorXcd propagator_apply(const Spectrum& spec, double t, const Eigen::VectorXcd& v) {
    if (v.size() != spec.vectors.rows()) throw Error(ErrorKind::DimensionMismatch, "propagator vector");
    // coefficients <phi_k, v>_m
    Eigen::VectorXcd coeff = spec.vectors.adjoint() * (spec.weight.cast<Complex>().asDiagonal() * v);
    for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, t * spec.values(k));
    return spec.vectors * coeff;
}

OccupationTrace occupation_trace(const Spectrum& spec, const Eigen::VectorXcd& v, std::span<const std::size_t> region,
                                 double horizon, std::size_t steps) {
    if (steps == 0) throw Error(ErrorKind::BadParameters, "occupation trace needs at least one step");
    Eigen::VectorXcd coeff = spec.vectors.adjoint() * (spec.weight.cast<Complex>().asDiagonal() * v);
    // restrict eigenvectors to the region once
    Eigen::MatrixXcd rows(static_cast<Eigen::Index>(region.size()), spec.vectors.cols());
    Eigen::VectorXd w(static_cast<Eigen::Index>(region.size()));
    for (std::size_t i = 0; i < region.size(); ++i) {
        rows.row(static_cast<Eigen::Index>(i)) = spec.vectors.row(static_cast<Eigen::Index>(region[i]));
        w(static_cast<Eigen::Index>(i)) = spec.weight(static_cast<Eigen::Index>(region[i]));
    }
    OccupationTrace tr;
    tr.time.reserve(steps + 1);
    double integral = 0.0;
    Eigen::VectorXcd c(coeff.size());
    for (std::size_t s = 0; s <= steps; ++s) {
        const double t = horizon * static_cast<double>(s) / static_cast<double>(steps);
        for (Eigen::Index k = 0; k < coeff.size(); ++k) c(k) = coeff(k) * std::polar(1.0, t * spec.values(k));
        Eigen::VectorXcd f = rows * c;
        double occ = 0.0;
        for (Eigen::Index i = 0; i < f.size(); ++i) occ += w(i) * std::norm(f(i));
        if (s > 0) integral += 0.5 * (occ + tr.occupation.back()) * (t - tr.time.back());
        tr.time.push_back(t);
        tr.occupation.push_back(occ);
        tr.running_mean.push_back(s == 0 ? occ : integral / t);
    }
    return tr;
}

double time_averaged_occupation(const Spectrum& spec, const Eigen::VectorXcd& v, std::span<const std::size_t> region,
                                double horizon, std::size_t steps) {
    OccupationTrace tr = occupation_trace(spec, v, region, horizon, steps);
    return tr.running_mean.back();
}

Eigen::MatrixXcd kronecker(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

}  // namespace cuspec
