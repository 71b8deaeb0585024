#ifndef CUSPEC_OPERATORS_HPP
#define CUSPEC_OPERATORS_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cuspec/graph.hpp"
#include "cuspec/magnetic.hpp"

namespace cuspec {

using Complex = std::complex<double>;

/// Dense operator on l^2(V, m), self-adjoint for <f, g> = sum_x m(x) conj(f(x)) g(x).
/// Equivalently M^{1/2} H M^{-1/2} is Hermitian in the flat inner product.
class HermitianOperator {
public:
    HermitianOperator(Eigen::MatrixXcd matrix, Eigen::VectorXd weight);
    /// Operator on a space with unit weights.
    static HermitianOperator flat(Eigen::MatrixXcd matrix);
    static HermitianOperator diagonal(const Eigen::VectorXd& values, Eigen::VectorXd weight);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    const Eigen::VectorXd& weight() const noexcept { return weight_; }

    /// M^{1/2} H M^{-1/2}.
    Eigen::MatrixXcd conjugated() const;
    /// Largest entrywise relative deviation of `conjugated()` from Hermitian.
    double hermitian_defect() const;

    HermitianOperator shifted(double c) const;

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
    friend HermitianOperator operator*(double s, const HermitianOperator& a);

private:
    Eigen::MatrixXcd matrix_;
    Eigen::VectorXd weight_;
};

/// Ascending eigenvalues; columns of `vectors` are orthonormal in the
/// m-inner product given by `weight`.
struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd weight;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

enum class EigenMethod {
    /// Jacobi for strongly graded matrices, Householder + implicit QR otherwise
    Auto,
    Householder,
    Jacobi,
};

HermitianOperator assemble_laplacian(const WeightedGraph& g, const MagneticPotential& theta);
HermitianOperator assemble_degree(const WeightedGraph& g);

/// Q(f) = (1/2) sum_{x,y} E(x,y) |f(x) - e^{i theta_xy} f(y)|^2.
double quadratic_form(const WeightedGraph& g, const MagneticPotential& theta, const Eigen::VectorXcd& f);

Complex inner(const Eigen::VectorXd& weight, const Eigen::VectorXcd& f, const Eigen::VectorXcd& h);
double norm_squared(const Eigen::VectorXd& weight, const Eigen::VectorXcd& f);
/// delta~_x = m(x)^{-1/2} delta_x, the unit-norm point mass.
Eigen::VectorXcd normalized_point_mass(const Eigen::VectorXd& weight, std::size_t x);

Spectrum eigensolve(const HermitianOperator& h, EigenMethod method = EigenMethod::Auto);
/// Eigenvalues only; same method selection as `eigensolve`.
Eigen::VectorXd eigenvalues(const HermitianOperator& h, EigenMethod method = EigenMethod::Auto);

/// Cyclic complex Jacobi on a Hermitian matrix. Uses the scaled off-diagonal
/// test |a_pq| <= eps sqrt(|a_pp a_qq|), which keeps relative accuracy on
/// graded positive definite matrices. Returns ascending eigenvalues and the
/// unitary eigenvector matrix.
std::pair<Eigen::VectorXd, Eigen::MatrixXcd> jacobi_eigen(Eigen::MatrixXcd a, bool want_vectors = true);

/// Eigenvalues of the real symmetric tridiagonal matrix (diag, off).
Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& off);

/// N_lambda = #{n : lambda_n <= lambda + 1e-12}.
std::size_t counting_function(const Spectrum& spec, double lambda);
std::size_t counting_function(const Eigen::VectorXd& ascending_values, double lambda);
inline constexpr double kCountingTolerance = 1e-12;

struct FormComparison {
    bool holds = false;
    /// smallest eigenvalue of the (rounding-adjusted) flat conjugate of B - A
    double witness = 0.0;
    /// the same without the rounding allowance
    double raw_witness = 0.0;
};

/// A <= B in the form sense: B - A positive semidefinite, up to `tol`.
/// Entrywise rounding in assembling A and B is absorbed by adding
/// 8 eps (|A_ii| + |B_ii|) to the diagonal of B - A before the test, which is
/// negligible on O(1) rows and keeps rows scaled by e^x from reporting pure
/// rounding noise as a violation.
FormComparison form_leq(const HermitianOperator& a, const HermitianOperator& b, double tol);

/// e^{itH} v through the eigenbasis.
Eigen::VectorXcd propagator_apply(const Spectrum& spec, double t, const Eigen::VectorXcd& v);

struct OccupationTrace {
    std::vector<double> time;
    std::vector<double> occupation;   // ||1_X e^{itH} v||^2
    std::vector<double> running_mean; // (1/t) int_0^t occupation, trapezoidal; first entry = occupation(0)
};

OccupationTrace occupation_trace(const Spectrum& spec, const Eigen::VectorXcd& v, std::span<const std::size_t> region,
                                 double horizon, std::size_t steps);
/// (1/T) int_0^T ||1_X e^{itH} v||^2 dt by the trapezoidal rule on `steps` intervals.
double time_averaged_occupation(const Spectrum& spec, const Eigen::VectorXcd& v, std::span<const std::size_t> region,
                                double horizon, std::size_t steps);

Eigen::MatrixXcd kronecker(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace cuspec

#endif
