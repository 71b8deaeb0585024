#ifndef CUSPEC_CUSP_HPP
#define CUSPEC_CUSP_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cuspec/operators.hpp"
#include "cuspec/products.hpp"

namespace cuspec {

/// Fiber eigenvalues below this count as kernel (low-energy) directions.
inline constexpr double kFiberKernelThreshold = 1e-8;

/// A product through I together with the fiber data the cusp analysis needs.
struct CuspProduct {
    ProductGraph product;
    /// sup_x deg_{G1}(x) * max_y 1/m2(y), over the truncation
    double M = 0.0;
    Spectrum fiber;
    /// m2-orthogonal projections on l^2(V2, m2) onto ker Delta_{G2,theta2} and its complement
    Eigen::MatrixXcd p_low;
    Eigen::MatrixXcd p_high;
    std::vector<std::size_t> low_modes;
    std::vector<std::size_t> high_modes;

    bool fiber_holonomy_trivial() const noexcept { return !low_modes.empty(); }
    std::size_t levels() const noexcept { return product.base.vertex_count(); }
};

/// Throws NotThroughIProduct for Cartesian products.
CuspProduct make_cusp(ProductGraph product);

// ---------------------------------------------------------------- hypotheses

struct CuspHypothesisReport {
    std::vector<std::size_t> depths;
    bool h1 = false;  // m1 strictly decreasing along the base order and eventually below epsilon
    bool h2 = false;  // finite fiber
    bool h3 = false;  // sup deg_{G1} <= declared bound at each depth
    bool measure_decreasing = false;
    double sup_base_degree = 0.0;
    double min_base_measure = 0.0;
    std::size_t fiber_size = 0;
    std::string detail;
    bool holds() const noexcept { return h1 && h2 && h3; }
};

/// Single truncation.
CuspHypothesisReport check_discrete_cusp(const ProductGraph& product, double degree_bound, double epsilon = 1e-6);
/// Family of truncations; depths may be checked concurrently (CUSPEC_THREADS).
CuspHypothesisReport check_discrete_cusp(const std::function<ProductGraph(std::size_t)>& truncation,
                                         std::span<const std::size_t> depths, double degree_bound,
                                         double epsilon = 1e-6);

// ------------------------------------------------------------------ model

/// (1/m1) (x) Delta_{G2,theta2} on l^2(V, m1 m2).
HermitianOperator model_operator(const CuspProduct& cusp);
/// (1/m1) (x) deg_{G2}.
HermitianOperator model_degree(const CuspProduct& cusp);
/// Eigenvalues lambda_i / m1(x), ascending, eigenvectors delta_x (x) g_i.
Spectrum model_operator_spectrum(const CuspProduct& cusp);

// --------------------------------------------------------------- keystone

struct TwoSidedCheck {
    std::string name;
    FormComparison lower;
    FormComparison upper;
    bool holds() const noexcept { return lower.holds && upper.holds; }
};

struct KeystoneReport {
    double M = 0.0;
    /// inf sigma(Delta_{G2,theta2}) / max deg_{G2}
    double c = 0.0;
    /// c = 0: the lower bound in `form_degree` is the trivial 0 <= Delta
    bool c_degenerate = false;
    TwoSidedCheck degree;        // model degree <= deg_G <= model degree + M
    TwoSidedCheck laplacian;     // model <= Delta_G <= model + 2M
    TwoSidedCheck form_degree;   // c (deg_G - M) <= Delta_G <= 2M + 2 deg_G
    bool holds() const noexcept { return degree.holds() && laplacian.holds() && form_degree.holds(); }
};

KeystoneReport verify_keystone(const CuspProduct& cusp, double tol = 1e-9);

// ----------------------------------------------------------- asymptotics

struct EigenPairRow {
    std::size_t n = 0;  // 1-based
    double model = 0.0;
    double full = 0.0;
    double ratio = 0.0;
    bool sandwich_ok = false;
};

struct CountingRow {
    double lambda = 0.0;
    std::size_t model_shifted = 0;  // N_{lambda - 2M}(model)
    std::size_t full = 0;           // N_lambda(Delta_G)
    std::size_t model = 0;          // N_lambda(model)
    bool sandwich_ok = false;
};

struct AsymptoticsReport {
    double M = 0.0;
    std::vector<EigenPairRow> eigen;
    std::vector<CountingRow> counting;
    bool sandwich_all = false;
    bool counting_all = false;
    /// range of full / model over n >= ratio_from
    std::size_t ratio_from = 0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};

/// Sandwich tolerance at model eigenvalue v: the doubles carrying a value near
/// e^60 are 1e-5 apart, so an absolute 1e-9 alone is below resolution there.
inline double sandwich_tolerance(double model_value) { return 1e-9 + 1e-12 * std::abs(model_value); }

/// Lambda grid e^k, k = first..last.
std::vector<double> exponential_grid(int first, int last);

/// Throws TrivialFiberHolonomy when the fiber Laplacian has a kernel.
AsymptoticsReport eigen_ratio_series(const CuspProduct& cusp, std::span<const double> lambda_grid,
                                     std::size_t ratio_from = 30);

/// Counting sandwich only; the min-max argument does not need Hol != 0.
std::vector<CountingRow> counting_sandwich(const CuspProduct& cusp, std::span<const double> lambda_grid);

/// Closed-form N_lambda(model) for m1(x) = e^{-x}, x = 0..depth:
/// sum_i min(depth + 1, floor(ln(lambda / lambda_i)) + 1)_+ over lambda_i > 0,
/// plus (depth + 1) for each zero fiber eigenvalue.
std::size_t geometric_model_count(std::span<const double> fiber_values, std::size_t depth, double lambda);

struct CompactResolventDiagnostic {
    bool fiber_holonomy_nonzero = false;
    /// multiplicity of 0 in the model spectrum (eigenvalues below threshold)
    std::size_t model_zero_multiplicity = 0;
    /// lowest model eigenvalue on levels >= k, k = 0..depth
    std::vector<double> tail_bottom;
    bool tail_diverges = false;
};

CompactResolventDiagnostic compact_resolvent_diagnostic(const CuspProduct& cusp);

/// Finite form of the form-domain dichotomy: uses the witness
/// f_x = delta~_x (x) g_1 at every level x.
struct FormDomainProbe {
    double c1 = 0.0;
    bool fiber_holonomy_nonzero = false;
    /// c1 <f_x, deg_G f_x> - <f_x, Delta f_x>: the least c2 allowed at level x
    std::vector<double> required_c2;
    /// c1 (deg_G - M) <= Delta_G as a PSD test (the bound with c2 = c1 M)
    FormComparison uniform_bound;
};

FormDomainProbe form_domain_probe(const CuspProduct& cusp, double c1, double tol = 1e-9);

// ---------------------------------------------------------- le/he splitting

/// Delta_G in the flat basis e_x (x) g^_i, i.e. after the unitaries
/// M^{1/2} and 1 (x) (fiber eigenbasis). Low block indices are x * r + k for
/// the k-th kernel mode, high block x * (|V2| - r) + k.
struct SectorSplit {
    HermitianOperator low;
    HermitianOperator high;
    std::size_t levels = 0;
    std::vector<std::size_t> low_modes;
    std::vector<std::size_t> high_modes;
    /// max |R_ab - B_ab| / sqrt(s_x s_x') between the rotated Delta_G and the
    /// block-diagonal assembly, s_x = max(1, max entry of the level-x block of
    /// the flat Delta_G). A rotated entry is a sum of products of level-block
    /// entries, so its rounding is relative to s_x and not to its own size:
    /// the kernel-mode diagonal is O(1) but comes out of e^x cancellation.
    double reconstruction_defect = 0.0;
    /// flat unitary whose columns are the low then high basis vectors
    Eigen::MatrixXcd basis;
};

/// Requires I = V2 and constant m2, else NotSplittable.
SectorSplit le_he_split(const CuspProduct& cusp);

/// Level index of a sector basis vector.
inline std::size_t sector_level(std::size_t index, std::size_t modes) { return index / modes; }

// --------------------------------------------------------- Jacobi reduction

struct JacobiReport {
    Tridiagonal matrix;
    double interior_expected = 0.0;     // e^{1/2} + e^{-1/2}
    double max_offdiag_defect = 0.0;    // max |off + 1|
    double max_interior_defect = 0.0;   // max |diag - expected| over 0 < j < N
    double site0_measured = 0.0;
    /// value obtained from the displayed form Delta_N + (e^{-1/2} - 1) delta_0 + e^{1/2} + e^{-1/2} - 2
    double site0_displayed = 0.0;
    double last_site = 0.0;
    bool site0_discrepancy = false;
    std::string note;
    bool matches(double tol = 1e-12) const noexcept {
        return max_offdiag_defect <= tol && max_interior_defect <= tol;
    }
};

/// Throws WrongWeights unless the chain carries m(j) = e^{-j},
/// E(j, j+1) = e^{-(2j+1)/2}.
JacobiReport jacobi_reduction(const LevelChain& chain);
/// Same on the base of a cusp; requires a low-energy sector (BadParameters).
JacobiReport jacobi_reduction(const CuspProduct& cusp);

/// Spectral summary of the truncated low-energy block at a given depth.
struct AcIntervalReport {
    std::size_t depth = 0;
    Eigen::VectorXd values;
    double band_low = 0.0;   // e^{1/2} + e^{-1/2} - 2
    double band_high = 0.0;  // e^{1/2} + e^{-1/2} + 2
    double fraction_inside = 0.0;  // inside [band_low - widen, band_high + widen]
    double widen = 0.0;
    /// sign of the lowest eigenvalue: -1, 0 (|v| < 1e-10) or +1
    int bottom_sign = 0;
};

AcIntervalReport ac_interval(std::size_t depth, double widen = 0.01);

// ------------------------------------------------------------------- F(alpha)

/// (1/|V2|) sum_i (deg_{G2} / lambda_i)^alpha. Throws ZeroFiberEigenvalue,
/// NonregularFiber.
double F_alpha(std::span<const double> fiber_values, std::span<const double> fiber_degrees, double alpha);
double F_alpha(const CuspProduct& cusp, double alpha);

struct AlphaSearch {
    double alpha_max = 64.0;
    std::size_t grid = 4000;
    double alpha_min = 1e-6;
};

/// Smallest alpha in (0, alpha_max] with F(alpha) = a, found by a log-grid
/// scan followed by bisection. F >= 1 by AM-GM, with F -> 1 only as alpha -> 0,
/// so a = 1 has no bracket on a generic fiber (NoBracket).
double solve_alpha(std::span<const double> fiber_values, std::span<const double> fiber_degrees, double a,
                   const AlphaSearch& search = {});

// --------------------------------------------------------- weights for f

struct TargetFunction {
    std::function<double(double)> f;
    /// f^{-1}; found by bisection when absent
    std::function<double(double)> inverse;
};

struct ReweightedBase {
    WeightedGraph graph;
    std::vector<double> measure;         // m~1 in vertex order
    std::vector<double> edge_weight;     // E~1 in edge order
    std::vector<double> degree_before;
    std::vector<double> degree_after;
    bool degree_dominated = false;       // deg~ <= deg pointwise (relative 1e-12)
};

/// m~1(phi(n)) = 1 / f^{-1}(n), E~1(x,y) = E1(x,y) min(m~1(x), m~1(y)) / max(m1(x), m1(y)).
/// `enumeration` lists phi(1), phi(2), ...; empty means vertex order.
/// Throws BadTargetFunction when f(1) != 1 or f fails to increase.
ReweightedBase build_weights_for_f(const WeightedGraph& g1, const TargetFunction& f,
                                   std::vector<VertexId> enumeration = {});

/// |{x : 1/m(x) <= lambda}|.
std::size_t inverse_measure_count(std::span<const double> measure, double lambda);

// ---------------------------------------------------------------- dynamics

enum class Sector { Low, High, Full };

/// The operator a dynamics run evolves under, with the level of each index.
struct SectorOperator {
    HermitianOperator op;
    std::vector<std::size_t> level;
};

SectorOperator sector_operator(const CuspProduct& cusp, Sector sector);
/// Low-energy block of a deep truncation, straight from the level chain (flat).
SectorOperator chain_sector_operator(const LevelChain& chain);

/// Indices of the sector whose level lies in [first, last].
std::vector<std::size_t> indices_in_levels(const SectorOperator& s, std::size_t first, std::size_t last);

OccupationTrace dynamics_experiment(const SectorOperator& s, const Eigen::VectorXcd& initial,
                                    std::span<const std::size_t> region, double horizon, std::size_t steps);

// ------------------------------------------------------------- parallelism

/// Worker count: CUSPEC_THREADS when set and positive, else hardware.
std::size_t worker_count();
/// Runs body(i) for i in [0, n) on up to worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cuspec

#endif
