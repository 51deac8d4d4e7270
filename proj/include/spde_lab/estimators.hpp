#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spde_lab/drift_operators.hpp"
#include "spde_lab/function_space.hpp"
#include "spde_lab/integrator.hpp"
#include "spde_lab/noise.hpp"

namespace spde_lab {

/// Bounded test functions on H with declared regularity constants.
///   ClippedHNorm:         F(u) = min(||u||_H, 1),          L(F) = 1
///   ModeSine(k):          F(u) = sin(<u, e_k>_H),          L(F) = ||e_k||_H
///   ClippedHNormPower(g): F(u) = min(||u||_H, 1)^g,        |F|_g <= 1
class TestFunctional {
public:
    enum class Kind { ClippedHNorm, ModeSine, ClippedHNormPower };

    static TestFunctional clipped_h_norm();
    static TestFunctional mode_sine(std::size_t k);
    static TestFunctional clipped_h_norm_power(double gamma);

    Kind kind() const noexcept { return kind_; }
    std::size_t mode() const noexcept { return mode_; }
    /// Hoelder exponent of the declared constant (1 for Lipschitz kinds).
    double exponent() const noexcept { return gamma_; }
    bool is_lipschitz() const noexcept { return kind_ != Kind::ClippedHNormPower; }
    std::string name() const;

    double evaluate(const Field& u, const SpacePair& sp) const;
    /// L(F) for Lipschitz kinds, |F|_gamma otherwise.
    double constant(const Grid1D& grid, const SpacePair& sp) const;

private:
    TestFunctional(Kind kind, std::size_t mode, double gamma)
        : kind_(kind), mode_(mode), gamma_(gamma) {}

    Kind kind_;
    std::size_t mode_;
    double gamma_;
};

/// ClippedHNorm, ModeSine(1), ModeSine(2).
std::vector<TestFunctional> default_functional_bank();

/// Checker outputs feeding the explicit bounds. Missing entries raise
/// ConfigError in the reports that need them.
struct EstimatorConstants {
    std::optional<double> delta_a2;
    std::optional<double> delta_a3;
    std::optional<double> k_a3;

    static EstimatorConstants from(const AssumptionReport& report);
};

/// Problem that all Monte-Carlo reports share. Path i draws its increments
/// from rng_substream(seed, i); aggregation is in ascending path order.
struct Experiment {
    DriftSpec spec;
    Grid1D grid;
    IntegratorConfig cfg;
    NoiseModel noise;
    std::uint64_t seed = 0;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean and standard error (n-1 normalization; se = 0 for n = 1).
MeanSe mean_se(const std::vector<double>& samples);

struct DecayRow {
    double t = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double rhs_bound = 0.0;
    /// Paths whose pathwise decay margin at t is below -tol_dt.
    std::size_t pathwise_violations = 0;
    bool pass = false;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    std::size_t n_paths = 0;
    /// Paths with a negative decay margin at some grid time (no tolerance).
    std::size_t raw_violations = 0;
    /// Most negative margin over paths and grid times, and the tolerance of
    /// the path it came from.
    double worst_margin = 0.0;
    double worst_tol = 0.0;
    bool mean_nonincreasing = true;
    bool all_pass = false;
};

/// Coupled Monte-Carlo estimate of E ||X_t(x0) - X_t(y0)||_H^{2 alpha/beta}
/// against
///   RHS(t) = (2 ||x0-y0||_H^2 / (delta2 t))^{alpha/beta}
///            (||x0||_H^2 + ||y0||_H^2 + 2t (K3 + ||B||_HS^2)) / (delta3 t).
/// Also counts pathwise decay-margin violations with
/// tol_dt = 0.05 dt (1 + max_t RHS_path(t)) over the grid times.
DecayReport decay_report(const Experiment& ex, const EstimatorConstants& constants,
                         const Field& x0, const Field& y0, const std::vector<double>& time_grid,
                         std::size_t n_paths);

/// The explicit bound alone.
double decay_rhs_bound(const DriftSpec& spec, double hs_norm_sq, const EstimatorConstants& c,
                       const Field& x0, const Field& y0, double t);

struct MomentRow {
    double t = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    std::size_t n_paths = 0;
    bool all_pass = false;
};

/// E(||X_t||_H^2 + delta3 I(t)) against ||x0||_H^2 + t (K3 + ||B||_HS^2)
/// + 0.05 dt t; pass iff mean - 2 se <= bound.
MomentReport moment_report(const Experiment& ex, const EstimatorConstants& constants,
                           const Field& x0, const std::vector<double>& time_grid,
                           std::size_t n_paths);

struct SemigroupRow {
    std::string functional;
    double t = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double shape = 0.0;
    /// estimate / shape (0 when both vanish).
    double ratio = 0.0;
};

struct SemigroupFit {
    std::string functional;
    double c_hat = 0.0;
    double c_hat_refined = 0.0;
    bool stable = false;
};

struct SemigroupReport {
    std::vector<SemigroupRow> rows;
    std::vector<SemigroupFit> fits;
    bool all_stable = false;
};

/// Geometric midpoints inserted between consecutive grid times.
std::vector<double> refine_time_grid(const std::vector<double>& time_grid);

/// Lipschitz shape L ||x-y|| t^{-1/2} (1 + ||x||/sqrt t + ||y||/sqrt t)^{beta/alpha}, or
/// the Hoelder shape |F|_g ||x-y||^g t^{-g/2} (...)^{beta g/alpha}.
double semigroup_shape(const DriftSpec& spec, const TestFunctional& f, double constant,
                       double norm_x, double norm_y, double norm_diff, double t);

/// |P_t F(x0) - P_t F(y0)| by coupled Monte Carlo on the time grid and on
/// its refinement. Throws ParameterError for Hoelder functionals with
/// gamma > alpha^2/(alpha+beta).
SemigroupReport semigroup_report(const Experiment& ex, const Field& x0, const Field& y0,
                                 const std::vector<TestFunctional>& functionals,
                                 const std::vector<double>& time_grid, std::size_t n_paths);

struct InvariantCheckpoint {
    double T = 0.0;
    /// Indexed [start][functional].
    std::vector<std::vector<double>> mu_f;
    std::vector<std::vector<double>> mu_f_se;
    /// I(T)/T per start, with batch-means standard error.
    std::vector<double> mu_v_alpha;
    std::vector<double> mu_v_alpha_se;
    /// max_F |mu_T(F; start_0) - mu_T(F; start_i)| over i >= 1.
    double discrepancy = 0.0;
};

struct InvariantReport {
    double T = 0.0;
    double bound = 0.0;
    std::vector<std::string> functionals;
    std::vector<InvariantCheckpoint> checkpoints;
    /// mu_T(||.||_V^alpha) <= 1.1 bound for the first start at horizon T.
    bool bound_pass = false;
};

struct InvariantOptions {
    double snapshot_stride = 0.1;
    /// Discrepancy horizons (those <= T are used; T itself is always added).
    std::vector<double> checkpoints{25.0, 50.0, 100.0, 200.0, 400.0};
    /// Start i uses substream i when true, substream 0 for all when false.
    bool independent_noise = true;
    std::size_t batches = 20;
};

/// Occupation averages of the functional bank along one long path per
/// start.
InvariantReport invariant_report(const Experiment& ex, const EstimatorConstants& constants,
                                 double T, const std::vector<Field>& starts,
                                 const std::vector<TestFunctional>& functionals,
                                 const InvariantOptions& options = {});

struct ErgodicRow {
    std::string functional;
    double t = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double shape = 0.0;
    double ratio = 0.0;
};

struct ErgodicFit {
    std::string functional;
    double c_hat = 0.0;
    /// Least-squares log-log slope of the estimate over [t_max/10, t_max].
    double slope = 0.0;
    bool converged = false;
};

struct ErgodicReport {
    std::vector<ErgodicRow> rows;
    std::vector<ErgodicFit> fits;
    bool holder_case = false;
    std::string warning;
};

/// Stationary reference values: names and mu(F) from a long run.
struct StationaryReference {
    double T = 0.0;
    std::vector<std::string> functionals;
    std::vector<double> mu;
    std::vector<double> se;
};

StationaryReference stationary_reference(const InvariantReport& report);

/// Lipschitz case (alpha >= sqrt 2):
///   L (1+||x||)/sqrt t [1 + ((1+||x||)/sqrt t)^{beta/alpha}]
/// Hoelder case:
///   |F|_g (1+||x||^g)/t^{g/2} (1 + (1+||x||^{beta g/alpha})/t^{beta g/(2 alpha)})
double ergodic_shape(const DriftSpec& spec, const TestFunctional& f, double constant,
                     double norm_x, double t);

/// |P_t F(x0) - mu(F)| against the ergodic-rate shape. For alpha <= sqrt(2)
/// a bank without Hoelder functionals is replaced by ClippedHNormPower with
/// gamma = alpha^2/(alpha+beta), with a warning. The reference horizon must
/// be at least 10 max(time_grid), and must cover the bank actually used.
ErgodicReport ergodic_rate_report(const Experiment& ex, const Field& x0,
                                  const std::vector<TestFunctional>& functionals,
                                  const std::vector<double>& time_grid, std::size_t n_paths,
                                  const StationaryReference& reference);

/// The bank ergodic_rate_report would use for this drift.
std::vector<TestFunctional> ergodic_bank(const DriftSpec& spec,
                                         const std::vector<TestFunctional>& functionals,
                                         std::string* warning = nullptr);

}  // namespace spde_lab
