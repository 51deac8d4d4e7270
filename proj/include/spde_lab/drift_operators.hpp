#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "spde_lab/function_space.hpp"
#include "spde_lab/random.hpp"

namespace spde_lab {

inline constexpr double kDefaultEpsilon = 1e-8;

enum class DriftKind { PLaplace, FastDiffusion, LinearHeat };

/// Equation kind, exponent and regularization of the drift.
///
///   PLaplace(p),      1 < p < 2: alpha = p,     beta = 2 - p
///   FastDiffusion(r), 0 < r < 1: alpha = r + 1, beta = 1 - r
///   LinearHeat:                  alpha = 2,     beta = 0 (oracle convention)
class DriftSpec {
public:
    static DriftSpec p_laplace(double p, double epsilon = kDefaultEpsilon);
    static DriftSpec fast_diffusion(double r, double epsilon = kDefaultEpsilon);
    static DriftSpec linear_heat();

    DriftKind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return exponent_; }
    double epsilon() const noexcept { return epsilon_; }
    double alpha() const noexcept;
    double beta() const noexcept;
    bool is_singular() const noexcept { return kind_ != DriftKind::LinearHeat; }
    SpacePair space_pair() const;

    DriftSpec with_epsilon(double epsilon) const;

private:
    DriftSpec(DriftKind kind, double exponent, double epsilon);

    DriftKind kind_;
    double exponent_;
    double epsilon_;
};

/// Regularized scalar nonlinearity: (s^2 + eps^2)^{(m-1)/2} s where m = p - 1
/// (PLaplace flux) or m = r (FastDiffusion). Identity for LinearHeat.
/// At eps = 0 the value at s = 0 is the continuous extension 0.
double scalar_map(const DriftSpec& spec, double s) noexcept;

/// Value and derivative of scalar_map in one pass. The derivative is
/// +infinity at s = 0 when eps = 0 for the singular kinds.
std::pair<double, double> scalar_map_with_derivative(const DriftSpec& spec, double s) noexcept;

/// Inverse of scalar_map: returns s with scalar_map(spec, s) = w, to
/// relative accuracy ~1e-15.
double scalar_map_inverse(const DriftSpec& spec, double w) noexcept;

Field drift_apply(const DriftSpec& spec, const Field& u);

/// Tridiagonal Jacobian of drift_apply at u (lower[m] = dA_m/du_{m-1},
/// upper[m] = dA_m/du_{m+1}). Requires eps > 0 for the singular kinds.
void drift_jacobian(const DriftSpec& spec, const Field& u, std::span<double> lower,
                    std::span<double> diag, std::span<double> upper);

/// Duality pairing V*<A(u), w>_V in closed discrete form.
double pairing(const DriftSpec& spec, const Field& u, const Field& w);

/// V-norm of the drift's Gelfand triple.
double norm_v(const DriftSpec& spec, const Field& u);
double norm_h(const DriftSpec& spec, const Field& u);

/// ||A(u)||_{V*}. Closed forms at eps = 0; for eps > 0 the dual norm is
/// still evaluated exactly (see drift_operators.cpp).
double dual_norm_vstar(const DriftSpec& spec, const Field& u);

/// Random Gaussian fields sum_k c_k e_k with c_k = amplitude * zeta_k / k.
class GaussianFieldSampler {
public:
    explicit GaussianFieldSampler(const Grid1D& grid);

    const Grid1D& grid() const noexcept { return grid_; }
    Field draw(double amplitude, RngStream& rng) const;
    /// Amplitude drawn uniformly from {0.1, 1, 10}.
    Field draw_mixed(RngStream& rng) const;

private:
    Grid1D grid_;
    std::vector<Field> modes_;
};

/// Lower bound on sup_w |pairing(u, w)| / ||w||_V from random directions.
double sampled_dual_norm(const DriftSpec& spec, const Field& u, std::size_t n_samples,
                         std::uint64_t seed);

using PairSampler = std::function<std::pair<Field, Field>(std::size_t index, RngStream& rng)>;

/// Even indices: independent pair with mixed amplitudes. Odd indices:
/// near-collinear pair v2 = v1 + 1e-3 * noise.
PairSampler default_pair_sampler(const Grid1D& grid);

struct PairDescriptor {
    std::size_t sample = 0;
    double norm_v1 = 0.0;
    double norm_v2 = 0.0;
    double norm_diff_h = 0.0;
    double ratio = 0.0;
};

struct A2Estimate {
    double delta = 0.0;
    PairDescriptor worst;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

/// Estimates the weak-dissipativity constant as the minimum over sampled
/// pairs of
///   -2 [pairing(v1,w) - pairing(v2,w)] (|v1|_V^beta + |v2|_V^beta) / |w|_H^2,
/// w = v1 - v2. LinearHeat replaces the norm factor by 1. Each sample i
/// draws from rng_substream(seed, i).
A2Estimate check_a2(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    const PairSampler& sampler, std::uint64_t seed);
A2Estimate check_a2(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    std::uint64_t seed);

struct A3Estimate {
    double delta = 0.0;
    double k = 0.0;
};

A3Estimate check_a3(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    std::uint64_t seed);

double check_a4(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                std::uint64_t seed);

/// Largest jump of lambda -> pairing(u + lambda v, w) between consecutive
/// points of lambda_grid.
double check_a1(const DriftSpec& spec, const Field& u, const Field& v, const Field& w,
                std::span<const double> lambda_grid);

struct AssumptionReport {
    double delta_a2 = 0.0;
    double delta_a3 = 0.0;
    double k_a3 = 0.0;
    double k_a4 = 0.0;
    std::size_t samples = 0;
    PairDescriptor worst_pair;
};

AssumptionReport check_assumptions(const DriftSpec& spec, const Grid1D& grid,
                                   std::size_t n_samples, std::uint64_t seed);

}  // namespace spde_lab
