#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spde_lab/drift_operators.hpp"
#include "spde_lab/function_space.hpp"
#include "spde_lab/noise.hpp"
#include "spde_lab/random.hpp"

namespace spde_lab {

struct IntegratorConfig {
    double dt = 1e-3;
    /// Residual tolerance, relative to 1 + ||x + dW||_H.
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    int max_damping_halvings = 30;

    void validate() const;
};

/// Backward-Euler solve z - dt A(z) = x + dW, reusing work buffers across
/// calls. Not thread-safe; use one per path.
///
/// The step is the minimizer of a strictly convex energy. Newton directions
/// come from its tridiagonal Hessian; a step length is accepted once the
/// directional derivative along the direction is no longer negative, which
/// keeps the energy decreasing. PLaplace and LinearHeat iterate on z.
/// FastDiffusion iterates on w = phi_eps(z), where the Hessian
/// diag(1/phi_eps'(z)) - dt Delta_h stays bounded as z -> 0.
class ImplicitStepper {
public:
    ImplicitStepper(const DriftSpec& spec, const Grid1D& grid, const IntegratorConfig& cfg);

    /// Solves for z given rhs = x + dW.
    void solve(const Field& rhs, Field& z);
    /// Newton iterations used by the last solve.
    int last_iterations() const noexcept { return last_iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    /// At unknown u fills z, the residual and the Hessian; returns the
    /// H-norm of the residual z - dt A(z) - rhs.
    double evaluate(const std::vector<double>& u, std::vector<double>& z, const Field& rhs);

    DriftSpec spec_;
    Grid1D grid_;
    IntegratorConfig cfg_;
    bool dual_variable_;
    std::vector<double> map_value_;
    std::vector<double> map_slope_;
    std::vector<double> residual_;
    std::vector<double> lower_, diag_, upper_;
    std::vector<double> step_;
    std::vector<double> u_, trial_u_, z_, trial_z_;
    Field scratch_;
    int last_iterations_ = 0;
    double last_residual_ = 0.0;
};

/// One implicit Euler-Maruyama step. dt = 0 returns x + dW.
Field implicit_step(const DriftSpec& spec, const Grid1D& grid, const IntegratorConfig& cfg,
                    const Field& x, const Field& dW);

/// Number of uniform steps covering [0, T]: ceil(T/dt) up to a 1e-9 guard.
std::size_t step_count(double T, double dt);

struct PathOptions {
    /// Time between stored field snapshots; 0 disables snapshots.
    double snapshot_stride = 0.0;
};

struct PathStats {
    std::vector<double> times;
    /// ||X_{t_k}||_H^2
    std::vector<double> h_norm_sq;
    /// I_k = sum_{j=1..k} dt ||X_{t_j}||_V^alpha (the implicit-endpoint
    /// quadrature of int_0^{t_k} ||X_s||_V^alpha ds); I_0 = 0.
    std::vector<double> v_alpha_integral;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    Field final_state;

    explicit PathStats(const Grid1D& grid) : final_state(grid) {}
};

PathStats simulate_path(const DriftSpec& spec, const Grid1D& grid, const IntegratorConfig& cfg,
                        const NoiseModel& noise, const Field& x0, double T, RngStream& stream,
                        const PathOptions& options = {});

struct CoupledStats {
    std::uint64_t noise_id = 0;
    double alpha = 0.0;
    double beta = 0.0;
    /// d_k = ||X_{t_k}(x) - X_{t_k}(y)||_H
    std::vector<double> distance;
    PathStats x;
    PathStats y;

    explicit CoupledStats(const Grid1D& grid) : x(grid), y(grid) {}
};

/// Two paths driven by identical increments drawn from `stream`.
CoupledStats simulate_coupled(const DriftSpec& spec, const Grid1D& grid,
                              const IntegratorConfig& cfg, const NoiseModel& noise,
                              const Field& x0, const Field& y0, double T, RngStream& stream,
                              std::uint64_t noise_id = 0, const PathOptions& options = {});

/// RHS - LHS of the pathwise decay inequality at t = times[t_index]:
///   LHS = d_k^{2 alpha/beta}
///   RHS = (2 d_0^2 / (delta t))^{alpha/beta} (I_k(x) + I_k(y)) / t
double decay1_margin(const CoupledStats& coupled, double delta, std::size_t t_index);

/// Pathwise RHS alone (used to size the discretization tolerance).
double decay1_rhs(const CoupledStats& coupled, double delta, std::size_t t_index);

}  // namespace spde_lab
