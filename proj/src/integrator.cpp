#include "spde_lab/integrator.hpp"

#include <cmath>
#include <string>

#include "spde_lab/errors.hpp"

namespace spde_lab {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be > 0");
    if (!(newton_tol > 0.0)) throw ParameterError("newton_tol must be > 0");
    if (newton_max_iter < 1) throw ParameterError("newton_max_iter must be >= 1");
    if (max_damping_halvings < 0) throw ParameterError("max_damping_halvings must be >= 0");
}

ImplicitStepper::ImplicitStepper(const DriftSpec& spec, const Grid1D& grid,
                                 const IntegratorConfig& cfg)
    : spec_(spec),
      grid_(grid),
      cfg_(cfg),
      dual_variable_(spec.kind() == DriftKind::FastDiffusion),
      scratch_(grid) {
    if (!(cfg.dt >= 0.0)) throw ParameterError("dt must be >= 0");
    if (!(cfg.newton_tol > 0.0)) throw ParameterError("newton_tol must be > 0");
    if (spec.is_singular() && !(spec.epsilon() > 0.0) && cfg.dt > 0.0) {
        throw ParameterError("implicit stepping of a singular drift needs epsilon > 0");
    }
    const std::size_t n = grid.n();
    map_value_.resize(n + 1);
    map_slope_.resize(n + 1);
    for (auto* v : {&residual_, &lower_, &diag_, &upper_, &step_, &u_, &trial_u_, &z_, &trial_z_}) {
        v->resize(n);
    }
}

double ImplicitStepper::evaluate(const std::vector<double>& u, std::vector<double>& z,
                                 const Field& rhs) {
    const std::size_t n = grid_.n();
    const double inv_h = 1.0 / grid_.h();
    const double c = cfg_.dt * inv_h * inv_h;

    if (dual_variable_) {
        for (std::size_t m = 0; m < n; ++m) {
            z[m] = scalar_map_inverse(spec_, u[m]);
            const auto [value, slope] = scalar_map_with_derivative(spec_, z[m]);
            map_value_[m] = value;
            map_slope_[m] = 1.0 / slope;
        }
        for (std::size_t m = 0; m < n; ++m) {
            const double left = m > 0 ? map_value_[m - 1] : 0.0;
            const double right = m + 1 < n ? map_value_[m + 1] : 0.0;
            residual_[m] = z[m] - c * (left - 2.0 * map_value_[m] + right) - rhs[m];
            lower_[m] = m > 0 ? -c : 0.0;
            upper_[m] = m + 1 < n ? -c : 0.0;
            diag_[m] = map_slope_[m] + 2.0 * c;
        }
        for (std::size_t m = 0; m < n; ++m) scratch_[m] = residual_[m];
        return norm_h(scratch_, spec_.space_pair());
    }

    double left = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        const double right = j < n ? u[j] : 0.0;
        const auto [value, slope] = scalar_map_with_derivative(spec_, (right - left) * inv_h);
        map_value_[j] = value;
        map_slope_[j] = slope;
        left = right;
    }
    for (std::size_t m = 0; m < n; ++m) {
        z[m] = u[m];
        residual_[m] = u[m] - cfg_.dt * (map_value_[m + 1] - map_value_[m]) * inv_h - rhs[m];
        lower_[m] = m > 0 ? -c * map_slope_[m] : 0.0;
        upper_[m] = m + 1 < n ? -c * map_slope_[m + 1] : 0.0;
        diag_[m] = 1.0 + c * (map_slope_[m] + map_slope_[m + 1]);
    }
    double sum = 0.0;
    for (double r : residual_) sum += r * r;
    return std::sqrt(grid_.h() * sum);
}

void ImplicitStepper::solve(const Field& rhs, Field& z) {
    require_same_grid(rhs, z);
    last_iterations_ = 0;
    last_residual_ = 0.0;
    if (cfg_.dt == 0.0) {
        z = rhs;
        return;
    }

    const std::size_t n = grid_.n();
    const double target = cfg_.newton_tol * (1.0 + norm_h(rhs, spec_.space_pair()));
    for (std::size_t m = 0; m < n; ++m) u_[m] = dual_variable_ ? scalar_map(spec_, rhs[m]) : rhs[m];
    double rn = evaluate(u_, z_, rhs);

    int iter = 0;
    for (; rn > target; ++iter) {
        if (iter == cfg_.newton_max_iter) {
            last_residual_ = rn;
            throw SolverError("damped Newton: no convergence in " +
                                  std::to_string(cfg_.newton_max_iter) + " iterations (residual " +
                                  std::to_string(rn) + ")",
                              rn);
        }
        for (std::size_t m = 0; m < n; ++m) residual_[m] = -residual_[m];
        solve_tridiagonal(lower_, diag_, upper_, residual_, step_);

        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= cfg_.max_damping_halvings; ++halving, t *= 0.5) {
            for (std::size_t m = 0; m < n; ++m) trial_u_[m] = u_[m] + t * step_[m];
            const double trial_rn = evaluate(trial_u_, trial_z_, rhs);
            if (!std::isfinite(trial_rn)) continue;
            double slope = 0.0;
            for (std::size_t m = 0; m < n; ++m) slope += residual_[m] * step_[m];
            if (slope <= 0.0 || trial_rn <= target || trial_rn <= 0.5 * rn) {
                std::swap(u_, trial_u_);
                std::swap(z_, trial_z_);
                rn = trial_rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            last_residual_ = rn;
            throw SolverError("damped Newton: line search failed after " +
                                  std::to_string(cfg_.max_damping_halvings) +
                                  " halvings (residual " + std::to_string(rn) + ")",
                              rn);
        }
    }
    last_iterations_ = iter;
    last_residual_ = rn;
    for (std::size_t m = 0; m < n; ++m) z[m] = z_[m];
}

Field implicit_step(const DriftSpec& spec, const Grid1D& grid, const IntegratorConfig& cfg,
                    const Field& x, const Field& dW) {
    Field rhs = x + dW;
    Field z(grid);
    ImplicitStepper stepper(spec, grid, cfg);
    stepper.solve(rhs, z);
    return z;
}

std::size_t step_count(double T, double dt) {
    if (!(T >= 0.0)) throw ParameterError("time horizon T must be >= 0");
    if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

namespace {

class PathRecorder {
public:
    PathRecorder(PathStats& stats, const DriftSpec& spec, const IntegratorConfig& cfg,
                 std::size_t steps, const PathOptions& options)
        : stats_(stats), sp_(spec.space_pair()), alpha_(spec.alpha()), dt_(cfg.dt) {
        stats_.times.reserve(steps + 1);
        stats_.h_norm_sq.reserve(steps + 1);
        stats_.v_alpha_integral.reserve(steps + 1);
        if (options.snapshot_stride > 0.0) {
            snapshot_every_ = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(options.snapshot_stride / cfg.dt)));
        }
    }

    void record(std::size_t k, const Field& state) {
        const double hn = norm_h(state, sp_);
        stats_.times.push_back(static_cast<double>(k) * dt_);
        stats_.h_norm_sq.push_back(hn * hn);
        if (k > 0) integral_ += dt_ * std::pow(sp_.norm_v(state), alpha_);
        stats_.v_alpha_integral.push_back(integral_);
        if (snapshot_every_ > 0 && k > 0 && k % snapshot_every_ == 0) {
            stats_.snapshot_times.push_back(static_cast<double>(k) * dt_);
            stats_.snapshots.push_back(state);
        }
    }

private:
    PathStats& stats_;
    SpacePair sp_;
    double alpha_;
    double dt_;
    double integral_ = 0.0;
    std::size_t snapshot_every_ = 0;
};

}  // namespace

PathStats simulate_path(const DriftSpec& spec, const Grid1D& grid, const IntegratorConfig& cfg,
                        const NoiseModel& noise, const Field& x0, double T, RngStream& stream,
                        const PathOptions& options) {
    cfg.validate();
    require_same_grid(x0, Field(grid));
    const std::size_t steps = step_count(T, cfg.dt);

    PathStats stats(grid);
    PathRecorder recorder(stats, spec, cfg, steps, options);
    ImplicitStepper stepper(spec, grid, cfg);
    Field state = x0;
    Field next(grid);
    recorder.record(0, state);
    for (std::size_t k = 1; k <= steps; ++k) {
        Field rhs = state + noise_increment(noise, cfg.dt, stream);
        try {
            stepper.solve(rhs, next);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " at step " + std::to_string(k),
                              e.last_residual(), k);
        }
        std::swap(state, next);
        recorder.record(k, state);
    }
    stats.final_state = state;
    return stats;
}

CoupledStats simulate_coupled(const DriftSpec& spec, const Grid1D& grid,
                              const IntegratorConfig& cfg, const NoiseModel& noise,
                              const Field& x0, const Field& y0, double T, RngStream& stream,
                              std::uint64_t noise_id, const PathOptions& options) {
    cfg.validate();
    require_same_grid(x0, y0);
    require_same_grid(x0, Field(grid));
    const std::size_t steps = step_count(T, cfg.dt);
    const SpacePair sp = spec.space_pair();

    CoupledStats coupled(grid);
    coupled.noise_id = noise_id;
    coupled.alpha = spec.alpha();
    coupled.beta = spec.beta();
    coupled.distance.reserve(steps + 1);

    PathRecorder rec_x(coupled.x, spec, cfg, steps, options);
    PathRecorder rec_y(coupled.y, spec, cfg, steps, options);
    ImplicitStepper stepper(spec, grid, cfg);
    Field sx = x0;
    Field sy = y0;
    Field next(grid);
    rec_x.record(0, sx);
    rec_y.record(0, sy);
    coupled.distance.push_back(norm_h(sx - sy, sp));
    const bool identical = sx == sy;
    for (std::size_t k = 1; k <= steps; ++k) {
        const Field dW = noise_increment(noise, cfg.dt, stream);
        try {
            stepper.solve(sx + dW, next);
            std::swap(sx, next);
            if (identical) {
                sy = sx;
            } else {
                stepper.solve(sy + dW, next);
                std::swap(sy, next);
            }
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " at step " + std::to_string(k),
                              e.last_residual(), k);
        }
        rec_x.record(k, sx);
        rec_y.record(k, sy);
        coupled.distance.push_back(norm_h(sx - sy, sp));
    }
    coupled.x.final_state = sx;
    coupled.y.final_state = sy;
    return coupled;
}

double decay1_rhs(const CoupledStats& coupled, double delta, std::size_t t_index) {
    if (t_index == 0) throw ParameterError("decay margin needs t > 0 (t_index >= 1)");
    if (t_index >= coupled.distance.size()) throw ParameterError("t_index beyond recorded path");
    if (!(delta > 0.0)) throw ParameterError("delta must be > 0");
    if (!(coupled.beta > 0.0)) throw ParameterError("decay margin needs beta > 0");
    const double t = coupled.x.times[t_index];
    const double ratio = coupled.alpha / coupled.beta;
    const double d0 = coupled.distance.front();
    const double integrals = coupled.x.v_alpha_integral[t_index] + coupled.y.v_alpha_integral[t_index];
    return std::pow(2.0 * d0 * d0 / (delta * t), ratio) * integrals / t;
}

double decay1_margin(const CoupledStats& coupled, double delta, std::size_t t_index) {
    const double rhs = decay1_rhs(coupled, delta, t_index);
    const double lhs = std::pow(coupled.distance[t_index], 2.0 * coupled.alpha / coupled.beta);
    return rhs - lhs;
}

}  // namespace spde_lab
