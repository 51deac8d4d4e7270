#include "spde_lab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "spde_lab/errors.hpp"
#include "spde_lab/parallel.hpp"

namespace spde_lab {

TestFunctional TestFunctional::clipped_h_norm() { return {Kind::ClippedHNorm, 0, 1.0}; }

TestFunctional TestFunctional::mode_sine(std::size_t k) {
    if (k == 0) throw ParameterError("ModeSine mode index must be >= 1");
    return {Kind::ModeSine, k, 1.0};
}

TestFunctional TestFunctional::clipped_h_norm_power(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0,1]");
    return {Kind::ClippedHNormPower, 0, gamma};
}

std::string TestFunctional::name() const {
    switch (kind_) {
        case Kind::ClippedHNorm:
            return "clipped_h_norm";
        case Kind::ModeSine:
            return "mode_sine_" + std::to_string(mode_);
        case Kind::ClippedHNormPower: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "clipped_h_norm_pow_%.6g", gamma_);
            return buf;
        }
    }
    return {};
}

double TestFunctional::evaluate(const Field& u, const SpacePair& sp) const {
    switch (kind_) {
        case Kind::ClippedHNorm:
            return std::min(norm_h(u, sp), 1.0);
        case Kind::ModeSine:
            return std::sin(inner_h(u, eigenpair(mode_, u.grid()).mode, sp));
        case Kind::ClippedHNormPower:
            return std::pow(std::min(norm_h(u, sp), 1.0), gamma_);
    }
    return 0.0;
}

double TestFunctional::constant(const Grid1D& grid, const SpacePair& sp) const {
    if (kind_ == Kind::ModeSine) return norm_h(eigenpair(mode_, grid).mode, sp);
    return 1.0;
}

std::vector<TestFunctional> default_functional_bank() {
    return {TestFunctional::clipped_h_norm(), TestFunctional::mode_sine(1),
            TestFunctional::mode_sine(2)};
}

EstimatorConstants EstimatorConstants::from(const AssumptionReport& report) {
    return {report.delta_a2, report.delta_a3, report.k_a3};
}

MeanSe mean_se(const std::vector<double>& samples) {
    if (samples.empty()) return {};
    const double n = static_cast<double>(samples.size());
    // Shifted by the first sample so constant data give se = 0 exactly.
    const double shift = samples.front();
    double s1 = 0.0;
    for (double v : samples) s1 += v - shift;
    const double offset = s1 / n;
    const double mean = shift + offset;
    if (samples.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : samples) ss += (v - shift - offset) * (v - shift - offset);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

namespace {

double need(const std::optional<double>& value, const char* name) {
    if (!value) throw ConfigError(std::string("missing checker constant ") + name);
    if (!std::isfinite(*value)) throw ConfigError(std::string("checker constant ") + name + " is not finite");
    return *value;
}

/// Grid times as step indices; rejects non-increasing or negative grids.
std::vector<std::size_t> grid_steps(const std::vector<double>& time_grid, double dt,
                                    bool allow_zero) {
    if (time_grid.empty()) throw ParameterError("time grid is empty");
    std::vector<std::size_t> steps;
    for (std::size_t i = 0; i < time_grid.size(); ++i) {
        const double t = time_grid[i];
        if (!std::isfinite(t) || t < 0.0 || (!allow_zero && t == 0.0)) {
            throw ParameterError("time grid entries must be " + std::string(allow_zero ? ">= 0" : "> 0"));
        }
        if (i > 0 && !(t > time_grid[i - 1])) throw ParameterError("time grid must be strictly increasing");
        steps.push_back(step_count(t, dt));
    }
    return steps;
}

/// Advances one path by `count` implicit steps.
void advance(ImplicitStepper& stepper, const NoiseModel& noise, double dt, Field& state,
             Field& next, std::size_t count, RngStream& stream) {
    for (std::size_t k = 0; k < count; ++k) {
        stepper.solve(state + noise_increment(noise, dt, stream), next);
        std::swap(state, next);
    }
}

double holder_limit(const DriftSpec& spec) {
    return spec.alpha() * spec.alpha() / (spec.alpha() + spec.beta());
}

void check_holder_range(const DriftSpec& spec, const std::vector<TestFunctional>& functionals) {
    for (const auto& f : functionals) {
        if (!f.is_lipschitz() && f.exponent() > holder_limit(spec) * (1.0 + 1e-12)) {
            throw ParameterError("gamma = " + std::to_string(f.exponent()) +
                                 " exceeds alpha^2/(alpha+beta) = " + std::to_string(holder_limit(spec)));
        }
    }
}

}  // namespace

double decay_rhs_bound(const DriftSpec& spec, double hs_norm_sq, const EstimatorConstants& c,
                       const Field& x0, const Field& y0, double t) {
    const double d2 = need(c.delta_a2, "delta_a2");
    const double d3 = need(c.delta_a3, "delta_a3");
    const double k3 = need(c.k_a3, "k_a3");
    if (!(t > 0.0)) throw ParameterError("decay bound needs t > 0");
    const SpacePair sp = spec.space_pair();
    const double ratio = spec.alpha() / spec.beta();
    const double dist = norm_h(x0 - y0, sp);
    const double nx = norm_h(x0, sp);
    const double ny = norm_h(y0, sp);
    return std::pow(2.0 * dist * dist / (d2 * t), ratio) *
           (nx * nx + ny * ny + 2.0 * t * (k3 + hs_norm_sq)) / (d3 * t);
}

DecayReport decay_report(const Experiment& ex, const EstimatorConstants& constants,
                         const Field& x0, const Field& y0, const std::vector<double>& time_grid,
                         std::size_t n_paths) {
    const double d2 = need(constants.delta_a2, "delta_a2");
    need(constants.delta_a3, "delta_a3");
    need(constants.k_a3, "k_a3");
    if (!(ex.spec.beta() > 0.0 && ex.spec.beta() < ex.spec.alpha())) {
        throw ParameterError("decay report needs 0 < beta < alpha");
    }
    if (x0 == y0) throw ParameterError("decay report needs distinct starts x0 != y0");
    if (n_paths == 0) throw ParameterError("n_paths must be >= 1");
    const auto steps = grid_steps(time_grid, ex.cfg.dt, false);
    const double T = time_grid.back();
    const double power = 2.0 * ex.spec.alpha() / ex.spec.beta();

    struct PathResult {
        std::vector<double> lhs, margin;
        double tol = 0.0;
    };
    std::vector<PathResult> paths(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        RngStream stream = rng_substream(ex.seed, i);
        const auto c = simulate_coupled(ex.spec, ex.grid, ex.cfg, ex.noise, x0, y0, T, stream, i);
        PathResult& r = paths[i];
        double max_rhs = 0.0;
        for (std::size_t k : steps) {
            r.lhs.push_back(std::pow(c.distance[k], power));
            r.margin.push_back(decay1_margin(c, d2, k));
            max_rhs = std::max(max_rhs, decay1_rhs(c, d2, k));
        }
        r.tol = 0.05 * ex.cfg.dt * (1.0 + max_rhs);
    });

    DecayReport report;
    report.n_paths = n_paths;
    report.all_pass = true;
    std::vector<bool> raw(n_paths, false);
    for (std::size_t g = 0; g < time_grid.size(); ++g) {
        DecayRow row;
        row.t = time_grid[g];
        std::vector<double> values;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const PathResult& r = paths[i];
            values.push_back(r.lhs[g]);
            if (r.margin[g] < -r.tol) ++row.pathwise_violations;
            if (r.margin[g] < 0.0) raw[i] = true;
            if (r.margin[g] < report.worst_margin) {
                report.worst_margin = r.margin[g];
                report.worst_tol = r.tol;
            }
        }
        const MeanSe ms = mean_se(values);
        row.mc_mean = ms.mean;
        row.mc_se = ms.se;
        row.rhs_bound = decay_rhs_bound(ex.spec, ex.noise.hs_norm_sq(), constants, x0, y0, row.t);
        row.pass = row.mc_mean + 2.0 * row.mc_se <= row.rhs_bound;
        report.all_pass = report.all_pass && row.pass;
        if (!report.rows.empty() &&
            row.mc_mean > report.rows.back().mc_mean * (1.0 + 1e-6) + 1e-300) {
            report.mean_nonincreasing = false;
        }
        report.rows.push_back(row);
    }
    report.raw_violations = static_cast<std::size_t>(std::count(raw.begin(), raw.end(), true));
    return report;
}

MomentReport moment_report(const Experiment& ex, const EstimatorConstants& constants,
                           const Field& x0, const std::vector<double>& time_grid,
                           std::size_t n_paths) {
    const double d3 = need(constants.delta_a3, "delta_a3");
    const double k3 = need(constants.k_a3, "k_a3");
    if (n_paths == 0) throw ParameterError("n_paths must be >= 1");
    const auto steps = grid_steps(time_grid, ex.cfg.dt, true);
    const double T = time_grid.back();

    std::vector<std::vector<double>> values(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        RngStream stream = rng_substream(ex.seed, i);
        const auto p = simulate_path(ex.spec, ex.grid, ex.cfg, ex.noise, x0, T, stream);
        for (std::size_t k : steps) values[i].push_back(p.h_norm_sq[k] + d3 * p.v_alpha_integral[k]);
    });

    const double x0_sq = std::pow(norm_h(x0, ex.spec.space_pair()), 2);
    MomentReport report;
    report.n_paths = n_paths;
    report.all_pass = true;
    for (std::size_t g = 0; g < time_grid.size(); ++g) {
        std::vector<double> column;
        for (const auto& v : values) column.push_back(v[g]);
        const MeanSe ms = mean_se(column);
        MomentRow row;
        row.t = time_grid[g];
        row.mc_mean = ms.mean;
        row.mc_se = ms.se;
        row.bound = x0_sq + row.t * (k3 + ex.noise.hs_norm_sq()) + 0.05 * ex.cfg.dt * row.t;
        row.pass = row.mc_mean - 2.0 * row.mc_se <= row.bound;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<double> refine_time_grid(const std::vector<double>& time_grid) {
    std::vector<double> out;
    for (std::size_t i = 0; i < time_grid.size(); ++i) {
        if (i > 0) out.push_back(std::sqrt(time_grid[i - 1] * time_grid[i]));
        out.push_back(time_grid[i]);
    }
    return out;
}

double semigroup_shape(const DriftSpec& spec, const TestFunctional& f, double constant,
                       double norm_x, double norm_y, double norm_diff, double t) {
    const double g = f.is_lipschitz() ? 1.0 : f.exponent();
    const double base = 1.0 + norm_x / std::sqrt(t) + norm_y / std::sqrt(t);
    return constant * std::pow(norm_diff, g) * std::pow(t, -0.5 * g) *
           std::pow(base, spec.beta() * g / spec.alpha());
}

SemigroupReport semigroup_report(const Experiment& ex, const Field& x0, const Field& y0,
                                 const std::vector<TestFunctional>& functionals,
                                 const std::vector<double>& time_grid, std::size_t n_paths) {
    check_holder_range(ex.spec, functionals);
    if (n_paths == 0) throw ParameterError("n_paths must be >= 1");
    grid_steps(time_grid, ex.cfg.dt, false);
    const std::vector<double> fine = refine_time_grid(time_grid);
    const auto steps = grid_steps(fine, ex.cfg.dt, false);
    const SpacePair sp = ex.spec.space_pair();
    const std::size_t nf = functionals.size();

    // diffs[i][g * nf + f] = F(X_t(x0)) - F(X_t(y0)) on the refined grid.
    std::vector<std::vector<double>> diffs(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        RngStream stream = rng_substream(ex.seed, i);
        ImplicitStepper stepper(ex.spec, ex.grid, ex.cfg);
        Field x = x0, y = y0, next(ex.grid);
        const bool identical = x0 == y0;
        std::size_t done = 0;
        for (std::size_t k : steps) {
            for (; done < k; ++done) {
                const Field dW = noise_increment(ex.noise, ex.cfg.dt, stream);
                stepper.solve(x + dW, next);
                std::swap(x, next);
                if (identical) {
                    y = x;
                } else {
                    stepper.solve(y + dW, next);
                    std::swap(y, next);
                }
            }
            for (const auto& f : functionals) diffs[i].push_back(f.evaluate(x, sp) - f.evaluate(y, sp));
        }
    });

    const double nx = norm_h(x0, sp), ny = norm_h(y0, sp), nd = norm_h(x0 - y0, sp);
    SemigroupReport report;
    report.all_stable = true;
    for (std::size_t fi = 0; fi < nf; ++fi) {
        const auto& f = functionals[fi];
        const double constant = f.constant(ex.grid, sp);
        SemigroupFit fit;
        fit.functional = f.name();
        for (std::size_t g = 0; g < fine.size(); ++g) {
            std::vector<double> column;
            for (const auto& d : diffs) column.push_back(d[g * nf + fi]);
            const MeanSe ms = mean_se(column);
            SemigroupRow row;
            row.functional = f.name();
            row.t = fine[g];
            row.estimate = std::abs(ms.mean);
            row.se = ms.se;
            row.shape = semigroup_shape(ex.spec, f, constant, nx, ny, nd, row.t);
            row.ratio = row.estimate == 0.0 ? 0.0 : row.estimate / row.shape;
            // Even refined-grid indices are the original grid times.
            if (g % 2 == 0) fit.c_hat = std::max(fit.c_hat, row.ratio);
            fit.c_hat_refined = std::max(fit.c_hat_refined, row.ratio);
            report.rows.push_back(row);
        }
        if (fit.c_hat == 0.0 && fit.c_hat_refined == 0.0) {
            fit.stable = true;
        } else {
            fit.stable = std::isfinite(fit.c_hat_refined) && fit.c_hat > 0.0 &&
                         fit.c_hat_refined < 2.0 * fit.c_hat;
        }
        report.all_stable = report.all_stable && fit.stable;
        report.fits.push_back(fit);
    }
    return report;
}

namespace {

/// Batch-means standard error of the mean of `values`.
double batch_means_se(const std::vector<double>& values, std::size_t batches) {
    const std::size_t n = values.size();
    if (batches < 2 || n < batches) return 0.0;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += values[i];
        means.push_back(sum / static_cast<double>(hi - lo));
    }
    return mean_se(means).se;
}

}  // namespace

InvariantReport invariant_report(const Experiment& ex, const EstimatorConstants& constants,
                                 double T, const std::vector<Field>& starts,
                                 const std::vector<TestFunctional>& functionals,
                                 const InvariantOptions& options) {
    const double d3 = need(constants.delta_a3, "delta_a3");
    const double k3 = need(constants.k_a3, "k_a3");
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("T must be > 0");
    if (starts.empty()) throw ParameterError("invariant report needs at least one start");
    if (!(options.snapshot_stride > 0.0)) throw ParameterError("snapshot stride must be > 0");
    const double dt = ex.cfg.dt;
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.snapshot_stride / dt)));
    const std::size_t total = step_count(T, dt);
    const std::size_t n_snap = total / stride;
    if (n_snap == 0) throw ParameterError("T is shorter than one snapshot stride");
    const SpacePair sp = ex.spec.space_pair();
    const double alpha = ex.spec.alpha();
    const std::size_t nf = functionals.size();

    // Per start: F values at each snapshot, and the V^alpha integral over
    // each snapshot interval (right-endpoint quadrature).
    struct StartResult {
        std::vector<std::vector<double>> f;  // [functional][snapshot]
        std::vector<double> blocks;
    };
    std::vector<StartResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        RngStream stream = rng_substream(ex.seed, options.independent_noise ? s : 0);
        ImplicitStepper stepper(ex.spec, ex.grid, ex.cfg);
        Field x = starts[s], next(ex.grid);
        StartResult& r = results[s];
        r.f.assign(nf, {});
        for (std::size_t snap = 0; snap < n_snap; ++snap) {
            double block = 0.0;
            for (std::size_t k = 0; k < stride; ++k) {
                stepper.solve(x + noise_increment(ex.noise, dt, stream), next);
                std::swap(x, next);
                block += dt * std::pow(sp.norm_v(x), alpha);
            }
            r.blocks.push_back(block);
            for (std::size_t fi = 0; fi < nf; ++fi) r.f[fi].push_back(functionals[fi].evaluate(x, sp));
        }
    });

    InvariantReport report;
    report.T = static_cast<double>(n_snap * stride) * dt;
    report.bound = (k3 + ex.noise.hs_norm_sq()) / d3;
    for (const auto& f : functionals) report.functionals.push_back(f.name());

    std::vector<double> horizons;
    for (double c : options.checkpoints) {
        if (c > 0.0 && c < report.T * (1.0 - 1e-12)) horizons.push_back(c);
    }
    horizons.push_back(report.T);
    for (double h : horizons) {
        const std::size_t m = std::min(n_snap, static_cast<std::size_t>(std::llround(h / (stride * dt))));
        if (m == 0) continue;
        InvariantCheckpoint cp;
        cp.T = static_cast<double>(m * stride) * dt;
        for (const auto& r : results) {
            std::vector<double> mu, se;
            for (std::size_t fi = 0; fi < nf; ++fi) {
                const std::vector<double> head(r.f[fi].begin(), r.f[fi].begin() + m);
                mu.push_back(std::accumulate(head.begin(), head.end(), 0.0) / static_cast<double>(m));
                se.push_back(batch_means_se(head, options.batches));
            }
            cp.mu_f.push_back(mu);
            cp.mu_f_se.push_back(se);
            std::vector<double> rates;
            for (std::size_t b = 0; b < m; ++b) rates.push_back(r.blocks[b] / (stride * dt));
            cp.mu_v_alpha.push_back(std::accumulate(r.blocks.begin(), r.blocks.begin() + m, 0.0) / cp.T);
            cp.mu_v_alpha_se.push_back(batch_means_se(rates, options.batches));
        }
        for (std::size_t s = 1; s < results.size(); ++s) {
            for (std::size_t fi = 0; fi < nf; ++fi) {
                cp.discrepancy = std::max(cp.discrepancy, std::abs(cp.mu_f[0][fi] - cp.mu_f[s][fi]));
            }
        }
        report.checkpoints.push_back(cp);
    }
    report.bound_pass = report.checkpoints.back().mu_v_alpha[0] <= 1.1 * report.bound;
    return report;
}

StationaryReference stationary_reference(const InvariantReport& report) {
    StationaryReference ref;
    ref.T = report.T;
    ref.functionals = report.functionals;
    ref.mu = report.checkpoints.back().mu_f[0];
    ref.se = report.checkpoints.back().mu_f_se[0];
    return ref;
}

double ergodic_shape(const DriftSpec& spec, const TestFunctional& f, double constant,
                     double norm_x, double t) {
    const double a = spec.alpha(), b = spec.beta();
    if (f.is_lipschitz()) {
        const double base = (1.0 + norm_x) / std::sqrt(t);
        return constant * base * (1.0 + std::pow(base, b / a));
    }
    const double g = f.exponent();
    return constant * (1.0 + std::pow(norm_x, g)) * std::pow(t, -0.5 * g) *
           (1.0 + (1.0 + std::pow(norm_x, b * g / a)) * std::pow(t, -0.5 * b * g / a));
}

std::vector<TestFunctional> ergodic_bank(const DriftSpec& spec,
                                         const std::vector<TestFunctional>& functionals,
                                         std::string* warning) {
    if (spec.alpha() >= std::sqrt(2.0)) return functionals;
    std::vector<TestFunctional> holder;
    for (const auto& f : functionals) {
        if (!f.is_lipschitz()) holder.push_back(f);
    }
    check_holder_range(spec, holder);
    if (!holder.empty()) return holder;
    const double gamma = holder_limit(spec);
    if (warning) {
        *warning = "alpha = " + std::to_string(spec.alpha()) +
                   " <= sqrt(2): Lipschitz bank replaced by the Hoelder bank with gamma = " +
                   std::to_string(gamma);
    }
    return {TestFunctional::clipped_h_norm_power(gamma)};
}

ErgodicReport ergodic_rate_report(const Experiment& ex, const Field& x0,
                                  const std::vector<TestFunctional>& functionals,
                                  const std::vector<double>& time_grid, std::size_t n_paths,
                                  const StationaryReference& reference) {
    if (n_paths == 0) throw ParameterError("n_paths must be >= 1");
    const auto steps = grid_steps(time_grid, ex.cfg.dt, false);
    if (reference.T < 10.0 * time_grid.back() * (1.0 - 1e-12)) {
        throw ParameterError("stationary reference horizon must be >= 10 x max t");
    }
    ErgodicReport report;
    const auto bank = ergodic_bank(ex.spec, functionals, &report.warning);
    report.holder_case = ex.spec.alpha() < std::sqrt(2.0);
    std::vector<std::size_t> ref_index;
    for (const auto& f : bank) {
        const auto it = std::find(reference.functionals.begin(), reference.functionals.end(), f.name());
        if (it == reference.functionals.end()) {
            throw ParameterError("stationary reference lacks functional " + f.name());
        }
        ref_index.push_back(static_cast<std::size_t>(it - reference.functionals.begin()));
    }
    const SpacePair sp = ex.spec.space_pair();
    const std::size_t nf = bank.size();

    std::vector<std::vector<double>> values(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        RngStream stream = rng_substream(ex.seed, i);
        ImplicitStepper stepper(ex.spec, ex.grid, ex.cfg);
        Field x = x0, next(ex.grid);
        std::size_t done = 0;
        for (std::size_t k : steps) {
            advance(stepper, ex.noise, ex.cfg.dt, x, next, k - done, stream);
            done = k;
            for (const auto& f : bank) values[i].push_back(f.evaluate(x, sp));
        }
    });

    const double nx = norm_h(x0, sp);
    for (std::size_t fi = 0; fi < nf; ++fi) {
        const auto& f = bank[fi];
        const double constant = f.constant(ex.grid, sp);
        const double mu = reference.mu[ref_index[fi]];
        const double mu_se = reference.se[ref_index[fi]];
        ErgodicFit fit;
        fit.functional = f.name();
        std::vector<double> log_t, log_e;
        for (std::size_t g = 0; g < time_grid.size(); ++g) {
            std::vector<double> column;
            for (const auto& v : values) column.push_back(v[g * nf + fi]);
            const MeanSe ms = mean_se(column);
            ErgodicRow row;
            row.functional = f.name();
            row.t = time_grid[g];
            row.estimate = std::abs(ms.mean - mu);
            row.se = std::hypot(ms.se, mu_se);
            row.shape = ergodic_shape(ex.spec, f, constant, nx, row.t);
            row.ratio = row.estimate / row.shape;
            fit.c_hat = std::max(fit.c_hat, row.ratio);
            if (row.t >= time_grid.back() / 10.0 * (1.0 - 1e-12) && row.estimate > 0.0) {
                log_t.push_back(std::log(row.t));
                log_e.push_back(std::log(row.estimate));
            }
            report.rows.push_back(row);
        }
        if (log_t.size() >= 2) {
            const double n = static_cast<double>(log_t.size());
            const double mt = std::accumulate(log_t.begin(), log_t.end(), 0.0) / n;
            const double me = std::accumulate(log_e.begin(), log_e.end(), 0.0) / n;
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t j = 0; j < log_t.size(); ++j) {
                sxy += (log_t[j] - mt) * (log_e[j] - me);
                sxx += (log_t[j] - mt) * (log_t[j] - mt);
            }
            fit.slope = sxy / sxx;
        }
        const ErgodicRow& last = report.rows.back();
        fit.converged = last.estimate <= 2.0 * last.se;
        report.fits.push_back(fit);
    }
    return report;
}

}  // namespace spde_lab
