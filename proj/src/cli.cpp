#include "spde_lab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spde_lab/errors.hpp"
#include "spde_lab/estimators.hpp"
#include "spde_lab/report_io.hpp"
#include "spde_lab/vector_inequalities.hpp"

namespace spde_lab {

using nlohmann::json;

namespace {

// ---- configuration ---------------------------------------------------------

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

std::string key_path(const std::string& where, const char* key) {
    return where.empty() ? key : where + "." + key;
}

std::optional<double> number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(key_path(where, key) + " must be a number");
    return v.get<double>();
}

std::optional<std::uint64_t> count(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(key_path(where, key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError(name + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(name + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

const json& block(const json& root, const char* name) {
    static const json empty = json::object();
    return root.contains(name) ? root.at(name) : empty;
}

/// Rethrows module validation failures as configuration errors.
template <class F>
auto validated(const std::string& where, F&& make) {
    try {
        return make();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

// ---- criteria and output -----------------------------------------------------

struct Criterion {
    std::string name;
    bool pass = false;
    bool soft = false;
    std::string detail;
};

struct RunContext {
    Config config;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::size_t paths = 0;
    std::filesystem::path out_dir;
    std::vector<Criterion> criteria;
    json summary = json::object();
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

void add(RunContext& ctx, std::string name, bool pass, std::string detail, bool soft = false) {
    ctx.criteria.push_back({std::move(name), pass, soft, std::move(detail)});
}

json equation_json(const DriftSpec& d) {
    return {{"kind", d.kind() == DriftKind::PLaplace ? "p_laplace" : "fast_diffusion"},
            {"exponent", d.exponent()},
            {"epsilon", d.epsilon()},
            {"alpha", d.alpha()},
            {"beta", d.beta()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

void write_table(const RunContext& ctx, const std::string& file, const Table& table) {
    write_csv_file((ctx.out_dir / file).string(), table);
}

Experiment experiment(const RunContext& ctx) {
    const Grid1D grid(ctx.config.n);
    return Experiment{ctx.config.drift, grid, ctx.config.integrator,
                      noise_build(ctx.config.noise, grid, ctx.config.drift.space_pair()), ctx.seed};
}

std::vector<double> time_grid_or(const RunContext& ctx, std::vector<double> fallback) {
    return ctx.config.time_grid ? *ctx.config.time_grid : fallback;
}

const std::vector<double> kDecayGrid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
const std::vector<double> kMomentGrid{0.5, 1.0, 2.0, 4.0};

json pair_json(const PairDescriptor& p) {
    return {{"sample", p.sample}, {"norm_v1", p.norm_v1}, {"norm_v2", p.norm_v2},
            {"norm_diff_h", p.norm_diff_h}, {"ratio", p.ratio}};
}

json assumption_json(const AssumptionReport& r) {
    return {{"delta_a2", r.delta_a2}, {"delta_a3", r.delta_a3}, {"k_a3", r.k_a3},
            {"k_a4", r.k_a4},         {"samples", r.samples},   {"worst_pair_norms", pair_json(r.worst_pair)}};
}

void require_starts(const RunContext& ctx, std::size_t needed) {
    if (ctx.config.starts.size() < needed) {
        throw ConfigError("experiment.starts needs at least " + std::to_string(needed) + " entries");
    }
}

/// Constants for the explicit bounds, estimated on the simulated operator.
EstimatorConstants constants(RunContext& ctx) {
    const AssumptionReport rep =
        check_assumptions(ctx.config.drift, Grid1D(ctx.config.n), ctx.trials, ctx.seed);
    ctx.summary["constants"] = assumption_json(rep);
    ctx.summary["hs_norm_sq"] = experiment(ctx).noise.hs_norm_sq();
    return EstimatorConstants::from(rep);
}

// ---- subcommands -----------------------------------------------------------

void run_lemma31(RunContext& ctx) {
    const GapSuiteResult r = run_gap_suite(ctx.trials, ctx.seed);
    ctx.summary["trials"] = r.trials;
    ctx.summary["min_scaled_gap"] = r.min_scaled_gap;
    ctx.summary["worst"] = {{"dim", r.worst_dim},
                            {"r", r.worst_r},
                            {"scale", r.worst_scale},
                            {"distribution", r.worst_distribution}};
    add(ctx, "lemma31_gap", r.passed, "min scaled gap " + fmt(r.min_scaled_gap) + " >= -1e-12");
}

void run_check_assumptions(RunContext& ctx) {
    const AssumptionReport r =
        check_assumptions(ctx.config.drift, Grid1D(ctx.config.n), ctx.trials, ctx.seed);
    ctx.summary["report"] = assumption_json(r);
    add(ctx, "weak_dissipativity", r.delta_a2 > 0.0, "delta_a2 = " + fmt(r.delta_a2));
    add(ctx, "coercivity", r.delta_a3 > 0.0 && r.k_a3 >= 0.0,
        "delta_a3 = " + fmt(r.delta_a3) + ", k_a3 = " + fmt(r.k_a3));
    add(ctx, "boundedness", r.k_a4 >= 0.0 && std::isfinite(r.k_a4), "k_a4 = " + fmt(r.k_a4));
}

void run_simulate(RunContext& ctx) {
    const Experiment ex = experiment(ctx);
    const double T = ctx.config.T.value_or(1.0);
    RngStream stream = rng_substream(ctx.seed, 0);
    ctx.summary["T"] = T;
    if (ctx.config.starts.size() >= 2) {
        const auto c = simulate_coupled(ex.spec, ex.grid, ex.cfg, ex.noise, config_start(ctx.config, 0),
                                        config_start(ctx.config, 1), T, stream);
        write_table(ctx, "simulate.csv", coupled_table(c));
        std::size_t bad = 0;
        for (std::size_t k = 1; k < c.distance.size(); ++k) {
            if (c.distance[k] > c.distance[k - 1] * (1.0 + 1e-8) + 10.0 * ex.cfg.newton_tol) ++bad;
        }
        ctx.summary["steps"] = c.distance.size() - 1;
        ctx.summary["final_distance"] = c.distance.back();
        add(ctx, "coupling_contraction", bad == 0, std::to_string(bad) + " expanding steps");
    } else {
        const auto p = simulate_path(ex.spec, ex.grid, ex.cfg, ex.noise, config_start(ctx.config, 0), T, stream);
        write_table(ctx, "simulate.csv", path_table(p));
        ctx.summary["steps"] = p.times.size() - 1;
        ctx.summary["final_h_norm_sq"] = p.h_norm_sq.back();
        add(ctx, "simulation", true, std::to_string(p.times.size() - 1) + " steps");
    }
}

void run_decay(RunContext& ctx) {
    require_starts(ctx, 2);
    const auto c = constants(ctx);
    const DecayReport r = decay_report(experiment(ctx), c, config_start(ctx.config, 0),
                                       config_start(ctx.config, 1), time_grid_or(ctx, kDecayGrid), ctx.paths);
    write_table(ctx, "decay.csv", decay_table(r));
    ctx.summary["n_paths"] = r.n_paths;
    ctx.summary["raw_violations"] = r.raw_violations;
    ctx.summary["worst_margin"] = r.worst_margin;
    ctx.summary["worst_tol"] = r.worst_tol;
    ctx.summary["mean_nonincreasing"] = r.mean_nonincreasing;
    std::size_t tol_violations = 0;
    for (const auto& row : r.rows) tol_violations += row.pathwise_violations;
    add(ctx, "decay_bound", r.all_pass, "mean + 2 se <= explicit bound at every t");
    add(ctx, "pathwise_decay", tol_violations == 0,
        std::to_string(tol_violations) + " margins below -tol_dt");
}

void run_moments(RunContext& ctx) {
    const auto c = constants(ctx);
    const MomentReport r = moment_report(experiment(ctx), c, config_start(ctx.config, 0),
                                         time_grid_or(ctx, kMomentGrid), ctx.paths);
    write_table(ctx, "moments.csv", moment_table(r));
    ctx.summary["n_paths"] = r.n_paths;
    add(ctx, "moment_bound", r.all_pass, "mean - 2 se <= bound at every t");
}

void run_semigroup(RunContext& ctx) {
    require_starts(ctx, 2);
    const SemigroupReport r =
        semigroup_report(experiment(ctx), config_start(ctx.config, 0), config_start(ctx.config, 1),
                         default_functional_bank(), time_grid_or(ctx, kDecayGrid), ctx.paths);
    write_table(ctx, "semigroup.csv", semigroup_table(r));
    json fits = json::array();
    for (const auto& f : r.fits) {
        fits.push_back({{"functional", f.functional}, {"c_hat", f.c_hat},
                        {"c_hat_refined", f.c_hat_refined}, {"stable", f.stable}});
    }
    ctx.summary["fits"] = fits;
    add(ctx, "semigroup_constant", r.all_stable, "fitted constants finite and stable within 2x");
}

InvariantReport invariant(RunContext& ctx, const EstimatorConstants& c, double T) {
    std::vector<Field> starts;
    for (std::size_t i = 0; i < ctx.config.starts.size(); ++i) starts.push_back(config_start(ctx.config, i));
    InvariantOptions options;
    options.snapshot_stride = ctx.config.snapshot_stride;
    return invariant_report(experiment(ctx), c, T, starts, default_functional_bank(), options);
}

void run_invariant(RunContext& ctx) {
    const auto c = constants(ctx);
    const InvariantReport r = invariant(ctx, c, ctx.config.T.value_or(400.0));
    write_table(ctx, "invariant.csv", invariant_table(r));
    write_table(ctx, "invariant_discrepancy.csv", discrepancy_table(r));
    const auto& last = r.checkpoints.back();
    ctx.summary["T"] = r.T;
    ctx.summary["bound"] = r.bound;
    ctx.summary["mu_v_alpha"] = last.mu_v_alpha[0];
    add(ctx, "invariant_moment_bound", r.bound_pass,
        "mu_T(|.|_V^alpha) = " + fmt(last.mu_v_alpha[0]) + " <= 1.1 x " + fmt(r.bound));
    if (r.checkpoints.size() >= 2 && ctx.config.starts.size() >= 2) {
        const auto& first = r.checkpoints.front();
        const bool shrank = last.discrepancy <= 0.25 * first.discrepancy;
        ctx.summary["discrepancy_first"] = first.discrepancy;
        ctx.summary["discrepancy_last"] = last.discrepancy;
        add(ctx, "uniqueness_diagnostic", shrank,
            "Delta(" + fmt(last.T) + ") = " + fmt(last.discrepancy) + " vs 0.25 x Delta(" +
                fmt(first.T) + ") = " + fmt(0.25 * first.discrepancy),
            true);
    }
}

void run_ergodic_rate(RunContext& ctx) {
    const auto c = constants(ctx);
    const auto grid = time_grid_or(ctx, kDecayGrid);
    const double T = ctx.config.T.value_or(std::max(400.0, 10.0 * grid.back()));
    if (T < 10.0 * grid.back()) throw ConfigError("experiment.T must be >= 10 x max(time_grid)");
    // The reference run must cover the Hoelder bank if the drift routes to it.
    std::vector<TestFunctional> bank = ergodic_bank(ctx.config.drift, default_functional_bank());
    std::vector<Field> starts{config_start(ctx.config, 0)};
    InvariantOptions options;
    options.snapshot_stride = ctx.config.snapshot_stride;
    const InvariantReport inv = invariant_report(experiment(ctx), c, T, starts, bank, options);
    const ErgodicReport r = ergodic_rate_report(experiment(ctx), config_start(ctx.config, 0),
                                                default_functional_bank(), grid, ctx.paths,
                                                stationary_reference(inv));
    write_table(ctx, "ergodic_rate.csv", ergodic_table(r));
    json fits = json::array();
    bool finite = true, converged = true;
    for (const auto& f : r.fits) {
        fits.push_back({{"functional", f.functional}, {"c_hat", f.c_hat}, {"slope", f.slope},
                        {"converged", f.converged}});
        finite = finite && std::isfinite(f.c_hat);
        converged = converged && f.converged;
    }
    ctx.summary["fits"] = fits;
    ctx.summary["holder_case"] = r.holder_case;
    ctx.summary["reference_T"] = inv.T;
    if (!r.warning.empty()) ctx.summary["warning"] = r.warning;
    add(ctx, "ergodic_constant", finite, "fitted constants finite");
    add(ctx, "ergodic_convergence", converged, "largest-t estimate within 2 se of the stationary value", true);
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "", {"equation", "grid", "integrator", "noise", "experiment"});
    Config cfg;

    const json& eq = block(root, "equation");
    reject_unknown(eq, "equation", {"kind", "p", "r", "epsilon"});
    if (!eq.contains("kind") || !eq.at("kind").is_string()) {
        throw ConfigError("equation.kind is required (\"p_laplace\" or \"fast_diffusion\")");
    }
    const std::string kind = eq.at("kind").get<std::string>();
    const double eps = number(eq, "equation", "epsilon").value_or(kDefaultEpsilon);
    if (kind == "p_laplace") {
        if (eq.contains("r")) throw ConfigError("equation.r does not apply to kind p_laplace");
        const auto p = number(eq, "equation", "p");
        if (!p) throw ConfigError("equation.p is required for kind p_laplace");
        cfg.drift = validated("equation", [&] { return DriftSpec::p_laplace(*p, eps); });
    } else if (kind == "fast_diffusion") {
        if (eq.contains("p")) throw ConfigError("equation.p does not apply to kind fast_diffusion");
        const auto r = number(eq, "equation", "r");
        if (!r) throw ConfigError("equation.r is required for kind fast_diffusion");
        cfg.drift = validated("equation", [&] { return DriftSpec::fast_diffusion(*r, eps); });
    } else {
        throw ConfigError("equation.kind must be \"p_laplace\" or \"fast_diffusion\", got \"" + kind + "\"");
    }

    const json& grid = block(root, "grid");
    reject_unknown(grid, "grid", {"n"});
    cfg.n = count(grid, "grid", "n").value_or(31);
    if (cfg.n < 1) throw ConfigError("grid.n must be >= 1");

    const json& in = block(root, "integrator");
    reject_unknown(in, "integrator", {"dt", "newton_tol", "newton_max_iter"});
    cfg.integrator.dt = number(in, "integrator", "dt").value_or(cfg.integrator.dt);
    cfg.integrator.newton_tol = number(in, "integrator", "newton_tol").value_or(cfg.integrator.newton_tol);
    cfg.integrator.newton_max_iter =
        static_cast<int>(count(in, "integrator", "newton_max_iter").value_or(cfg.integrator.newton_max_iter));
    validated("integrator", [&] { cfg.integrator.validate(); return 0; });

    const json& nz = block(root, "noise");
    reject_unknown(nz, "noise", {"sigma", "q", "k_modes", "seed"});
    cfg.noise.sigma = number(nz, "noise", "sigma").value_or(cfg.noise.sigma);
    cfg.noise.q = number(nz, "noise", "q").value_or(cfg.noise.q);
    cfg.noise.k_modes = count(nz, "noise", "k_modes").value_or(cfg.noise.k_modes);
    cfg.noise.seed = count(nz, "noise", "seed").value_or(cfg.noise.seed);
    validated("noise", [&] { return noise_build(cfg.noise, Grid1D(cfg.n), cfg.drift.space_pair()); });

    const json& ex = block(root, "experiment");
    reject_unknown(ex, "experiment", {"report", "time_grid", "n_paths", "T", "starts", "snapshot_stride"});
    if (ex.contains("report")) {
        if (!ex.at("report").is_string()) throw ConfigError("experiment.report must be a string");
        cfg.report = ex.at("report").get<std::string>();
    }
    if (ex.contains("time_grid")) {
        auto grid_values = number_list(ex.at("time_grid"), "experiment.time_grid");
        if (grid_values.empty()) throw ConfigError("experiment.time_grid must not be empty");
        for (std::size_t i = 0; i < grid_values.size(); ++i) {
            if (!(grid_values[i] >= 0.0) || (i > 0 && !(grid_values[i] > grid_values[i - 1]))) {
                throw ConfigError("experiment.time_grid must be non-negative and strictly increasing");
            }
        }
        cfg.time_grid = grid_values;
    }
    cfg.n_paths = count(ex, "experiment", "n_paths").value_or(cfg.n_paths);
    if (cfg.n_paths < 1) throw ConfigError("experiment.n_paths must be >= 1");
    cfg.T = number(ex, "experiment", "T");
    if (cfg.T && !(*cfg.T >= 0.0)) throw ConfigError("experiment.T must be >= 0");
    cfg.snapshot_stride = number(ex, "experiment", "snapshot_stride").value_or(cfg.snapshot_stride);
    if (!(cfg.snapshot_stride > 0.0)) throw ConfigError("experiment.snapshot_stride must be > 0");
    if (ex.contains("starts")) {
        const json& s = ex.at("starts");
        if (!s.is_array() || s.empty()) throw ConfigError("experiment.starts must be a non-empty array of arrays");
        cfg.starts.clear();
        for (const auto& coeffs : s) cfg.starts.push_back(number_list(coeffs, "experiment.starts entries"));
    }
    for (const auto& coeffs : cfg.starts) {
        if (coeffs.size() > cfg.n) throw ConfigError("experiment.starts entry has more coefficients than grid.n");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

Field config_start(const Config& config, std::size_t index) {
    if (index >= config.starts.size()) throw ConfigError("experiment.starts has no entry " + std::to_string(index));
    return from_modes(config.starts[index], Grid1D(config.n));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical lab for weakly dissipative stochastic evolution equations", "spde_lab"};
    app.require_subcommand(1, 1);

    struct Flags {
        std::string config;
        std::string out = ".";
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> paths;
        std::optional<std::size_t> trials;
    } flags;

    const std::vector<std::pair<const char*, const char*>> commands{
        {"lemma31", "Randomized suite for the scaled-power vector inequality"},
        {"check-assumptions", "Estimate the dissipativity, coercivity and boundedness constants"},
        {"simulate", "Simulate one path, or a coupled pair when two starts are configured"},
        {"decay", "Coupled Monte Carlo against the explicit decay bound"},
        {"moments", "Monte Carlo against the energy moment bound"},
        {"semigroup", "Lipschitz estimate of the transition semigroup"},
        {"invariant", "Occupation-measure bound and two-start discrepancy"},
        {"ergodic-rate", "Convergence of P_t F(x0) to the stationary value"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output directory (default .)");
        sub->add_option("--seed", flags.seed, "Seed; overrides noise.seed");
        sub->add_option("--paths", flags.paths, "Monte-Carlo paths; overrides experiment.n_paths");
        sub->add_option("--trials", flags.trials, "Checker samples (suite trials for lemma31)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return 0;
        err << app.help();
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunContext ctx;
    try {
        if (!flags.config.empty()) {
            ctx.config = load_config(flags.config);
        } else if (command != "lemma31") {
            throw ConfigError("--config is required for " + command);
        }
        if (ctx.config.report && *ctx.config.report != command) {
            throw ConfigError("experiment.report is \"" + *ctx.config.report + "\" but the subcommand is " + command);
        }
        ctx.seed = flags.seed.value_or(ctx.config.noise.seed);
        ctx.trials = flags.trials.value_or(command == "lemma31" ? 100000 : 10000);
        ctx.paths = flags.paths.value_or(ctx.config.n_paths);
        if (ctx.trials == 0) throw ConfigError("--trials must be >= 1");
        if (ctx.paths == 0) throw ConfigError("--paths must be >= 1");
        ctx.out_dir = flags.out;
        std::error_code ec;
        std::filesystem::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory '" + flags.out + "': " + ec.message());

        ctx.summary["subcommand"] = command;
        ctx.summary["seed"] = ctx.seed;
        if (command != "lemma31") {
            ctx.summary["equation"] = equation_json(ctx.config.drift);
            ctx.summary["grid"] = {{"n", ctx.config.n}};
        }

        if (command == "lemma31") run_lemma31(ctx);
        else if (command == "check-assumptions") run_check_assumptions(ctx);
        else if (command == "simulate") run_simulate(ctx);
        else if (command == "decay") run_decay(ctx);
        else if (command == "moments") run_moments(ctx);
        else if (command == "semigroup") run_semigroup(ctx);
        else if (command == "invariant") run_invariant(ctx);
        else run_ergodic_rate(ctx);

        bool hard_fail = false;
        json criteria = json::object();
        for (const auto& c : ctx.criteria) {
            const char* tag = c.pass ? "PASS" : (c.soft ? "WARN" : "FAIL");
            out << tag << ' ' << c.name << ": " << c.detail << '\n';
            criteria[c.name] = {{"pass", c.pass}, {"level", c.soft ? "soft" : "hard"}};
            hard_fail = hard_fail || (!c.pass && !c.soft);
        }
        ctx.summary["criteria"] = criteria;
        std::string file = command;
        for (char& ch : file) ch = ch == '-' ? '_' : ch;
        write_text(ctx.out_dir / (file + ".json"), ctx.summary.dump(2) + "\n");
        return hard_fail ? 1 : 0;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace spde_lab
