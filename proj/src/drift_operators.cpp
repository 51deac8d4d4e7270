#include "spde_lab/drift_operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>

#include "spde_lab/errors.hpp"

namespace spde_lab {

namespace {

constexpr std::array<double, 3> kAmplitudes{0.1, 1.0, 10.0};

/// Exponent m of the scalar map s -> |s|^{m-1} s.
double map_exponent(const DriftSpec& spec) noexcept {
    switch (spec.kind()) {
        case DriftKind::PLaplace: return spec.exponent() - 1.0;
        case DriftKind::FastDiffusion: return spec.exponent();
        case DriftKind::LinearHeat: return 1.0;
    }
    return 1.0;
}

std::vector<double> mapped(const DriftSpec& spec, std::span<const double> s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = scalar_map(spec, s[i]);
    return out;
}

/// min_c (h sum_j |g_j - c|^q)^{1/q}: the norm of g in l^q modulo constants.
double quotient_norm(std::span<const double> g, double q, double h) {
    const auto [lo_it, hi_it] = std::minmax_element(g.begin(), g.end());
    double lo = *lo_it;
    double hi = *hi_it;
    // slope(c) = sum_j |g_j - c|^{q-1} sign(g_j - c) is decreasing in c.
    auto slope = [&](double c) {
        double sum = 0.0;
        for (double v : g) {
            const double d = v - c;
            sum += std::copysign(std::pow(std::abs(d), q - 1.0), d);
        }
        return sum;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double c = 0.5 * (lo + hi);
    double sum = 0.0;
    for (double v : g) sum += std::pow(std::abs(v - c), q);
    return std::pow(h * sum, 1.0 / q);
}

}  // namespace

DriftSpec::DriftSpec(DriftKind kind, double exponent, double epsilon)
    : kind_(kind), exponent_(exponent), epsilon_(epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ParameterError("regularization epsilon must be >= 0");
    }
}

DriftSpec DriftSpec::p_laplace(double p, double epsilon) {
    if (!(p > 1.0 && p < 2.0)) throw ParameterError("p must lie in (1,2)");
    return {DriftKind::PLaplace, p, epsilon};
}

DriftSpec DriftSpec::fast_diffusion(double r, double epsilon) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("r must lie in (0,1)");
    return {DriftKind::FastDiffusion, r, epsilon};
}

DriftSpec DriftSpec::linear_heat() { return {DriftKind::LinearHeat, 2.0, 0.0}; }

double DriftSpec::alpha() const noexcept {
    switch (kind_) {
        case DriftKind::PLaplace: return exponent_;
        case DriftKind::FastDiffusion: return exponent_ + 1.0;
        case DriftKind::LinearHeat: return 2.0;
    }
    return 2.0;
}

double DriftSpec::beta() const noexcept {
    switch (kind_) {
        case DriftKind::PLaplace: return 2.0 - exponent_;
        case DriftKind::FastDiffusion: return 1.0 - exponent_;
        case DriftKind::LinearHeat: return 0.0;
    }
    return 0.0;
}

SpacePair DriftSpec::space_pair() const {
    switch (kind_) {
        case DriftKind::PLaplace: return SpacePair::p_laplace(exponent_);
        case DriftKind::FastDiffusion: return SpacePair::fast_diffusion(exponent_);
        case DriftKind::LinearHeat: return SpacePair::linear_heat();
    }
    return SpacePair::linear_heat();
}

DriftSpec DriftSpec::with_epsilon(double epsilon) const {
    if (kind_ == DriftKind::LinearHeat) return *this;
    return {kind_, exponent_, epsilon};
}

double scalar_map(const DriftSpec& spec, double s) noexcept {
    if (spec.kind() == DriftKind::LinearHeat) return s;
    const double m = map_exponent(spec);
    const double eps = spec.epsilon();
    if (eps == 0.0) {
        if (s == 0.0) return 0.0;
        return std::copysign(std::pow(std::abs(s), m), s);
    }
    return std::pow(s * s + eps * eps, 0.5 * (m - 1.0)) * s;
}

std::pair<double, double> scalar_map_with_derivative(const DriftSpec& spec, double s) noexcept {
    if (spec.kind() == DriftKind::LinearHeat) return {s, 1.0};
    const double m = map_exponent(spec);
    const double eps = spec.epsilon();
    if (eps == 0.0) {
        if (s == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
        const double a = std::pow(std::abs(s), m - 1.0);
        return {a * s, m * a};
    }
    const double q = s * s + eps * eps;
    const double a = std::pow(q, 0.5 * (m - 1.0));
    return {a * s, a * (m * s * s + eps * eps) / q};
}

double scalar_map_inverse(const DriftSpec& spec, double w) noexcept {
    if (spec.kind() == DriftKind::LinearHeat || w == 0.0) return w;
    const double m = map_exponent(spec);
    const double eps = spec.epsilon();
    const double a = std::abs(w);
    const double closed = std::pow(a, 1.0 / m);
    if (eps == 0.0) return std::copysign(closed, w);
    // The map is odd, increasing and concave on s > 0, and lies below both
    // s^m and eps^{m-1} s. The larger of the two preimages is a lower bound,
    // so one Newton step overshoots and the rest descend monotonically.
    double s = std::max(closed, a * std::pow(eps, 1.0 - m));
    for (int iter = 0; iter < 100; ++iter) {
        const double q = s * s + eps * eps;
        const double c = std::pow(q, 0.5 * (m - 1.0));
        const double f = c * s - a;
        const double slope = c * (m * s * s + eps * eps) / q;
        const double next = s - f / slope;
        if (!(next > 0.0)) break;
        const double change = std::abs(next - s);
        s = next;
        if (change <= 1e-15 * s) break;
    }
    return std::copysign(s, w);
}

Field drift_apply(const DriftSpec& spec, const Field& u) {
    if (spec.kind() == DriftKind::FastDiffusion) {
        return laplacian_apply(Field(u.grid(), mapped(spec, u.values())));
    }
    const auto flux = mapped(spec, differences(u));
    const double inv_h = 1.0 / u.grid().h();
    Field out(u.grid());
    for (std::size_t m = 0; m < u.size(); ++m) out[m] = (flux[m + 1] - flux[m]) * inv_h;
    return out;
}

void drift_jacobian(const DriftSpec& spec, const Field& u, std::span<double> lower,
                    std::span<double> diag, std::span<double> upper) {
    const std::size_t n = u.size();
    if (lower.size() != n || diag.size() != n || upper.size() != n) {
        throw DimensionError("jacobian buffers do not match field size");
    }
    const double inv_h2 = 1.0 / (u.grid().h() * u.grid().h());
    if (spec.kind() == DriftKind::FastDiffusion) {
        std::vector<double> slope(n);
        for (std::size_t m = 0; m < n; ++m) slope[m] = scalar_map_with_derivative(spec, u[m]).second;
        for (std::size_t m = 0; m < n; ++m) {
            lower[m] = m > 0 ? slope[m - 1] * inv_h2 : 0.0;
            upper[m] = m + 1 < n ? slope[m + 1] * inv_h2 : 0.0;
            diag[m] = -2.0 * slope[m] * inv_h2;
        }
        return;
    }
    const auto d = differences(u);
    std::vector<double> slope(n + 1);
    for (std::size_t j = 0; j <= n; ++j) slope[j] = scalar_map_with_derivative(spec, d[j]).second;
    for (std::size_t m = 0; m < n; ++m) {
        lower[m] = m > 0 ? slope[m] * inv_h2 : 0.0;
        upper[m] = m + 1 < n ? slope[m + 1] * inv_h2 : 0.0;
        diag[m] = -(slope[m] + slope[m + 1]) * inv_h2;
    }
}

double pairing(const DriftSpec& spec, const Field& u, const Field& w) {
    require_same_grid(u, w);
    const double h = u.grid().h();
    switch (spec.kind()) {
        case DriftKind::PLaplace: {
            const auto du = differences(u);
            const auto dw = differences(w);
            double sum = 0.0;
            for (std::size_t j = 0; j < du.size(); ++j) sum += scalar_map(spec, du[j]) * dw[j];
            return -h * sum;
        }
        case DriftKind::FastDiffusion: {
            double sum = 0.0;
            for (std::size_t m = 0; m < u.size(); ++m) sum += scalar_map(spec, u[m]) * w[m];
            return -h * sum;
        }
        case DriftKind::LinearHeat: return inner_l2(laplacian_apply(u), w);
    }
    return 0.0;
}

double norm_v(const DriftSpec& spec, const Field& u) { return spec.space_pair().norm_v(u); }

double norm_h(const DriftSpec& spec, const Field& u) { return norm_h(u, spec.space_pair()); }

double dual_norm_vstar(const DriftSpec& spec, const Field& u) {
    const double alpha = spec.alpha();
    if (spec.epsilon() == 0.0 || spec.kind() == DriftKind::LinearHeat) {
        return std::pow(norm_v(spec, u), alpha - 1.0);
    }
    const double h = u.grid().h();
    const double conjugate = alpha / (alpha - 1.0);
    if (spec.kind() == DriftKind::FastDiffusion) {
        // V = L^{r+1} is the whole nodal space: the dual norm is the
        // conjugate-exponent norm of phi_eps(u).
        double sum = 0.0;
        for (double v : u.values()) sum += std::pow(std::abs(scalar_map(spec, v)), conjugate);
        return std::pow(h * sum, 1.0 / conjugate);
    }
    // w -> Dw maps V isometrically onto the zero-sum vectors of l^p(n+1), so
    // the dual norm of w -> -h sum_j Phi(D_j u) D_j w is the l^{p'} distance
    // of Phi(Du) to the constants.
    return quotient_norm(mapped(spec, differences(u)), conjugate, h);
}

GaussianFieldSampler::GaussianFieldSampler(const Grid1D& grid) : grid_(grid) {
    modes_.reserve(grid.n());
    for (std::size_t k = 1; k <= grid.n(); ++k) modes_.push_back(eigenpair(k, grid).mode);
}

Field GaussianFieldSampler::draw(double amplitude, RngStream& rng) const {
    Field u(grid_);
    auto dst = u.values();
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const double c = amplitude * rng.normal() / static_cast<double>(k + 1);
        auto src = modes_[k].values();
        for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += c * src[m];
    }
    return u;
}

Field GaussianFieldSampler::draw_mixed(RngStream& rng) const {
    const auto pick = std::min<std::size_t>(2, static_cast<std::size_t>(3.0 * rng.uniform()));
    return draw(kAmplitudes[pick], rng);
}

double sampled_dual_norm(const DriftSpec& spec, const Field& u, std::size_t n_samples,
                         std::uint64_t seed) {
    const GaussianFieldSampler sampler(u.grid());
    double best = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng = rng_substream(seed, i);
        const Field w = sampler.draw_mixed(rng);
        const double wn = norm_v(spec, w);
        if (wn == 0.0) continue;
        best = std::max(best, std::abs(pairing(spec, u, w)) / wn);
    }
    return best;
}

PairSampler default_pair_sampler(const Grid1D& grid) {
    auto sampler = std::make_shared<const GaussianFieldSampler>(grid);
    return [sampler](std::size_t index, RngStream& rng) -> std::pair<Field, Field> {
        if (index % 2 == 0) {
            Field v1 = sampler->draw_mixed(rng);
            Field v2 = sampler->draw_mixed(rng);
            return {std::move(v1), std::move(v2)};
        }
        const auto pick = std::min<std::size_t>(2, static_cast<std::size_t>(3.0 * rng.uniform()));
        const double amplitude = kAmplitudes[pick];
        Field v1 = sampler->draw(amplitude, rng);
        Field v2 = v1 + sampler->draw(1e-3 * amplitude, rng);
        return {std::move(v1), std::move(v2)};
    };
}

A2Estimate check_a2(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    const PairSampler& sampler, std::uint64_t seed) {
    if (n_samples == 0) throw ParameterError("check_a2 needs at least one sample");
    const SpacePair sp = spec.space_pair();
    const double beta = spec.beta();

    A2Estimate est;
    est.delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng = rng_substream(seed, i);
        auto [v1, v2] = sampler(i, rng);
        if (!(v1.grid() == grid) || !(v2.grid() == grid)) {
            throw DimensionError("sampler produced a field on the wrong grid");
        }
        const Field w = v1 - v2;
        const double w_h = norm_h(w, sp);
        if (w_h < 1e-9 * (1.0 + norm_h(v1, sp) + norm_h(v2, sp))) {
            ++est.skipped;
            continue;
        }
        const double n1 = sp.norm_v(v1);
        const double n2 = sp.norm_v(v2);
        const double weight =
            spec.kind() == DriftKind::LinearHeat ? 1.0 : std::pow(n1, beta) + std::pow(n2, beta);
        const double gap = pairing(spec, v1, w) - pairing(spec, v2, w);
        const double ratio = -2.0 * gap * weight / (w_h * w_h);
        ++est.used;
        if (ratio < est.delta) {
            est.delta = ratio;
            est.worst = {i, n1, n2, w_h, ratio};
        }
    }
    if (est.used == 0) throw DegenerateSampleError("check_a2: every sampled pair was degenerate");
    return est;
}

A2Estimate check_a2(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    std::uint64_t seed) {
    return check_a2(spec, grid, n_samples, default_pair_sampler(grid), seed);
}

A3Estimate check_a3(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                    std::uint64_t seed) {
    if (n_samples == 0) throw ParameterError("check_a3 needs at least one sample");
    const GaussianFieldSampler sampler(grid);
    const double alpha = spec.alpha();
    const bool exact = spec.epsilon() == 0.0 || spec.kind() == DriftKind::LinearHeat;

    std::vector<double> energy(n_samples);    // ||u||_V^alpha
    std::vector<double> quadratic(n_samples);  // 2 pairing(u,u)
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng = rng_substream(seed, i);
        const Field u = sampler.draw(kAmplitudes[i % kAmplitudes.size()], rng);
        energy[i] = std::pow(norm_v(spec, u), alpha);
        quadratic[i] = 2.0 * pairing(spec, u, u);
        if (exact) {
            const double defect = std::abs(quadratic[i] + 2.0 * energy[i]);
            if (defect > 1e-10 * std::max(2.0 * energy[i], std::numeric_limits<double>::min())) {
                throw ConsistencyError("2 pairing(u,u) != -2 ||u||_V^alpha at sample " +
                                       std::to_string(i));
            }
        }
    }
    if (exact) return {2.0, 0.0};

    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (energy[i] >= 1.0) delta = std::min(delta, -quadratic[i] / energy[i]);
    }
    if (!std::isfinite(delta)) {
        throw DegenerateSampleError("check_a3: no sample with ||u||_V >= 1");
    }
    double k = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) k = std::max(k, delta * energy[i] + quadratic[i]);
    return {delta, k};
}

double check_a4(const DriftSpec& spec, const Grid1D& grid, std::size_t n_samples,
                std::uint64_t seed) {
    const GaussianFieldSampler sampler(grid);
    const double alpha = spec.alpha();
    double k = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        RngStream rng = rng_substream(seed, i);
        const Field u = sampler.draw(kAmplitudes[i % kAmplitudes.size()], rng);
        const double ratio = dual_norm_vstar(spec, u) / (1.0 + std::pow(norm_v(spec, u), alpha - 1.0));
        k = std::max(k, ratio);
    }
    return k;
}

double check_a1(const DriftSpec& spec, const Field& u, const Field& v, const Field& w,
                std::span<const double> lambda_grid) {
    require_same_grid(u, v);
    require_same_grid(u, w);
    double modulus = 0.0;
    double previous = 0.0;
    for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
        const double value = pairing(spec, u + lambda_grid[l] * v, w);
        if (l > 0) modulus = std::max(modulus, std::abs(value - previous));
        previous = value;
    }
    return modulus;
}

AssumptionReport check_assumptions(const DriftSpec& spec, const Grid1D& grid,
                                   std::size_t n_samples, std::uint64_t seed) {
    const A2Estimate a2 = check_a2(spec, grid, n_samples, seed);
    const A3Estimate a3 = check_a3(spec, grid, n_samples, seed + 1);
    AssumptionReport report;
    report.delta_a2 = a2.delta;
    report.delta_a3 = a3.delta;
    report.k_a3 = a3.k;
    report.k_a4 = check_a4(spec, grid, n_samples, seed + 2);
    report.samples = n_samples;
    report.worst_pair = a2.worst;
    return report;
}

}  // namespace spde_lab
