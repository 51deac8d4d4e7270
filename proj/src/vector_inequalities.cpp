#include "spde_lab/vector_inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spde_lab/errors.hpp"
#include "spde_lab/random.hpp"

namespace spde_lab {

namespace {

double euclidean_norm(std::span<const double> a) {
    double sum = 0.0;
    for (double v : a) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace

PowerMapParams::PowerMapParams(double r) : r_(r) {
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("power map exponent r must lie in (0,1]");
}

std::vector<double> phi_power(std::span<const double> a, PowerMapParams params) {
    std::vector<double> out(a.begin(), a.end());
    const double norm = euclidean_norm(a);
    if (norm == 0.0) return out;
    const double scale = std::pow(norm, params.r() - 1.0);
    for (double& v : out) v *= scale;
    return out;
}

double lemma31_gap(std::span<const double> a, std::span<const double> b, PowerMapParams params) {
    if (a.size() != b.size()) throw DimensionError("lemma31_gap operands differ in length");
    const double r = params.r();
    const double larger = std::max(euclidean_norm(a), euclidean_norm(b));
    if (larger < 1e-300) return 0.0;

    const auto pa = phi_power(a, params);
    const auto pb = phi_power(b, params);
    double lhs = 0.0;
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        lhs += (pa[i] - pb[i]) * d;
        diff_sq += d * d;
    }
    return lhs - r * diff_sq * std::pow(larger, r - 1.0);
}

GapSuiteResult run_gap_suite(std::size_t trials, std::uint64_t seed) {
    constexpr std::array<std::size_t, 4> dims{1, 2, 8, 64};
    constexpr std::array<double, 6> exponents{0.1, 0.25, 0.5, 0.75, 0.9, 1.0};

    GapSuiteResult result;
    result.trials = trials;
    result.min_scaled_gap = std::numeric_limits<double>::infinity();

    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng = rng_substream(seed, t);
        const std::size_t dim = dims[t % dims.size()];
        const double r = exponents[(t / dims.size()) % exponents.size()];
        const int distribution = static_cast<int>((t / (dims.size() * exponents.size())) % 3);
        const double magnitude = std::pow(10.0, 6.0 * rng.uniform() - 3.0);

        a.assign(dim, 0.0);
        b.assign(dim, 0.0);
        switch (distribution) {
            case 0:
                for (std::size_t i = 0; i < dim; ++i) {
                    a[i] = magnitude * rng.normal();
                    b[i] = magnitude * rng.normal();
                }
                break;
            case 1:
                // Cauchy entries: ratio of independent normals.
                for (std::size_t i = 0; i < dim; ++i) {
                    a[i] = magnitude * rng.normal() / rng.normal();
                    b[i] = magnitude * rng.normal() / rng.normal();
                }
                break;
            default: {
                const double stretch = 3.0 * rng.uniform() - 1.5;
                const double jitter = std::pow(10.0, -6.0 * rng.uniform());
                for (std::size_t i = 0; i < dim; ++i) a[i] = magnitude * rng.normal();
                for (std::size_t i = 0; i < dim; ++i) {
                    b[i] = stretch * a[i] + jitter * magnitude * rng.normal();
                }
                break;
            }
        }

        const double gap = lemma31_gap(a, b, PowerMapParams(r));
        const double larger = std::max(euclidean_norm(a), euclidean_norm(b));
        const double scale = std::pow(std::max(1.0, larger), r + 1.0);
        const double scaled = gap / scale;
        if (scaled < result.min_scaled_gap) {
            result.min_scaled_gap = scaled;
            result.worst_dim = dim;
            result.worst_r = r;
            result.worst_scale = larger;
            result.worst_distribution = distribution;
        }
    }
    if (trials == 0) result.min_scaled_gap = 0.0;
    result.passed = result.min_scaled_gap >= -1e-12;
    return result;
}

}  // namespace spde_lab
