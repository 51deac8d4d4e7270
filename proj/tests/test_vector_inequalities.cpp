#include "doctest.h"

#include <cmath>
#include <vector>

#include "spde_lab/errors.hpp"
#include "spde_lab/random.hpp"
#include "spde_lab/vector_inequalities.hpp"

using namespace spde_lab;

namespace {

double norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

std::vector<double> gaussian(std::size_t dim, RngStream& rng, double scale = 1.0) {
    std::vector<double> a(dim);
    for (double& v : a) v = scale * rng.normal();
    return a;
}

}  // namespace

TEST_CASE("phi_power") {
    const std::vector<double> four{4.0};
    CHECK(phi_power(four, PowerMapParams(0.5))[0] == doctest::Approx(2.0));
    const std::vector<double> zero(5, 0.0);
    for (double v : phi_power(zero, PowerMapParams(0.3))) CHECK(v == 0.0);

    RngStream rng = rng_substream(1, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = gaussian(1 + trial % 9, rng, 5.0);
        CHECK(std::abs(norm(phi_power(a, PowerMapParams(0.3))) - std::pow(norm(a), 0.3)) <=
              1e-12 * std::max(1.0, std::pow(norm(a), 0.3)));
    }
    CHECK_THROWS_AS(PowerMapParams(0.0), ParameterError);
    CHECK_THROWS_AS(PowerMapParams(1.5), ParameterError);
}

TEST_CASE("lemma31_gap examples") {
    const std::vector<double> one{1.0};
    const std::vector<double> minus_one{-1.0};
    CHECK(lemma31_gap(one, minus_one, PowerMapParams(0.5)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lemma31_gap(one, one, PowerMapParams(0.5)) == 0.0);

    const std::vector<double> zero(3, 0.0);
    CHECK(lemma31_gap(zero, zero, PowerMapParams(0.2)) == 0.0);

    RngStream rng = rng_substream(2, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = gaussian(8, rng, 3.0);
        const auto b = gaussian(8, rng, 3.0);
        std::vector<double> d(8);
        for (std::size_t i = 0; i < 8; ++i) d[i] = a[i] - b[i];
        const double dist_sq = norm(d) * norm(d);
        CHECK(std::abs(lemma31_gap(a, b, PowerMapParams(1.0))) <= 1e-12 * dist_sq);
        CHECK(lemma31_gap(a, a, PowerMapParams(0.4)) == doctest::Approx(0.0));
    }

    const std::vector<double> two(2, 1.0);
    CHECK_THROWS_AS(lemma31_gap(one, two, PowerMapParams(0.5)), DimensionError);
}

TEST_CASE("lemma31_gap symmetry and scaling") {
    RngStream rng = rng_substream(3, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dim = 1 + trial % 16;
        const double r = 0.05 + 0.95 * rng.uniform();
        const auto a = gaussian(dim, rng, 2.0);
        const auto b = gaussian(dim, rng, 2.0);
        const PowerMapParams params(r);
        const double gap = lemma31_gap(a, b, params);
        const double scale = std::pow(std::max({1.0, norm(a), norm(b)}), r + 1.0);
        CHECK(gap >= -1e-12 * scale);
        CHECK(std::abs(gap - lemma31_gap(b, a, params)) <= 1e-12 * scale);

        const double c = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
        std::vector<double> ca(a), cb(b);
        for (double& v : ca) v *= c;
        for (double& v : cb) v *= c;
        const double expected = std::pow(c, r + 1.0) * gap;
        CHECK(std::abs(lemma31_gap(ca, cb, params) - expected) <=
              1e-10 * std::abs(expected) + 1e-13 * std::pow(c, r + 1.0) * scale);
    }
}

TEST_CASE("gap suite passes and is reproducible") {
    const GapSuiteResult a = run_gap_suite(20000, 7);
    const GapSuiteResult b = run_gap_suite(20000, 7);
    CHECK(a.passed);
    CHECK(a.min_scaled_gap >= -1e-12);
    CHECK(a.min_scaled_gap == b.min_scaled_gap);
    CHECK(a.trials == 20000);
}
