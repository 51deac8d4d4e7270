#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spde_lab {

/// Exponent r of the scaled power map a -> |a|^{r-1} a; 0 < r <= 1.
class PowerMapParams {
public:
    explicit PowerMapParams(double r);
    double r() const noexcept { return r_; }

private:
    double r_;
};

/// |a|^{r-1} a with the Euclidean norm; the zero vector maps to zero.
std::vector<double> phi_power(std::span<const double> a, PowerMapParams params);

/// <phi(a) - phi(b), a - b> - r |a-b|^2 (|a| v |b|)^{r-1}.
/// Non-negative for every a, b when 0 < r <= 1. Returns 0 when
/// |a| v |b| < 1e-300.
double lemma31_gap(std::span<const double> a, std::span<const double> b, PowerMapParams params);

struct GapSuiteResult {
    std::size_t trials = 0;
    /// min over trials of gap / max(1, |a| v |b|)^{r+1}
    double min_scaled_gap = 0.0;
    std::size_t worst_dim = 0;
    double worst_r = 0.0;
    double worst_scale = 0.0;
    /// 0 = Gaussian, 1 = heavy-tailed, 2 = near-collinear
    int worst_distribution = 0;
    bool passed = false;
};

/// Randomized property run of lemma31_gap over dims {1,2,8,64},
/// r in {0.1,0.25,0.5,0.75,0.9,1.0}, and Gaussian / heavy-tailed /
/// near-collinear draws. Passes when min_scaled_gap >= -1e-12.
GapSuiteResult run_gap_suite(std::size_t trials, std::uint64_t seed);

}  // namespace spde_lab
