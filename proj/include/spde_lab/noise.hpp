#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spde_lab/function_space.hpp"
#include "spde_lab/random.hpp"

namespace spde_lab {

/// Spectral description of the diagonal Hilbert-Schmidt operator B:
/// B e_k = sigma k^{-q} e_k for the first k_modes Laplacian eigenmodes.
struct NoiseSpec {
    double sigma = 0.1;
    double q = 1.0;
    std::size_t k_modes = 16;
    std::uint64_t seed = 0;

    void validate() const;
};

class NoiseModel {
public:
    NoiseModel(const NoiseSpec& spec, const Grid1D& grid, const SpacePair& sp);

    const NoiseSpec& spec() const noexcept { return spec_; }
    const Grid1D& grid() const noexcept { return grid_; }
    /// b_1, ..., b_{k_modes}
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    const std::vector<Field>& modes() const noexcept { return modes_; }
    /// ||B||_HS^2 in the active H norm.
    double hs_norm_sq() const noexcept { return hs_norm_sq_; }
    bool is_zero() const noexcept;

private:
    NoiseSpec spec_;
    Grid1D grid_;
    std::vector<double> coefficients_;
    std::vector<Field> modes_;
    double hs_norm_sq_ = 0.0;
};

NoiseModel noise_build(const NoiseSpec& spec, const Grid1D& grid, const SpacePair& sp);

/// B (W_{t+dt} - W_t) = sqrt(dt) sum_k b_k zeta_k e_k. Draws exactly
/// k_modes normals from `stream`, in mode order.
Field noise_increment(const NoiseModel& model, double dt, RngStream& stream);

}  // namespace spde_lab
