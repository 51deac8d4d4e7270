#include "spde_lab/noise.hpp"

#include <cmath>
#include <string>

#include "spde_lab/errors.hpp"

namespace spde_lab {

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be >= 0");
    if (!(q > 0.5) || !std::isfinite(q)) throw ParameterError("q must be > 1/2");
}

NoiseModel::NoiseModel(const NoiseSpec& spec, const Grid1D& grid, const SpacePair& sp)
    : spec_(spec), grid_(grid) {
    spec.validate();
    if (spec.k_modes > grid.n()) {
        throw ParameterError("k_modes (" + std::to_string(spec.k_modes) +
                             ") exceeds grid size n (" + std::to_string(grid.n()) + ")");
    }
    coefficients_.reserve(spec.k_modes);
    modes_.reserve(spec.k_modes);
    for (std::size_t k = 1; k <= spec.k_modes; ++k) {
        const double b = spec.sigma * std::pow(static_cast<double>(k), -spec.q);
        auto [lambda, mode] = eigenpair(k, grid);
        // ||e_k||_{L2} = 1 and ||e_k||_{W^{-1,2}}^2 = 1/lambda_k.
        const double mode_norm_sq = sp.kind() == TripleKind::FastDiffusion ? 1.0 / lambda : 1.0;
        hs_norm_sq_ += b * b * mode_norm_sq;
        coefficients_.push_back(b);
        modes_.push_back(std::move(mode));
    }
}

bool NoiseModel::is_zero() const noexcept {
    for (double b : coefficients_) {
        if (b != 0.0) return false;
    }
    return true;
}

NoiseModel noise_build(const NoiseSpec& spec, const Grid1D& grid, const SpacePair& sp) {
    return NoiseModel(spec, grid, sp);
}

Field noise_increment(const NoiseModel& model, double dt, RngStream& stream) {
    if (!(dt > 0.0)) throw ParameterError("noise increment needs dt > 0");
    Field out(model.grid());
    const double root_dt = std::sqrt(dt);
    const auto& coeffs = model.coefficients();
    const auto& modes = model.modes();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double amplitude = root_dt * coeffs[k] * stream.normal();
        if (coeffs[k] == 0.0) continue;
        auto dst = out.values();
        auto src = modes[k].values();
        for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += amplitude * src[m];
    }
    return out;
}

}  // namespace spde_lab
