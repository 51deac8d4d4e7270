#pragma once

#include <cstdint>
#include <random>

namespace spde_lab {

/// Stateful generator for one simulation path.
///
/// Uniforms come from std::mt19937_64 (output fully specified by the
/// standard) using the top 53 bits. Standard normals use the Box-Muller
/// transform
///
///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
///
/// with u1 in (0,1], u2 in [0,1); z0 is returned first and z1 is cached for
/// the next call. This is the only normal sampler used in the library.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : engine_(state) {}

    /// Uniform on [0,1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// splitmix64 output finalizer.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Stream for path `path_id` under `seed`: state is
/// splitmix64_mix(seed ^ (path_id * 0x9E3779B97F4A7C15)).
RngStream rng_substream(std::uint64_t seed, std::uint64_t path_id);

}  // namespace spde_lab
