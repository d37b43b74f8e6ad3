#pragma once

#include "pnp/image.hpp"
#include "pnp/vector.hpp"

#include <cstdint>
#include <random>

namespace pnp {

using Rng = std::mt19937_64;

/// Independent generator for sample `index` of a run seeded with `seed`.
Rng substream(std::uint64_t seed, std::uint64_t index);

/// i.i.d. uniform [0, 1) entries.
RealVector uniform_vector(Rng &rng, std::size_t dim);
ImageGrid uniform_image(Rng &rng, ImageShape shape);

/// i.i.d. N(0, stddev^2) entries.
RealVector gaussian_vector(Rng &rng, std::size_t dim, double stddev);

} // namespace pnp
