#include "pnp/rng.hpp"

#include <vector>

namespace pnp {

Rng substream(std::uint64_t seed, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

RealVector uniform_vector(Rng &rng, std::size_t dim)
{
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(dim);
  for (auto &x : out) {
    x = dist(rng);
  }
  return RealVector(std::move(out));
}

ImageGrid uniform_image(Rng &rng, ImageShape shape)
{
  return ImageGrid(shape, uniform_vector(rng, shape.size()));
}

RealVector gaussian_vector(Rng &rng, std::size_t dim, double stddev)
{
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> out(dim);
  for (auto &x : out) {
    x = stddev > 0.0 ? dist(rng) : 0.0;
  }
  return RealVector(std::move(out));
}

} // namespace pnp
