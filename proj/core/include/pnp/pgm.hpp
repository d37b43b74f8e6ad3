#pragma once

#include "pnp/errors.hpp"
#include "pnp/image.hpp"

#include <filesystem>
#include <iosfwd>

namespace pnp {

class PgmError : public Error
{
public:
  using Error::Error;
};

/// Binary 8-bit PGM ("P5"). Samples map to [0, 1] by division by maxval,
/// which must lie in 1..255.
ImageGrid read_pgm(std::istream &in);
ImageGrid load_image(std::filesystem::path const &path);

/// Writes maxval 255, rounding half up and clamping to [0, 255].
void write_pgm(std::ostream &out, ImageGrid const &img);
void save_image(ImageGrid const &img, std::filesystem::path const &path);

} // namespace pnp
