#include "pnp/pgm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pnp {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream &in)
{
  std::string tok;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) {
        return tok;
      }
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) {
    throw PgmError("PGM: truncated header");
  }
  return tok;
}

std::size_t header_number(std::istream &in, char const *what)
{
  std::string const tok = header_token(in);
  std::size_t value = 0;
  try {
    std::size_t used = 0;
    value = std::stoul(tok, &used);
    if (used != tok.size()) {
      throw std::invalid_argument(tok);
    }
  } catch (std::exception const &) {
    throw PgmError(fmt::format("PGM: bad {} '{}'", what, tok));
  }
  return value;
}

} // namespace

ImageGrid read_pgm(std::istream &in)
{
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') {
    throw PgmError("PGM: bad magic number (expected P5)");
  }
  std::size_t const width = header_number(in, "width");
  std::size_t const height = header_number(in, "height");
  std::size_t const maxval = header_number(in, "maxval");
  if (width == 0 || height == 0) {
    throw PgmError("PGM: zero image dimension");
  }
  if (maxval == 0 || maxval > 255) {
    throw PgmError(fmt::format("PGM: maxval {} out of range 1..255", maxval));
  }
  std::vector<unsigned char> raw(width * height);
  if (!in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw PgmError(fmt::format("PGM: truncated payload ({} of {} bytes)", in.gcount(), raw.size()));
  }
  std::vector<double> px(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] > maxval) {
      throw PgmError(fmt::format("PGM: sample {} exceeds maxval {}", raw[i], maxval));
    }
    px[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
  }
  return ImageGrid({width, height}, RealVector(std::move(px)));
}

ImageGrid load_image(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw PgmError(fmt::format("cannot open image '{}'", path.string()));
  }
  return read_pgm(in);
}

void write_pgm(std::ostream &out, ImageGrid const &img)
{
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> raw(img.shape().size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double const v = std::floor(img.pixels()[i] * 255.0 + 0.5);
    raw[i] = static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0.0, 255.0)));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void save_image(ImageGrid const &img, std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PgmError(fmt::format("cannot write image '{}'", path.string()));
  }
  write_pgm(out, img);
  if (!out) {
    throw PgmError(fmt::format("failed while writing image '{}'", path.string()));
  }
}

} // namespace pnp
