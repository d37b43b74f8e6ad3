#include "pnp/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>

namespace pnp {

namespace {

std::string trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  auto const last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream &in)
{
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto const hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::string const body = trim(line);
    if (body.empty()) {
      continue;
    }
    auto const eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(fmt::format("config line {}: expected 'key = value'", lineno));
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      throw InvalidArgument(fmt::format("config line {}: empty key", lineno));
    }
    cfg.values_[std::move(key)] = trim(std::string_view(body).substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot read config file '{}'", path.string()));
  }
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(std::string const &key) const
{
  auto const it = values_.find(key);
  if (it == values_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::string KeyValueConfig::get_string(std::string const &key, std::string fallback) const
{
  return get(key).value_or(std::move(fallback));
}

double KeyValueConfig::get_real(std::string const &key, double fallback) const
{
  auto const v = get(key);
  if (!v) {
    return fallback;
  }
  double out = 0.0;
  auto const [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw InvalidArgument(fmt::format("config key '{}': '{}' is not a number", key, *v));
  }
  return out;
}

std::size_t KeyValueConfig::get_count(std::string const &key, std::size_t fallback) const
{
  auto const v = get(key);
  if (!v) {
    return fallback;
  }
  std::size_t out = 0;
  auto const [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw InvalidArgument(fmt::format("config key '{}': '{}' is not a nonnegative integer", key, *v));
  }
  return out;
}

bool KeyValueConfig::get_bool(std::string const &key, bool fallback) const
{
  auto const v = get(key);
  if (!v) {
    return fallback;
  }
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
    return true;
  }
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
    return false;
  }
  throw InvalidArgument(fmt::format("config key '{}': '{}' is not a boolean", key, *v));
}

} // namespace pnp
