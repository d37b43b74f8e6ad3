#pragma once

#include "pnp/errors.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace pnp {

/// Flat `key = value` settings; '#' starts a comment, blank lines are ignored.
class KeyValueConfig
{
public:
  static KeyValueConfig parse(std::istream &in);
  static KeyValueConfig load(std::filesystem::path const &path);

  bool contains(std::string const &key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(std::string const &key) const;
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

  std::string get_string(std::string const &key, std::string fallback) const;
  double get_real(std::string const &key, double fallback) const;
  std::size_t get_count(std::string const &key, std::size_t fallback) const;
  bool get_bool(std::string const &key, bool fallback) const;

  std::map<std::string, std::string> const &entries() const noexcept { return values_; }

private:
  std::map<std::string, std::string> values_;
};

} // namespace pnp
