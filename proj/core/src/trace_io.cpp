#include "pnp/trace_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace pnp {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

double parse_real(std::string_view text)
{
  double value = 0.0;
  auto const *end = text.data() + text.size();
  auto const [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(fmt::format("not a number: '{}'", text));
  }
  return value;
}

void write_trace_csv(std::ostream &out, std::span<const TraceRecord> records)
{
  out << kTraceHeader << '\n';
  for (auto const &r : records) {
    out << r.iter << ',' << format_real(r.delta) << ',' << format_real(r.rho) << ',' << format_real(r.sigma) << ','
        << (r.condition ? to_string(*r.condition) : std::string_view("NA")) << ',' << format_real(r.fidelity_value)
        << '\n';
  }
}

void write_trace_csv(std::filesystem::path const &path, std::span<const TraceRecord> records)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(fmt::format("cannot write trace file '{}'", path.string()));
  }
  write_trace_csv(out, records);
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    auto const comma = line.find(',', begin);
    fields.push_back(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin));
    if (comma == std::string_view::npos) {
      break;
    }
    begin = comma + 1;
  }
  return fields;
}

} // namespace

std::vector<TraceRecord> read_trace_csv(std::istream &in)
{
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw ParseError("line 1: trace file is empty", 1);
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != kTraceHeader) {
    throw ParseError(fmt::format("line 1: expected header '{}'", kTraceHeader), 1);
  }

  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto const fields = split(line);
    if (fields.size() != 6) {
      throw ParseError(fmt::format("line {}: expected 6 fields, got {}", lineno, fields.size()), lineno);
    }
    TraceRecord r;
    try {
      auto const [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), r.iter);
      if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) {
        throw InvalidArgument(fmt::format("bad iteration number '{}'", fields[0]));
      }
      r.delta = parse_real(fields[1]);
      r.rho = parse_real(fields[2]);
      r.sigma = parse_real(fields[3]);
      r.fidelity_value = parse_real(fields[5]);
    } catch (InvalidArgument const &e) {
      throw ParseError(fmt::format("line {}: {}", lineno, e.what()), lineno);
    }
    if (fields[4] == "C1") {
      r.condition = ConditionFlag::C1;
    } else if (fields[4] == "C2") {
      r.condition = ConditionFlag::C2;
    } else if (fields[4] != "NA") {
      throw ParseError(fmt::format("line {}: condition must be C1, C2 or NA, got '{}'", lineno, fields[4]), lineno);
    }
    if (r.iter != records.size() + 1) {
      throw ParseError(fmt::format("line {}: expected iteration {}, got {}", lineno, records.size() + 1, r.iter),
                       lineno);
    }
    records.push_back(r);
  }
  return records;
}

std::vector<TraceRecord> read_trace_csv(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(fmt::format("cannot read trace file '{}'", path.string()));
  }
  return read_trace_csv(in);
}

void write_bound_csv(std::ostream &out, std::span<const double> deltas, std::span<const double> bound)
{
  if (deltas.size() != bound.size()) {
    throw DimensionError("write_bound_csv: deltas and bound differ in length");
  }
  out << kBoundHeader << '\n';
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double const margin = bound[i] > 0.0 ? deltas[i] / bound[i] : 0.0;
    out << (i + 1) << ',' << format_real(deltas[i]) << ',' << format_real(bound[i]) << ',' << format_real(margin)
        << '\n';
  }
}

} // namespace pnp
