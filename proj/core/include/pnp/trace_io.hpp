#pragma once

#include "pnp/errors.hpp"
#include "pnp/sequence.hpp"
#include "pnp/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pnp {

inline constexpr char const *kTraceHeader = "iter,delta,rho,sigma,condition,fidelity_value";
inline constexpr char const *kBoundHeader = "iter,delta,bound,margin";
inline constexpr char const *kPgsDemoHeader = "k,y,partial_sum,chunk_bound";

class ParseError : public Error
{
public:
  ParseError(std::string const &what, std::size_t line)
    : Error(what)
    , line_(line)
  {
  }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Shortest round-trip text is not required; 17 significant digits is.
std::string format_real(double value);
double parse_real(std::string_view text);

void write_trace_csv(std::ostream &out, std::span<const TraceRecord> records);
void write_trace_csv(std::filesystem::path const &path, std::span<const TraceRecord> records);

/// Throws ParseError carrying the 1-based line number of the bad row.
std::vector<TraceRecord> read_trace_csv(std::istream &in);
std::vector<TraceRecord> read_trace_csv(std::filesystem::path const &path);

/// Rows k = 1..n of (delta_k, y_k, delta_k / y_k).
void write_bound_csv(std::ostream &out, std::span<const double> deltas, std::span<const double> bound);

} // namespace pnp
