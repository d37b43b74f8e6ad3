#pragma once

#include <stdexcept>
#include <string>

namespace pnp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

/// A NaN or infinity tried to enter solver state.
class NonFiniteError : public Error
{
public:
  using Error::Error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

} // namespace pnp
