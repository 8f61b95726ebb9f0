#pragma once

#include <stdexcept>

namespace frgs {

/// A caller-side precondition was violated (bad parameters, zero field, ...).
class domain_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// An iteration could not produce its result. For the Nehari and solver
/// routines this usually means the nonlinearity violates its hypotheses.
class numerical_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace frgs
