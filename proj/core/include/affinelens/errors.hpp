#pragma once

#include <stdexcept>
#include <string>

namespace affinelens {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The simplex kernel exceeded its pivot budget (cycling or severe ill-conditioning).
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// A region that was required to be non-empty has no feasible point.
class InfeasibleRegion : public Error {
public:
    using Error::Error;
};

/// A region that was required to be full-dimensional has Chebyshev radius <= eps_dim.
class DegenerateRegion : public Error {
public:
    using Error::Error;
};

/// A network or polytope violates a structural rule (dimension chaining, layer adjacency, nesting).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced during evaluation.
class NumericOverflow : public Error {
public:
    using Error::Error;
};

/// Malformed interchange document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Request exceeds a documented size cap (e.g. exhaustive oracle neuron limit).
class CapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace affinelens
