#pragma once

#include <stdexcept>
#include <string>

namespace leo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature, series or continued fraction hit its cap before meeting tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A time lies outside the channel timeline.
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Exact-match timeline lookup with a time that is not a listed row.
class NoExactMatch : public Error {
public:
    using Error::Error;
};

/// The planner constraint does not change sign on the search bracket.
class NoBracket : public Error {
public:
    using Error::Error;
};

/// The idle-probability budget is already violated at the lower bracket end.
class Infeasible : public Error {
public:
    using Error::Error;
};

}  // namespace leo
