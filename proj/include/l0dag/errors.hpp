#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace l0dag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or malformed input (bad shapes, cyclic graphs, parse failures).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed: singular covariance, non-PD precision, etc.
class NumericalError : public Error {
public:
    using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: stderr). Returns the old one.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace l0dag
