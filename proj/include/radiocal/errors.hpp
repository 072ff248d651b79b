#pragma once

#include <stdexcept>
#include <string>

namespace radiocal {

/// Base class for all radiocal errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be read, written, or decoded.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// File decoded but its contents violate the expected format.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// No window of the input image passed the patch selection criteria.
/// Estimation is impossible; callers should report this outcome.
class EmptyPatchSetError : public Error {
public:
    explicit EmptyPatchSetError(const std::string& msg) : Error(msg) {}
};

} // namespace radiocal
