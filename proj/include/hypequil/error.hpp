#pragma once

#include <stdexcept>
#include <string>

namespace hypequil {

/// Base of every error raised by the library. Callers that only care about
/// "something went wrong in hypequil" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad dimension, t outside [0,1], ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// A value that should lie on the hyperboloid (or be tangent) does not.
class InvariantError : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

class DegenerateRegionError : public Error {
public:
    using Error::Error;
};

/// Config document rejected; `path()` names the offending key, e.g. "region.radius".
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace hypequil
