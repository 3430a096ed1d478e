#pragma once

#include <stdexcept>
#include <string>

namespace topoalign {

// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ZeroVectorError : public Error {
public:
    explicit ZeroVectorError(const std::string& what) : Error(what) {}
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& what) : Error(what) {}
};

class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

class InvalidMatrixError : public Error {
public:
    explicit InvalidMatrixError(const std::string& what) : Error(what) {}
};

class TooLargeError : public Error {
public:
    explicit TooLargeError(const std::string& what) : Error(what) {}
};

class DimMismatchError : public Error {
public:
    explicit DimMismatchError(const std::string& what) : Error(what) {}
};

class BoundsMismatchError : public Error {
public:
    explicit BoundsMismatchError(const std::string& what) : Error(what) {}
};

class DegenerateEdgeError : public Error {
public:
    explicit DegenerateEdgeError(const std::string& what) : Error(what) {}
};

class PairingIncompleteError : public Error {
public:
    explicit PairingIncompleteError(const std::string& what) : Error(what) {}
};

class InvalidSpecError : public Error {
public:
    explicit InvalidSpecError(const std::string& what) : Error(what) {}
};

class NonFiniteLossError : public Error {
public:
    NonFiniteLossError(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

// I/O and text-format failures (CSV/JSON parsing); the CLI maps these to
// exit code 1, all other Error subclasses to exit code 2.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace topoalign
