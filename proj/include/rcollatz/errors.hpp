#pragma once

#include <stdexcept>
#include <string>

namespace rcollatz {

// Value outside the domain of an operation (non-positive real, x outside (3/4, 9/4] for T, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class FractionalWord : public std::invalid_argument {
public:
    FractionalWord() : std::invalid_argument("word has digits right of the radix point") {}
};

class OddWord : public std::invalid_argument {
public:
    OddWord() : std::invalid_argument("word has an odd number of non-zero digits") {}
};

// A significand outgrew the configured bit-length ceiling.
class ResourceCeiling : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PrecisionExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoundaryUndetermined : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rcollatz
