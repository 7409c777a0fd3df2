#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mblotto {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Carries the substream tag of the realization that produced the failing matrix.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::uint64_t seed_tag = 0)
        : Error(what), seed_tag_(seed_tag) {}
    std::uint64_t seed_tag() const noexcept { return seed_tag_; }

private:
    std::uint64_t seed_tag_;
};

class StatisticsError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace mblotto
