#pragma once

#include <stdexcept>
#include <string>

namespace galaxy {

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteValue : std::runtime_error {
    explicit NonFiniteValue(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyVector : std::runtime_error {
    explicit EmptyVector(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

// Mutation operators that cannot apply to the given target.
struct NoEligibleNeuron : std::runtime_error {
    explicit NoEligibleNeuron(const std::string& what) : std::runtime_error(what) {}
};

struct NoEligibleLayer : std::runtime_error {
    explicit NoEligibleLayer(const std::string& what) : std::runtime_error(what) {}
};

struct NoConstants : std::runtime_error {
    explicit NoConstants(const std::string& what) : std::runtime_error(what) {}
};

struct NoRemovableConstant : std::runtime_error {
    explicit NoRemovableConstant(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewConstants : std::runtime_error {
    explicit TooFewConstants(const std::string& what) : std::runtime_error(what) {}
};

struct MutationExhausted : std::runtime_error {
    explicit MutationExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPool : std::runtime_error {
    explicit EmptyPool(const std::string& what) : std::runtime_error(what) {}
};

struct DuplicateId : std::runtime_error {
    explicit DuplicateId(const std::string& what) : std::runtime_error(what) {}
};

struct AdapterNotFound : std::runtime_error {
    explicit AdapterNotFound(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace galaxy
