#pragma once

#include <stdexcept>
#include <string>

namespace cvnn {

/// Base class for numerical failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridExhausted : public Error {
public:
    GridExhausted() : Error("grid exhausted") {}
};

class ActivationSingularity : public Error {
public:
    explicit ActivationSingularity(const std::string& name)
        : Error("activation singularity hit: " + name) {}
};

class StencilSingularity : public Error {
public:
    explicit StencilSingularity(const std::string& detail = {})
        : Error(detail.empty() ? "stencil hit singularity" : "stencil hit singularity: " + detail) {}
};

class InactiveExpansionPoint : public Error {
public:
    explicit InactiveExpansionPoint(const std::string& detail = {})
        : Error(detail.empty() ? "inactive expansion point" : "inactive expansion point: " + detail) {}
};

class NoActivePoint : public Error {
public:
    explicit NoActivePoint(const std::string& detail = {})
        : Error(detail.empty() ? "no active point found" : "no active point found: " + detail) {}
};

class IllConditionedBasis : public Error {
public:
    explicit IllConditionedBasis(double condition)
        : Error("ill-conditioned basis (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& detail) : Error("shape mismatch: " + detail) {}
};

}  // namespace cvnn
