#pragma once

#include <functional>

#include "stobb/attribution.hpp"
#include "stobb/oracle.hpp"

namespace stobb::testing {

class FunctionOracle final : public BlackBoxModel {
  public:
    FunctionOracle(std::size_t dim, int classes, std::function<ClassId(const Vector&)> fn)
        : dim_(dim), classes_(classes), fn_(std::move(fn)) {}
    std::size_t input_dim() const override { return dim_; }
    int num_classes() const override { return classes_; }
    ClassId predict(const Vector& x) const override { return fn_(x); }

  private:
    std::size_t dim_;
    int classes_;
    std::function<ClassId(const Vector&)> fn_;
};

class FunctionAttributor final : public Attributor {
  public:
    explicit FunctionAttributor(std::function<Vector(const Vector&)> fn) : fn_(std::move(fn)) {}
    Vector attribute(const BlackBoxModel&, const Vector& x, ClassId) override { return fn_(x); }

  private:
    std::function<Vector(const Vector&)> fn_;
};

}  // namespace stobb::testing
