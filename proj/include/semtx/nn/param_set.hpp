#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semtx/nn/tensor.hpp"
#include "semtx/rng.hpp"

namespace semtx::nn {

/// A trainable tensor with its gradient accumulator and Adam moments, all of
/// identical shape.
struct Param {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;

    explicit Param(Tensor init);
};

/// Named collection of parameters with one optimizer step counter.
/// Element addresses are stable for the life of the set (std::map nodes), so
/// layers keep raw pointers into it.
class ParamSet {
public:
    ParamSet() = default;
    explicit ParamSet(std::string name) : name_(std::move(name)) {}
    ParamSet(const ParamSet&) = delete;
    ParamSet& operator=(const ParamSet&) = delete;
    ParamSet(ParamSet&&) noexcept = default;
    ParamSet& operator=(ParamSet&&) noexcept = default;

    Param& add(const std::string& path, Tensor init);
    Param& at(const std::string& path);
    const Param& at(const std::string& path) const;
    bool contains(const std::string& path) const { return params_.count(path) != 0; }

    const std::string& name() const { return name_; }
    std::size_t size() const { return params_.size(); }
    std::size_t scalar_count() const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    void zero_grad();
    std::int64_t step() const { return step_; }
    void set_step(std::int64_t s) { step_ = s; }

    /// Deep copy of parameter values and optimizer state.
    void copy_state_from(const ParamSet& other);
    /// Concatenated parameter values, in path order. Used for bit-exact comparisons.
    std::vector<double> flatten() const;

private:
    std::string name_;
    std::map<std::string, Param> params_;
    std::int64_t step_ = 0;
};

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

} // namespace semtx::nn
