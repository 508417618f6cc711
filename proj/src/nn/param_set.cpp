#include "semtx/nn/param_set.hpp"

#include <cmath>

#include "semtx/errors.hpp"

namespace semtx::nn {

Param::Param(Tensor init)
    : value(std::move(init)), grad(value.shape()), m(value.shape()), v(value.shape()) {}

Param& ParamSet::add(const std::string& path, Tensor init) {
    auto [it, inserted] = params_.emplace(path, Param(std::move(init)));
    if (!inserted) throw ShapeError("duplicate parameter path '" + path + "'");
    return it->second;
}

Param& ParamSet::at(const std::string& path) {
    auto it = params_.find(path);
    if (it == params_.end()) throw RangeError("no parameter '" + path + "' in set '" + name_ + "'");
    return it->second;
}

const Param& ParamSet::at(const std::string& path) const {
    auto it = params_.find(path);
    if (it == params_.end()) throw RangeError("no parameter '" + path + "' in set '" + name_ + "'");
    return it->second;
}

std::size_t ParamSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& [_, p] : params_) n += p.value.size();
    return n;
}

void ParamSet::zero_grad() {
    for (auto& [_, p] : params_) p.grad.fill(0.0);
}

void ParamSet::copy_state_from(const ParamSet& other) {
    for (auto& [path, p] : params_) {
        const Param& src = other.at(path);
        if (!src.value.same_shape(p.value))
            throw ShapeError("parameter '" + path + "' has shape " + shape_string(p.value.shape()) + ", source has " +
                             shape_string(src.value.shape()));
        p.value = src.value;
        p.grad = src.grad;
        p.m = src.m;
        p.v = src.v;
    }
    step_ = other.step_;
}

std::vector<double> ParamSet::flatten() const {
    std::vector<double> out;
    out.reserve(scalar_count());
    for (const auto& [_, p] : params_) out.insert(out.end(), p.value.storage().begin(), p.value.storage().end());
    return out;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t = Tensor::matrix(fan_in, fan_out);
    for (auto& v : t.storage()) v = rng.uniform(-a, a);
    return t;
}

} // namespace semtx::nn
