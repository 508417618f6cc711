#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semtx/nn/param_set.hpp"

namespace semtx::nn {

/// Loss evaluated at the current parameter values. When `with_grad` is true
/// the function must also accumulate analytic gradients into the sets'
/// grad tensors. It must be deterministic (fixed noise and shuffles).
using LossFn = std::function<double(bool with_grad)>;

struct GradCheckOptions {
    double eps = 1e-5;
    std::size_t samples = 100; // coordinates checked; all of them if fewer exist
    std::uint64_t seed = 0;
    /// Relative error is |a - n| / max(|a|, |n|, floor).
    double floor = 1e-6;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t coordinates = 0;
    std::string worst_path;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Central differences (f(p+eps) - f(p-eps)) / (2 eps) against the analytic
/// gradient over a random sample of coordinates drawn from all sets.
GradCheckReport gradient_check(const LossFn& loss, const std::vector<ParamSet*>& sets,
                               const GradCheckOptions& options = {});

inline GradCheckReport gradient_check(const LossFn& loss, ParamSet& set, const GradCheckOptions& options = {}) {
    return gradient_check(loss, std::vector<ParamSet*>{&set}, options);
}

} // namespace semtx::nn
