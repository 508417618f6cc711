#pragma once

#include "semtx/nn/param_set.hpp"

namespace semtx::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update of every parameter in the set, then
/// gradients are zeroed. The set's step counter is incremented first.
void adam_step(ParamSet& params, const AdamConfig& cfg);

} // namespace semtx::nn
