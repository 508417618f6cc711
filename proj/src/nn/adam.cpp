#include "semtx/nn/adam.hpp"

#include <cmath>

namespace semtx::nn {

void adam_step(ParamSet& params, const AdamConfig& cfg) {
    params.set_step(params.step() + 1);
    const auto t = static_cast<double>(params.step());
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (auto& [_, p] : params) {
        double* w = p.value.data();
        double* g = p.grad.data();
        double* m = p.m.data();
        double* v = p.v.data();
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
            g[i] = 0.0;
        }
    }
}

} // namespace semtx::nn
