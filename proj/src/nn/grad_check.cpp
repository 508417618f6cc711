#include "semtx/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semtx/rng.hpp"

namespace semtx::nn {

namespace {

struct Coordinate {
    ParamSet* set;
    std::string path;
    Param* param;
    std::size_t index;
};

} // namespace

GradCheckReport gradient_check(const LossFn& loss, const std::vector<ParamSet*>& sets, const GradCheckOptions& options) {
    for (ParamSet* s : sets) s->zero_grad();
    loss(true);

    std::vector<std::pair<std::size_t, Coordinate>> spans; // running offset -> param
    std::size_t total = 0;
    for (ParamSet* s : sets) {
        for (auto& [path, p] : *s) {
            spans.push_back({total, Coordinate{s, path, &p, 0}});
            total += p.value.size();
        }
    }

    std::vector<std::size_t> picks;
    if (total <= options.samples) {
        for (std::size_t i = 0; i < total; ++i) picks.push_back(i);
    } else {
        Rng rng(options.seed);
        std::set<std::size_t> chosen;
        while (chosen.size() < options.samples) chosen.insert(rng.below(total));
        picks.assign(chosen.begin(), chosen.end());
    }

    GradCheckReport report;
    report.coordinates = picks.size();
    for (std::size_t flat : picks) {
        auto it = std::upper_bound(spans.begin(), spans.end(), flat,
                                   [](std::size_t f, const auto& e) { return f < e.first; });
        --it;
        Param& p = *it->second.param;
        const std::size_t idx = flat - it->first;
        const double analytic = p.grad[idx];
        const double saved = p.value[idx];
        p.value[idx] = saved + options.eps;
        const double up = loss(false);
        p.value[idx] = saved - options.eps;
        const double down = loss(false);
        p.value[idx] = saved;
        const double numeric = (up - down) / (2.0 * options.eps);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), options.floor});
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel > report.max_rel_error || report.worst_path.empty()) {
            report.max_rel_error = std::max(report.max_rel_error, rel);
            report.worst_path = it->second.set->name() + "/" + it->second.path;
            report.worst_index = idx;
            report.worst_analytic = analytic;
            report.worst_numeric = numeric;
        }
    }
    return report;
}

} // namespace semtx::nn
