#pragma once

#include <span>

#include "semtx/nn/tensor.hpp"

namespace semtx::nn {

/// Row-wise softmax with max shift.
Tensor softmax_rows(const Tensor& logits);

/// Mean negative log-likelihood of `targets` (one per logits row) under
/// softmax(logits). Rows whose target equals `ignore_id` contribute to
/// neither the sum nor the count. When dlogits is given it receives
/// d(loss)/d(logits). Returns 0 if every row is ignored.
double ce_loss(const Tensor& logits, std::span<const int> targets, int ignore_id, Tensor* dlogits = nullptr);

} // namespace semtx::nn
