#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace semtx::nn {

/// Dense row-major array of doubles. Most kernels view it as a matrix of
/// rows() x cols(), where cols() is the last dimension.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) { return Tensor({rows, cols}, fill); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t rows() const;
    std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double* row(std::size_t r) { return data_.data() + r * cols(); }
    const double* row(std::size_t r) const { return data_.data() + r * cols(); }

    /// Same data, new shape; throws ShapeError if element counts differ.
    Tensor reshaped(std::vector<std::size_t> shape) const;
    void reshape(std::vector<std::size_t> shape);
    void fill(double v);
    Tensor& operator+=(const Tensor& other);
    Tensor& operator*=(double s);

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

/// c = a * b
Tensor matmul(const Tensor& a, const Tensor& b);
/// c = a^T * b
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// c = a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// c += a^T * b
void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& c);

Tensor relu(const Tensor& x);
/// dx = dy where x > 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);

} // namespace semtx::nn
