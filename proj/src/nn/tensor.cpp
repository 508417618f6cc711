#include "semtx/nn/tensor.hpp"

#include <Eigen/Core>
#include <functional>
#include <numeric>
#include <sstream>

#include "semtx/errors.hpp"

namespace semtx::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

MapC view(const Tensor& t) {
    return MapC(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

Map view(Tensor& t) { return Map(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())); }

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()));
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != product(shape_))
        throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_string(shape_));
}

std::size_t Tensor::rows() const {
    if (shape_.empty()) return 0;
    std::size_t r = 1;
    for (std::size_t i = 0; i + 1 < shape_.size(); ++i) r *= shape_[i];
    return r;
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (product(shape) != data_.size())
        throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    return Tensor(std::move(shape), data_);
}

void Tensor::reshape(std::vector<std::size_t> shape) {
    if (product(shape) != data_.size())
        throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    shape_ = std::move(shape);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor& Tensor::operator+=(const Tensor& other) {
    if (other.size() != size()) mismatch("add", *this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows() || b.shape().size() != 2) mismatch("matmul", a, b);
    Tensor c = Tensor::matrix(a.rows(), b.cols());
    // Row by row: a row's result never depends on its neighbours, so
    // identical inputs give identical bits regardless of batch position.
    const MapC av = view(a), bv = view(b);
    Map cv = view(c);
    for (Eigen::Index i = 0; i < av.rows(); ++i) cv.row(i).noalias() = av.row(i) * bv;
    return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) mismatch("matmul_tn", a, b);
    Tensor c = Tensor::matrix(a.cols(), b.cols());
    view(c).noalias() = view(a).transpose() * view(b);
    return c;
}

void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) mismatch("matmul_tn_acc", a, b);
    view(c).noalias() += view(a).transpose() * view(b);
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) mismatch("matmul_nt", a, b);
    Tensor c = Tensor::matrix(a.rows(), b.rows());
    const MapC av = view(a), bv = view(b);
    Map cv = view(c);
    for (Eigen::Index i = 0; i < av.rows(); ++i) cv.row(i).noalias() = av.row(i) * bv.transpose();
    return c;
}

Tensor relu(const Tensor& x) {
    Tensor y = x;
    for (auto& v : y.storage()) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
    if (!x.same_shape(dy)) mismatch("relu_backward", x, dy);
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (!(x[i] > 0.0)) dx[i] = 0.0;
    return dx;
}

} // namespace semtx::nn
