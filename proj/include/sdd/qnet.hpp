#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace sdd {

/// Fully connected rectifier network with a linear output layer, the Q-value
/// approximator. Templated on the scalar so training runs in float while
/// gradient checks run in double.
template <typename T>
class QNetwork {
public:
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

    struct Cache {
        std::vector<Matrix> acts;  // acts[0] = input, last = linear output
    };
    struct Gradients {
        std::vector<Matrix> W;
        std::vector<RowVector> b;
        Matrix delta_front, delta_back;  // backprop work buffers
    };

    QNetwork() = default;

    /// Scaled-uniform fan-in init: W ~ U(-1,1)/sqrt(fan_in), b = 0.
    QNetwork(std::vector<int> widths, std::uint64_t seed) : widths_(std::move(widths)) {
        if (widths_.size() < 2) throw std::invalid_argument("QNetwork needs at least two widths");
        std::mt19937_64 rng(seed);
        W.reserve(widths_.size() - 1);
        b.reserve(widths_.size() - 1);
        for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
            const int in = widths_[l];
            const int out = widths_[l + 1];
            const T limit = T(1) / std::sqrt(static_cast<T>(in));
            Matrix w(in, out);
            for (int i = 0; i < in; ++i)
                for (int j = 0; j < out; ++j) {
                    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
                    w(i, j) = static_cast<T>(2.0 * u - 1.0) * limit;
                }
            W.push_back(std::move(w));
            b.push_back(RowVector::Zero(out));
        }
    }

    const std::vector<int>& widths() const { return widths_; }
    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < W.size(); ++l)
            n += static_cast<std::size_t>(W[l].size()) + static_cast<std::size_t>(b[l].size());
        return n;
    }

    /// Batched forward pass; rows are samples.
    Matrix forward(const Matrix& x) const {
        Cache cache;
        return forward(x, cache);
    }

    const Matrix& forward(const Matrix& x, Cache& cache) const {
        cache.acts.resize(W.size() + 1);
        cache.acts[0] = x;
        return forward_prepared(cache);
    }

    /// Forward pass over cache.acts[0], reusing the cache's storage so a hot
    /// loop allocates nothing after the first call. Single rows take the
    /// matrix-vector kernel, which packing-based products would waste.
    const Matrix& forward_prepared(Cache& cache) const {
        cache.acts.resize(W.size() + 1);
        if (cache.acts[0].cols() != input_dim())
            throw std::invalid_argument("QNetwork: input width mismatch");
        for (std::size_t l = 0; l < W.size(); ++l) {
            const Matrix& a = cache.acts[l];
            Matrix& z = cache.acts[l + 1];
            if (a.rows() == 1) {
                z.resize(1, W[l].cols());
                z.row(0) = b[l];
                z.row(0).noalias() += a.row(0) * W[l];
            } else {
                z.noalias() = a * W[l];
                z.rowwise() += b[l];
            }
            if (l + 1 < W.size()) z = z.cwiseMax(T(0));
        }
        return cache.acts.back();
    }

    std::vector<T> forward_one(const std::vector<T>& obs) const {
        Matrix x(1, static_cast<Eigen::Index>(obs.size()));
        for (std::size_t i = 0; i < obs.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = obs[i];
        Matrix out = forward(x);
        return std::vector<T>(out.data(), out.data() + out.size());
    }

    /// Backpropagation of dL/d(output). Gradients are accumulated fresh
    /// (overwritten), shaped exactly like W and b.
    void backward(const Cache& cache, const Matrix& dout, Gradients& grads) const {
        grads.W.resize(W.size());
        grads.b.resize(b.size());
        Matrix* delta = &grads.delta_front;
        Matrix* next = &grads.delta_back;
        *delta = dout;
        for (std::size_t l = W.size(); l-- > 0;) {
            if (l + 1 < W.size()) {
                // rectifier mask from the stored post-activation
                *delta = delta->cwiseProduct(
                    (cache.acts[l + 1].array() > T(0)).template cast<T>().matrix());
            }
            grads.W[l].noalias() = cache.acts[l].transpose() * (*delta);
            grads.b[l] = delta->colwise().sum();
            if (l > 0) {
                next->noalias() = (*delta) * W[l].transpose();
                std::swap(delta, next);
            }
        }
    }

    friend bool operator==(const QNetwork& a, const QNetwork& c) {
        if (a.widths_ != c.widths_) return false;
        for (std::size_t l = 0; l < a.W.size(); ++l)
            if (a.W[l] != c.W[l] || a.b[l] != c.b[l]) return false;
        return true;
    }

    std::vector<Matrix> W;   // W[l] is widths[l] x widths[l+1]
    std::vector<RowVector> b;

private:
    std::vector<int> widths_;
};

/// theta' := theta. Throws on architecture mismatch.
template <typename T>
void sync_target(const QNetwork<T>& net, QNetwork<T>& target) {
    if (net.widths() != target.widths())
        throw std::invalid_argument("sync_target: architecture mismatch");
    target = net;
}

/// Greedy action with lowest-index tie break, or uniform with probability
/// epsilon. No invalid-action masking. The scratch cache keeps the hot path
/// allocation-free.
template <typename T>
int select_action(const QNetwork<T>& net, const std::vector<T>& obs, double epsilon,
                  std::mt19937_64& rng, typename QNetwork<T>::Cache& scratch) {
    if (epsilon > 0.0) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < epsilon) {
            const auto n = static_cast<std::uint64_t>(net.output_dim());
            const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
            std::uint64_t raw;
            do { raw = rng(); } while (raw >= bound);
            return static_cast<int>(raw % n);
        }
    }
    if (scratch.acts.empty()) scratch.acts.resize(1);
    auto& x = scratch.acts[0];
    x.resize(1, static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = obs[i];
    const auto& q = net.forward_prepared(scratch);
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.cols()); ++a)
        if (q(0, a) > q(0, best)) best = a;
    return best;
}

template <typename T>
int select_action(const QNetwork<T>& net, const std::vector<T>& obs, double epsilon,
                  std::mt19937_64& rng) {
    typename QNetwork<T>::Cache scratch;
    return select_action(net, obs, epsilon, rng, scratch);
}

template <typename T>
class Adam {
public:
    Adam() = default;
    Adam(const QNetwork<T>& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8)
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (std::size_t l = 0; l < net.W.size(); ++l) {
            mW_.push_back(QNetwork<T>::Matrix::Zero(net.W[l].rows(), net.W[l].cols()));
            vW_.push_back(QNetwork<T>::Matrix::Zero(net.W[l].rows(), net.W[l].cols()));
            mb_.push_back(QNetwork<T>::RowVector::Zero(net.b[l].cols()));
            vb_.push_back(QNetwork<T>::RowVector::Zero(net.b[l].cols()));
        }
    }

    void step(QNetwork<T>& net, const typename QNetwork<T>::Gradients& g) {
        ++t_;
        const T c1 = static_cast<T>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
        const T c2 = static_cast<T>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
        const T b1 = static_cast<T>(beta1_), b2 = static_cast<T>(beta2_);
        const T lr = static_cast<T>(lr_), eps = static_cast<T>(eps_);
        for (std::size_t l = 0; l < net.W.size(); ++l) {
            mW_[l] = b1 * mW_[l] + (T(1) - b1) * g.W[l];
            vW_[l] = (b2 * vW_[l].array() + (T(1) - b2) * g.W[l].array().square()).matrix();
            net.W[l].array() -=
                lr * (mW_[l].array() / c1) / ((vW_[l].array() / c2).sqrt() + eps);
            mb_[l] = b1 * mb_[l] + (T(1) - b1) * g.b[l];
            vb_[l] = (b2 * vb_[l].array() + (T(1) - b2) * g.b[l].array().square()).matrix();
            net.b[l].array() -=
                lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
        }
    }

private:
    double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long long t_ = 0;
    std::vector<typename QNetwork<T>::Matrix> mW_, vW_;
    std::vector<typename QNetwork<T>::RowVector> mb_, vb_;
};

}  // namespace sdd
