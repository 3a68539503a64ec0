#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "spinrl/common.hpp"
#include "spinrl/rng.hpp"

namespace spinrl {

// dense feed-forward network, tanh on every layer except the last (linear
// output). batches are row-major: one sample per row. gradients are computed
// by hand with reverse accumulation; the forward cache keeps post-activation
// values per layer, which is all tanh backprop needs (tanh' = 1 - a^2).
class Mlp {
public:
    struct Cache {
        std::vector<Eigen::MatrixXd> a;  // a[0] = input, a[l] = output of layer l
    };
    struct Grads {
        std::vector<Eigen::MatrixXd> dW;
        std::vector<Eigen::VectorXd> db;
    };

    Mlp() = default;

    explicit Mlp(const std::vector<int>& sizes) {
        if (sizes.size() < 2) throw ConfigError("mlp: need at least input and output sizes");
        for (size_t l = 0; l + 1 < sizes.size(); ++l) {
            if (sizes[l] <= 0 || sizes[l + 1] <= 0)
                throw ConfigError("mlp: layer sizes must be positive");
            W_.emplace_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
            b_.emplace_back(Eigen::VectorXd::Zero(sizes[l + 1]));
        }
    }

    int num_layers() const { return static_cast<int>(W_.size()); }
    int input_size() const { return static_cast<int>(W_.front().cols()); }
    int output_size() const { return static_cast<int>(W_.back().rows()); }
    const Eigen::MatrixXd& weights(int l) const { return W_[l]; }
    const Eigen::VectorXd& biases(int l) const { return b_[l]; }
    Eigen::MatrixXd& weights(int l) { return W_[l]; }
    Eigen::VectorXd& biases(int l) { return b_[l]; }

    std::vector<int> layer_sizes() const {
        std::vector<int> s{input_size()};
        for (const auto& W : W_) s.push_back(static_cast<int>(W.rows()));
        return s;
    }

    // orthogonal-style init: Q factor of a seeded Gaussian matrix, scaled by
    // gain per layer (last entry of gains applies to the output layer).
    void init_orthogonal(Rng& rng, double hidden_gain, double output_gain) {
        const int L = num_layers();
        for (int l = 0; l < L; ++l) {
            double gain = (l == L - 1) ? output_gain : hidden_gain;
            W_[l] = orthogonal_matrix(static_cast<int>(W_[l].rows()),
                                      static_cast<int>(W_[l].cols()), rng) *
                    gain;
            b_[l].setZero();
        }
    }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Cache* cache = nullptr) const {
        if (X.cols() != input_size()) throw ShapeMismatch("mlp: wrong input width");
        if (cache) {
            cache->a.clear();
            cache->a.push_back(X);
        }
        Eigen::MatrixXd a = X;
        const int L = num_layers();
        for (int l = 0; l < L; ++l) {
            Eigen::MatrixXd z = a * W_[l].transpose();
            z.rowwise() += b_[l].transpose();
            a = (l + 1 < L) ? z.array().tanh().matrix() : z;
            if (cache) cache->a.push_back(a);
        }
        return a;
    }

    // dOut: gradient of the loss w.r.t. the network output, one row per
    // sample. fills g with gradients w.r.t. every weight and bias.
    void backward(const Cache& cache, const Eigen::MatrixXd& dOut, Grads& g) const {
        const int L = num_layers();
        if (static_cast<int>(cache.a.size()) != L + 1)
            throw ShapeMismatch("mlp: cache does not match network depth");
        g.dW.resize(L);
        g.db.resize(L);
        Eigen::MatrixXd grad = dOut;
        for (int l = L - 1; l >= 0; --l) {
            g.dW[l] = grad.transpose() * cache.a[l];
            g.db[l] = grad.colwise().sum().transpose();
            if (l > 0) {
                grad = grad * W_[l];
                // pass through tanh of the previous layer
                grad.array() *= 1.0 - cache.a[l].array().square();
            }
        }
    }

    int num_params() const {
        int n = 0;
        for (int l = 0; l < num_layers(); ++l)
            n += static_cast<int>(W_[l].size() + b_[l].size());
        return n;
    }

    // flat layout: W0 row-major, b0, W1, b1, ...
    void flatten(double* dst) const {
        for (int l = 0; l < num_layers(); ++l) {
            for (Eigen::Index i = 0; i < W_[l].rows(); ++i)
                for (Eigen::Index j = 0; j < W_[l].cols(); ++j) *dst++ = W_[l](i, j);
            for (Eigen::Index i = 0; i < b_[l].size(); ++i) *dst++ = b_[l][i];
        }
    }

    void unflatten(const double* src) {
        for (int l = 0; l < num_layers(); ++l) {
            for (Eigen::Index i = 0; i < W_[l].rows(); ++i)
                for (Eigen::Index j = 0; j < W_[l].cols(); ++j) W_[l](i, j) = *src++;
            for (Eigen::Index i = 0; i < b_[l].size(); ++i) b_[l][i] = *src++;
        }
    }

    void flatten_grads(const Grads& g, double* dst) const {
        for (int l = 0; l < num_layers(); ++l) {
            for (Eigen::Index i = 0; i < g.dW[l].rows(); ++i)
                for (Eigen::Index j = 0; j < g.dW[l].cols(); ++j) *dst++ = g.dW[l](i, j);
            for (Eigen::Index i = 0; i < g.db[l].size(); ++i) *dst++ = g.db[l][i];
        }
    }

private:
    static Eigen::MatrixXd orthogonal_matrix(int rows, int cols, Rng& rng) {
        const int big = std::max(rows, cols), small = std::min(rows, cols);
        Eigen::MatrixXd A(big, small);
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rng.normal();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
        // fix the sign ambiguity so the result is a deterministic function of
        // the rng stream
        Eigen::MatrixXd R = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
        for (int j = 0; j < small; ++j)
            if (R(j, j) < 0) Q.col(j) = -Q.col(j);
        return rows >= cols ? Q : Eigen::MatrixXd(Q.transpose());
    }

    std::vector<Eigen::MatrixXd> W_;
    std::vector<Eigen::VectorXd> b_;
};

}  // namespace spinrl
