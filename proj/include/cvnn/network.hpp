#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstring>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cvnn/activation.hpp"

namespace cvnn {

using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using VecC = Eigen::VectorXcd;

struct Layer {
    SparseMat A;
    VecC b;
};

/// Weights of a depth-L network: layers 0..L-1 are hidden, layer L is the scalar output.
class NetworkWeights {
public:
    NetworkWeights() = default;

    explicit NetworkWeights(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(); }

    int input_dim() const { return static_cast<int>(layers_.front().A.cols()); }
    int depth() const { return static_cast<int>(layers_.size()) - 1; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& mutable_layers() { return layers_; }

    std::vector<int> widths() const {
        std::vector<int> w;
        for (int j = 0; j + 1 < static_cast<int>(layers_.size()); ++j) w.push_back(static_cast<int>(layers_[j].A.rows()));
        return w;
    }

    long total_neurons() const {
        long n = 0;
        for (int w : widths()) n += w;
        return n;
    }

    long nonzeros() const {
        long n = 0;
        for (const auto& l : layers_) n += l.A.nonZeros();
        return n;
    }

    void validate() const {
        if (layers_.size() < 2) throw ShapeMismatch("network needs at least one hidden layer");
        if (layers_.front().A.cols() < 1) throw ShapeMismatch("input dimension must be >= 1");
        for (std::size_t j = 0; j < layers_.size(); ++j) {
            const auto& l = layers_[j];
            if (l.A.rows() != l.b.size()) throw ShapeMismatch("bias length differs from row count in layer " + std::to_string(j));
            if (l.A.rows() < 1) throw ShapeMismatch("empty layer " + std::to_string(j));
            if (j > 0 && l.A.cols() != layers_[j - 1].A.rows())
                throw ShapeMismatch("layer " + std::to_string(j) + " column count differs from previous width");
        }
        if (layers_.back().A.rows() != 1) throw ShapeMismatch("output layer must have one row");
    }

    /// Evaluates the network with activation sigma applied componentwise in hidden layers.
    template <class Sigma>
    cplx operator()(const Sigma& sigma, const VecC& z) const {
        if (z.size() != input_dim()) throw ShapeMismatch("input has wrong dimension");
        VecC x = z;
        for (std::size_t j = 0; j + 1 < layers_.size(); ++j) {
            VecC v = layers_[j].A * x + layers_[j].b;
            for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = sigma(v[k]);
            x.swap(v);
        }
        const auto& out = layers_.back();
        return (out.A * x + out.b)[0];
    }

    template <class Sigma>
    cplx operator()(const Sigma& sigma, const CVec& z) const {
        return (*this)(sigma, VecC(Eigen::Map<const VecC>(z.data(), static_cast<Eigen::Index>(z.size()))));
    }

    template <class Sigma>
    cplx operator()(const Sigma& sigma, cplx z) const {
        VecC v(1);
        v[0] = z;
        return (*this)(sigma, v);
    }

private:
    std::vector<Layer> layers_;
};

template <class Sigma>
cplx eval_network(const NetworkWeights& theta, const Sigma& sigma, const CVec& z) {
    return theta(sigma, z);
}

/// c + sum_j a_j sigma(w_j . z + b_j) stored term by term.
class ShallowNetwork {
public:
    explicit ShallowNetwork(int dim = 1) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("ShallowNetwork: dimension must be >= 1");
    }

    int dim() const { return dim_; }
    std::size_t size() const { return coeffs_.size(); }
    cplx constant() const { return constant_; }
    void set_constant(cplx c) { constant_ = c; }
    void add_constant(cplx c) { constant_ += c; }

    const CVec& coeffs() const { return coeffs_; }
    const CVec& biases() const { return biases_; }
    const CVec& weights() const { return weights_; }  ///< size() * dim() entries, term-major
    cplx coeff(std::size_t j) const { return coeffs_[j]; }
    cplx bias(std::size_t j) const { return biases_[j]; }
    cplx weight(std::size_t j, int c = 0) const { return weights_[j * dim_ + c]; }

    void add_term(cplx a, cplx w, cplx b) {
        if (dim_ != 1) throw ShapeMismatch("scalar weight given to a multivariate network");
        coeffs_.push_back(a);
        weights_.push_back(w);
        biases_.push_back(b);
    }

    void add_term(cplx a, const CVec& w, cplx b) {
        if (static_cast<int>(w.size()) != dim_) throw ShapeMismatch("weight vector has wrong dimension");
        coeffs_.push_back(a);
        weights_.insert(weights_.end(), w.begin(), w.end());
        biases_.push_back(b);
    }

    /// this += scale * other
    void append(const ShallowNetwork& other, cplx scale = 1.0) {
        if (other.dim_ != dim_) throw ShapeMismatch("appending networks of different dimension");
        constant_ += scale * other.constant_;
        for (std::size_t j = 0; j < other.size(); ++j) {
            coeffs_.push_back(scale * other.coeffs_[j]);
            biases_.push_back(other.biases_[j]);
        }
        weights_.insert(weights_.end(), other.weights_.begin(), other.weights_.end());
    }

    void scale(cplx s) {
        constant_ *= s;
        for (auto& a : coeffs_) a *= s;
    }

    /// Merges terms with bit-identical (w, b), keeping first-occurrence order; drops zero terms.
    void compact() {
        using Key = std::vector<std::uint64_t>;
        std::map<Key, std::size_t> seen;
        CVec nc, nb, nw;
        for (std::size_t j = 0; j < size(); ++j) {
            Key key(2 + 2 * dim_);
            auto put = [](std::uint64_t& dst, double v) {
                if (v == 0.0) v = 0.0;  // fold -0 into +0
                std::memcpy(&dst, &v, sizeof v);
            };
            put(key[0], biases_[j].real());
            put(key[1], biases_[j].imag());
            for (int c = 0; c < dim_; ++c) {
                put(key[2 + 2 * c], weights_[j * dim_ + c].real());
                put(key[3 + 2 * c], weights_[j * dim_ + c].imag());
            }
            auto [it, inserted] = seen.emplace(std::move(key), nc.size());
            if (inserted) {
                nc.push_back(coeffs_[j]);
                nb.push_back(biases_[j]);
                nw.insert(nw.end(), weights_.begin() + j * dim_, weights_.begin() + (j + 1) * dim_);
            } else {
                nc[it->second] += coeffs_[j];
            }
        }
        coeffs_.clear();
        biases_.clear();
        weights_.clear();
        for (std::size_t j = 0; j < nc.size(); ++j) {
            if (nc[j] == cplx{}) continue;
            coeffs_.push_back(nc[j]);
            biases_.push_back(nb[j]);
            weights_.insert(weights_.end(), nw.begin() + j * dim_, nw.begin() + (j + 1) * dim_);
        }
    }

    template <class Sigma>
    cplx operator()(const Sigma& sigma, cplx z) const {
        if (dim_ != 1) throw ShapeMismatch("scalar input to a multivariate network");
        cplx acc = constant_;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) acc += coeffs_[j] * sigma(weights_[j] * z + biases_[j]);
        return acc;
    }

    template <class Sigma>
    cplx operator()(const Sigma& sigma, const CVec& z) const {
        if (static_cast<int>(z.size()) != dim_) throw ShapeMismatch("input has wrong dimension");
        if (dim_ == 1) return (*this)(sigma, z[0]);
        cplx acc = constant_;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) {
            cplx u = biases_[j];
            for (int c = 0; c < dim_; ++c) u += weights_[j * dim_ + c] * z[c];
            acc += coeffs_[j] * sigma(u);
        }
        return acc;
    }

    /// Depth-1 network with the same input-output map.
    NetworkWeights to_network() const {
        const Eigen::Index n = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(size()));
        Layer hidden{SparseMat(n, dim_), VecC::Zero(n)};
        Layer out{SparseMat(1, n), VecC::Constant(1, constant_)};
        std::vector<Eigen::Triplet<cplx>> th, to;
        for (std::size_t j = 0; j < size(); ++j) {
            for (int c = 0; c < dim_; ++c)
                if (weights_[j * dim_ + c] != cplx{}) th.emplace_back(j, c, weights_[j * dim_ + c]);
            hidden.b[j] = biases_[j];
            to.emplace_back(0, j, coeffs_[j]);
        }
        hidden.A.setFromTriplets(th.begin(), th.end());
        out.A.setFromTriplets(to.begin(), to.end());
        return NetworkWeights({std::move(hidden), std::move(out)});
    }

private:
    int dim_;
    cplx constant_{0.0, 0.0};
    CVec coeffs_, biases_, weights_;
};

template <class Sigma>
cplx eval_shallow(const ShallowNetwork& net, const Sigma& sigma, cplx z) {
    return net(sigma, z);
}

namespace detail {

inline void append_block(std::vector<Eigen::Triplet<cplx>>& t, const SparseMat& M, Eigen::Index r0, Eigen::Index c0,
                         cplx scale = 1.0) {
    for (Eigen::Index r = 0; r < M.outerSize(); ++r)
        for (SparseMat::InnerIterator it(M, r); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
}

inline SparseMat from_triplets(Eigen::Index rows, Eigen::Index cols, std::vector<Eigen::Triplet<cplx>>& t) {
    SparseMat M(rows, cols);
    M.setFromTriplets(t.begin(), t.end());
    M.prune(cplx{0.0, 0.0});
    return M;
}

}  // namespace detail

/// Network computing sum_k coeffs[k] * nets[k], all of the same depth and input dimension.
inline NetworkWeights linear_combine_many(const std::vector<const NetworkWeights*>& nets, const CVec& coeffs) {
    if (nets.empty()) throw std::invalid_argument("linear_combine: no networks");
    if (nets.size() != coeffs.size()) throw std::invalid_argument("linear_combine: coefficient count mismatch");
    const int L = nets.front()->depth();
    const int d = nets.front()->input_dim();
    for (auto* n : nets) {
        if (n->depth() != L) throw ShapeMismatch("linear_combine: depth mismatch");
        if (n->input_dim() != d) throw ShapeMismatch("linear_combine: input dimension mismatch");
    }
    std::vector<Layer> out;
    for (int j = 0; j <= L; ++j) {
        Eigen::Index rows = 0, cols = 0;
        for (auto* n : nets) {
            rows += n->layers()[j].A.rows();
            cols += n->layers()[j].A.cols();
        }
        std::vector<Eigen::Triplet<cplx>> t;
        if (j == 0) {
            VecC b(rows);
            Eigen::Index r0 = 0;
            for (auto* n : nets) {
                const auto& l = n->layers()[0];
                detail::append_block(t, l.A, r0, 0);
                b.segment(r0, l.b.size()) = l.b;
                r0 += l.A.rows();
            }
            out.push_back({detail::from_triplets(rows, d, t), b});
        } else if (j < L) {
            VecC b(rows);
            Eigen::Index r0 = 0, c0 = 0;
            for (auto* n : nets) {
                const auto& l = n->layers()[j];
                detail::append_block(t, l.A, r0, c0);
                b.segment(r0, l.b.size()) = l.b;
                r0 += l.A.rows();
                c0 += l.A.cols();
            }
            out.push_back({detail::from_triplets(rows, cols, t), b});
        } else {
            VecC b = VecC::Zero(1);
            Eigen::Index c0 = 0;
            for (std::size_t k = 0; k < nets.size(); ++k) {
                const auto& l = nets[k]->layers()[j];
                detail::append_block(t, l.A, 0, c0, coeffs[k]);
                b[0] += coeffs[k] * l.b[0];
                c0 += l.A.cols();
            }
            out.push_back({detail::from_triplets(1, cols, t), b});
        }
    }
    return NetworkWeights(std::move(out));
}

inline NetworkWeights linear_combine(const NetworkWeights& t1, const NetworkWeights& t2, cplx alpha, cplx beta) {
    return linear_combine_many({&t1, &t2}, {alpha, beta});
}

/// Network computing outer(inner(z)); outer must take scalar input.
inline NetworkWeights compose(const NetworkWeights& outer, const NetworkWeights& inner) {
    if (outer.input_dim() != 1) throw ShapeMismatch("compose: outer network must have scalar input");
    std::vector<Layer> out(inner.layers().begin(), inner.layers().end() - 1);
    const auto& a_last = inner.layers().back();
    const auto& b_first = outer.layers().front();
    SparseMat C = (b_first.A * a_last.A).pruned();
    VecC e = b_first.b + b_first.A * a_last.b;
    out.push_back({std::move(C), std::move(e)});
    out.insert(out.end(), outer.layers().begin() + 1, outer.layers().end());
    return NetworkWeights(std::move(out));
}

/// Network computing z -> theta(a^T z + b) for z in C^d; theta must take scalar input.
inline NetworkWeights lift_affine(const NetworkWeights& theta, const CVec& a, cplx b) {
    if (theta.input_dim() != 1) throw ShapeMismatch("lift_affine: network must have scalar input");
    if (a.empty()) throw ShapeMismatch("lift_affine: empty direction");
    auto layers = theta.layers();
    const auto& A0 = theta.layers()[0].A;
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index r = 0; r < A0.outerSize(); ++r)
        for (SparseMat::InnerIterator it(A0, r); it; ++it)
            for (std::size_t c = 0; c < a.size(); ++c)
                if (a[c] != cplx{}) t.emplace_back(it.row(), c, it.value() * a[c]);
    VecC bias = theta.layers()[0].b;
    for (Eigen::Index r = 0; r < A0.outerSize(); ++r)
        for (SparseMat::InnerIterator it(A0, r); it; ++it) bias[it.row()] += it.value() * b;
    layers[0].A = detail::from_triplets(A0.rows(), static_cast<Eigen::Index>(a.size()), t);
    layers[0].b = bias;
    return NetworkWeights(std::move(layers));
}

/// Network computing t -> theta(a t + b) for scalar t.
inline NetworkWeights restrict_line(const NetworkWeights& theta, const CVec& a, const CVec& b) {
    const auto d = static_cast<std::size_t>(theta.input_dim());
    if (a.size() != d || b.size() != d) throw ShapeMismatch("restrict_line: direction or offset has wrong dimension");
    auto layers = theta.layers();
    const auto& A0 = theta.layers()[0].A;
    VecC av = Eigen::Map<const VecC>(a.data(), static_cast<Eigen::Index>(d));
    VecC bv = Eigen::Map<const VecC>(b.data(), static_cast<Eigen::Index>(d));
    VecC col = A0 * av;
    std::vector<Eigen::Triplet<cplx>> t;
    for (Eigen::Index r = 0; r < col.size(); ++r)
        if (col[r] != cplx{}) t.emplace_back(r, 0, col[r]);
    layers[0].A = detail::from_triplets(A0.rows(), 1, t);
    layers[0].b = theta.layers()[0].b + A0 * bv;
    return NetworkWeights(std::move(layers));
}

/// Adds a constant to the network output.
inline NetworkWeights add_constant(NetworkWeights theta, cplx c) {
    theta.mutable_layers().back().b[0] += c;
    return theta;
}

}  // namespace cvnn
