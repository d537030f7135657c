/**
 * @file network.hpp
 * @brief Fully-connected tanh network with jet-valued forward evaluation and a
 *        handwritten reverse pass for parameter gradients.
 *
 * Hidden layers apply tanh, the output layer is affine. Parameters flatten in
 * a canonical order: layer by layer, weights row-major ([out][in]) then
 * biases. All gradient code writes into that layout.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gstpinn/errors.hpp"
#include "gstpinn/rng.hpp"
#include "gstpinn/taylor.hpp"

namespace gstpinn {

struct Network {
    std::vector<int> layer_sizes;              ///< input, hidden..., output widths
    std::vector<std::vector<double>> weights;  ///< per layer, row-major [out*in + i]
    std::vector<std::vector<double>> biases;   ///< per layer, [out]

    static Network zeros(std::vector<int> sizes) {
        if (sizes.size() < 2) throw DimensionError("network needs at least input and output layers");
        for (int s : sizes)
            if (s < 1) throw DimensionError("network layer sizes must be positive");
        Network n;
        n.layer_sizes = std::move(sizes);
        for (size_t l = 0; l + 1 < n.layer_sizes.size(); ++l) {
            n.weights.emplace_back(static_cast<size_t>(n.layer_sizes[l + 1]) * n.layer_sizes[l], 0.0);
            n.biases.emplace_back(n.layer_sizes[l + 1], 0.0);
        }
        return n;
    }

    /// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases.
    static Network glorot(std::vector<int> sizes, std::uint64_t seed) {
        Network n = zeros(std::move(sizes));
        DetRng rng(seed);
        for (size_t l = 0; l < n.weights.size(); ++l) {
            const double limit = std::sqrt(6.0 / (n.layer_sizes[l] + n.layer_sizes[l + 1]));
            for (double& w : n.weights[l]) w = rng.uniform(-limit, limit);
        }
        return n;
    }

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
    int max_width() const { return *std::max_element(layer_sizes.begin(), layer_sizes.end()); }

    long param_count() const {
        long n = 0;
        for (size_t l = 0; l < weights.size(); ++l)
            n += static_cast<long>(weights[l].size()) + static_cast<long>(biases[l].size());
        return n;
    }

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(param_count());
        for (size_t l = 0; l < weights.size(); ++l) {
            out.insert(out.end(), weights[l].begin(), weights[l].end());
            out.insert(out.end(), biases[l].begin(), biases[l].end());
        }
        return out;
    }

    void unflatten(std::span<const double> flat) {
        if (static_cast<long>(flat.size()) != param_count())
            throw DimensionError(strf("parameter vector has %zu entries, network needs %ld",
                                      flat.size(), param_count()));
        size_t k = 0;
        for (size_t l = 0; l < weights.size(); ++l) {
            std::copy_n(flat.begin() + k, weights[l].size(), weights[l].begin());
            k += weights[l].size();
            std::copy_n(flat.begin() + k, biases[l].size(), biases[l].begin());
            k += biases[l].size();
        }
    }
};

/// Plain scalar forward pass; requires a single output neuron.
inline double forward(const Network& net, std::span<const double> point) {
    if (static_cast<int>(point.size()) != net.input_dim())
        throw DimensionError(strf("network expects %d inputs, got %zu", net.input_dim(),
                                  point.size()));
    if (net.output_dim() != 1)
        throw DimensionError("scalar forward requires a single output neuron");
    std::vector<double> a(point.begin(), point.end()), z;
    for (int l = 0; l < net.layer_count(); ++l) {
        const int in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
        z.assign(net.biases[l].begin(), net.biases[l].end());
        const double* W = net.weights[l].data();
        for (int o = 0; o < out; ++o)
            for (int i = 0; i < in; ++i) z[o] += W[static_cast<size_t>(o) * in + i] * a[i];
        if (l + 1 < net.layer_count())
            for (double& v : z) v = std::tanh(v);
        a.swap(z);
    }
    return a[0];
}

/**
 * Jet-valued forward/backward workspace bound to one network. forward()
 * stashes every pre-activation and activation; backward() then pushes a
 * coefficient-space adjoint of the output jet down to parameter space:
 *
 *     z_l = W_l a_l + b_l          =>  dL/dW[o][i] = sum_k zbar[o].c[k] a[i].c[k]
 *                                      dL/db[o]    = zbar[o].c[0]
 *     hidden a_{l+1} = tanh(z_l)   =>  zbar = tanh_pullback(z, a, abar)
 */
template <int N, int Order>
class JetEvaluator {
    using J = Jet<N, Order>;

public:
    explicit JetEvaluator(const Network& net) : net_(&net) {
        if (net.input_dim() != N)
            throw DimensionError(strf("jet evaluator for %d inputs bound to %d-input network", N,
                                      net.input_dim()));
        if (net.output_dim() != 1)
            throw DimensionError("jet evaluator requires a single output neuron");
        a_.resize(net.layer_count() + 1);
        z_.resize(net.layer_count());
        a_[0].resize(N);
        for (int l = 0; l < net.layer_count(); ++l) {
            z_[l].resize(net.layer_sizes[l + 1]);
            a_[l + 1].resize(net.layer_sizes[l + 1]);
        }
        abar_.resize(net.max_width());
        abar_prev_.resize(net.max_width());
    }

    const J& forward(std::array<double, N> point) {
        for (int i = 0; i < N; ++i) a_[0][i] = J::variable(point[i], i);
        for (int l = 0; l < net_->layer_count(); ++l) {
            const int in = net_->layer_sizes[l], out = net_->layer_sizes[l + 1];
            const double* W = net_->weights[l].data();
            const bool hidden = l + 1 < net_->layer_count();
            for (int o = 0; o < out; ++o) {
                J z = J::constant(net_->biases[l][o]);
                const double* Wrow = W + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) {
                    const double w = Wrow[i];
                    const auto& av = a_[l][i].c;
                    for (int k = 0; k < J::size; ++k) z.c[k] += w * av[k];
                }
                z_[l][o] = z;
                a_[l + 1][o] = hidden ? tanh(z) : z;
            }
        }
        return a_.back()[0];
    }

    /// Accumulates parameter gradients for the last forward() into grad
    /// (canonical flat layout); ybar is dL/d(output jet) per coefficient.
    void backward(const J& ybar, std::span<double> grad) {
        if (static_cast<long>(grad.size()) != net_->param_count())
            throw DimensionError("gradient buffer size mismatch");
        abar_[0] = ybar;
        size_t off = static_cast<size_t>(net_->param_count());
        for (int l = net_->layer_count() - 1; l >= 0; --l) {
            const int in = net_->layer_sizes[l], out = net_->layer_sizes[l + 1];
            const double* W = net_->weights[l].data();
            const bool hidden = l + 1 < net_->layer_count();
            off -= static_cast<size_t>(out) * in + out;
            double* gW = grad.data() + off;
            double* gb = gW + static_cast<size_t>(out) * in;
            for (int i = 0; i < in; ++i) abar_prev_[i] = J{};
            for (int o = 0; o < out; ++o) {
                const J zbar = hidden ? tanh_pullback(z_[l][o], a_[l + 1][o], abar_[o]) : abar_[o];
                gb[o] += zbar.c[0];
                const double* Wrow = W + static_cast<size_t>(o) * in;
                double* gWrow = gW + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) {
                    const auto& av = a_[l][i].c;
                    double dot = 0.0;
                    for (int k = 0; k < J::size; ++k) dot += zbar.c[k] * av[k];
                    gWrow[i] += dot;
                    const double w = Wrow[i];
                    auto& ab = abar_prev_[i].c;
                    for (int k = 0; k < J::size; ++k) ab[k] += w * zbar.c[k];
                }
            }
            abar_.swap(abar_prev_);
        }
    }

private:
    const Network* net_;
    std::vector<std::vector<J>> z_, a_;  // a_[0] holds the seeded inputs
    std::vector<J> abar_, abar_prev_;
};

/// Evaluation of a network at one point: value plus requested partials.
struct DerivativeJet {
    std::vector<double> point;
    double value = 0.0;
    std::vector<std::pair<MultiIndex, double>> partials;  ///< sorted by multi-index

    bool has(MultiIndex mi) const {
        if (mi == MultiIndex{0, 0}) return true;
        for (const auto& [k, v] : partials)
            if (k == mi) return true;
        return false;
    }
    double at(MultiIndex mi) const {
        if (mi == MultiIndex{0, 0}) return value;
        for (const auto& [k, v] : partials)
            if (k == mi) return v;
        throw MissingJetEntry(mi);
    }
};

namespace detail {
template <int N, int Order>
DerivativeJet input_jet_impl(const Network& net, std::span<const double> point,
                             std::span<const MultiIndex> orders) {
    JetEvaluator<N, Order> ev(net);
    std::array<double, N> p{};
    for (int i = 0; i < N; ++i) p[i] = point[i];
    const auto& y = ev.forward(p);
    DerivativeJet out;
    out.point.assign(point.begin(), point.end());
    out.value = y.value();
    for (MultiIndex mi : orders) {
        if (mi == MultiIndex{0, 0}) continue;
        std::array<int, N> alpha{};
        alpha[0] = mi.dt;
        if constexpr (N == 2) alpha[1] = mi.dx;
        out.partials.emplace_back(mi, y.deriv(alpha));
    }
    std::sort(out.partials.begin(), out.partials.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out.partials.erase(std::unique(out.partials.begin(), out.partials.end(),
                                   [](const auto& a, const auto& b) { return a.first == b.first; }),
                       out.partials.end());
    return out;
}

template <int N>
DerivativeJet input_jet_dispatch(const Network& net, std::span<const double> point,
                                 std::span<const MultiIndex> orders, int max_order) {
    switch (max_order) {
        case 0: return input_jet_impl<N, 0>(net, point, orders);
        case 1: return input_jet_impl<N, 1>(net, point, orders);
        case 2: return input_jet_impl<N, 2>(net, point, orders);
        default: return input_jet_impl<N, 3>(net, point, orders);
    }
}
}  // namespace detail

/**
 * Evaluates û and the exact partial derivatives named in `orders` at one
 * point. Total derivative order is capped at 3; one- and two-input networks
 * are supported (one-input networks use multi-index slot 0 only).
 */
inline DerivativeJet input_jet(const Network& net, std::span<const double> point,
                               std::span<const MultiIndex> orders) {
    const int dim = net.input_dim();
    if (dim != 1 && dim != 2)
        throw DimensionError(strf("input_jet supports 1 or 2 inputs, network has %d", dim));
    if (static_cast<int>(point.size()) != dim)
        throw DimensionError(strf("point has %zu coordinates, network expects %d", point.size(),
                                  dim));
    int max_order = 0;
    for (MultiIndex mi : orders) {
        if (mi.dt < 0 || mi.dx < 0) throw DimensionError("negative derivative order");
        if (mi.total() > 3)
            throw DimensionError(strf("derivative order (%d,%d) exceeds the supported total of 3",
                                      mi.dt, mi.dx));
        if (dim == 1 && mi.dx != 0)
            throw DimensionError("one-input networks have no second coordinate to differentiate");
        max_order = std::max(max_order, mi.total());
    }
    return dim == 1 ? detail::input_jet_dispatch<1>(net, point, orders, max_order)
                    : detail::input_jet_dispatch<2>(net, point, orders, max_order);
}

/// Seed/config provenance embedded in artifacts.
struct ArtifactMeta {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

/// Text header (layer sizes + provenance) followed by raw little-endian
/// doubles in canonical flat order.
inline void save_checkpoint(const std::string& path, const Network& net, ArtifactMeta meta) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f << "gstpinn-checkpoint 1 " << net.layer_sizes.size();
    for (int s : net.layer_sizes) f << ' ' << s;
    f << " seed " << meta.seed << " hash " << strf("%016llx", (unsigned long long)meta.config_hash)
      << '\n';
    const std::vector<double> flat = net.flatten();
    f.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!f) throw IoError("short write on checkpoint: " + path);
}

inline Network load_checkpoint(const std::string& path, ArtifactMeta* meta = nullptr) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    size_t n_layers = 0;
    f >> magic >> version >> n_layers;
    if (magic != "gstpinn-checkpoint" || version != 1)
        throw IoError("not a gstpinn checkpoint: " + path);
    if (n_layers < 2 || n_layers > 64) throw IoError("corrupt checkpoint header: " + path);
    std::vector<int> sizes(n_layers);
    for (auto& s : sizes) f >> s;
    std::string key;
    ArtifactMeta m;
    f >> key >> m.seed;
    if (key != "seed") throw IoError("corrupt checkpoint header: " + path);
    f >> key;
    std::string hash_hex;
    f >> hash_hex;
    if (key != "hash") throw IoError("corrupt checkpoint header: " + path);
    m.config_hash = std::stoull(hash_hex, nullptr, 16);
    f.ignore(2, '\n');
    if (!f) throw IoError("corrupt checkpoint header: " + path);
    Network net = Network::zeros(sizes);
    std::vector<double> flat(net.param_count());
    f.read(reinterpret_cast<char*>(flat.data()),
           static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (f.gcount() != static_cast<std::streamsize>(flat.size() * sizeof(double)))
        throw IoError("checkpoint truncated: " + path);
    net.unflatten(flat);
    if (meta) *meta = m;
    return net;
}

}  // namespace gstpinn
