/**
 * @file autodiff.hpp
 * @brief Scalar reverse-mode tape plus the generic loss->parameter gradient.
 *
 * The jet machinery delivers input derivatives of û; everything a loss does
 * *after* that (residual formulas, squares, means) is scalar arithmetic. A
 * tiny tape with at most two parents per node records it, and its leaf
 * adjoints are pushed back through JetEvaluator to parameter space.
 */
#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "gstpinn/network.hpp"

namespace gstpinn {

class Tape {
    struct Node {
        int p0, p1;
        double w0, w1;
    };

public:
    void reset() { nodes_.clear(); }
    int size() const { return static_cast<int>(nodes_.size()); }

    int leaf() {
        nodes_.push_back({-1, -1, 0.0, 0.0});
        return size() - 1;
    }
    int node1(int p, double w) {
        nodes_.push_back({p, -1, w, 0.0});
        return size() - 1;
    }
    int node2(int p0, double w0, int p1, double w1) {
        nodes_.push_back({p0, p1, w0, w1});
        return size() - 1;
    }

    /// Reverse sweep seeding dL/d(root) = 1.
    void backward(int root) {
        adj_.assign(nodes_.size(), 0.0);
        adj_[root] = 1.0;
        for (int i = root; i >= 0; --i) {
            const double a = adj_[i];
            if (a == 0.0) continue;
            const Node& n = nodes_[i];
            if (n.p0 >= 0) adj_[n.p0] += n.w0 * a;
            if (n.p1 >= 0) adj_[n.p1] += n.w1 * a;
        }
    }
    double adjoint(int i) const { return adj_[i]; }

private:
    std::vector<Node> nodes_;
    std::vector<double> adj_;
};

/// Value recorded on a Tape. Operations store local partials at construction;
/// mixing Vars from different tapes is undefined.
class Var {
public:
    Var() = default;
    Var(Tape& t, double value) : tape_(&t), idx_(t.leaf()), v_(value) {}

    double val() const { return v_; }
    int idx() const { return idx_; }
    Tape* tape() const { return tape_; }

    /// New node v with local derivative dv/da = wa.
    static Var unary(Var a, double wa, double v) {
        Var r;
        r.tape_ = a.tape_;
        r.idx_ = r.tape_->node1(a.idx_, wa);
        r.v_ = v;
        return r;
    }
    static Var binary(Var a, double wa, Var b, double wb, double v) {
        Var r;
        r.tape_ = a.tape_ ? a.tape_ : b.tape_;
        r.idx_ = r.tape_->node2(a.idx_, wa, b.idx_, wb);
        r.v_ = v;
        return r;
    }

    friend Var operator+(Var a, Var b) { return binary(a, 1.0, b, 1.0, a.v_ + b.v_); }
    friend Var operator-(Var a, Var b) { return binary(a, 1.0, b, -1.0, a.v_ - b.v_); }
    friend Var operator*(Var a, Var b) { return binary(a, b.v_, b, a.v_, a.v_ * b.v_); }
    friend Var operator/(Var a, Var b) {
        const double inv = 1.0 / b.v_;
        return binary(a, inv, b, -a.v_ * inv * inv, a.v_ * inv);
    }
    friend Var operator-(Var a) { return unary(a, -1.0, -a.v_); }

    friend Var operator+(Var a, double c) { return unary(a, 1.0, a.v_ + c); }
    friend Var operator+(double c, Var a) { return a + c; }
    friend Var operator-(Var a, double c) { return unary(a, 1.0, a.v_ - c); }
    friend Var operator-(double c, Var a) { return unary(a, -1.0, c - a.v_); }
    friend Var operator*(Var a, double c) { return unary(a, c, a.v_ * c); }
    friend Var operator*(double c, Var a) { return a * c; }
    friend Var operator/(Var a, double c) { return unary(a, 1.0 / c, a.v_ / c); }
    friend Var operator/(double c, Var a) { return unary(a, -c / (a.v_ * a.v_), c / a.v_); }

private:
    Tape* tape_ = nullptr;
    int idx_ = -1;
    double v_ = 0.0;
};

inline double value_of(double v) { return v; }
inline double value_of(const Var& v) { return v.val(); }

/// pow with a constant exponent, for both scalar flavors.
inline double spow(double b, double e) { return std::pow(b, e); }
inline Var spow(Var b, double e) {
    return Var::unary(b, e * std::pow(b.val(), e - 1.0), std::pow(b.val(), e));
}

/// Statistics for the sorption positivity clamp.
struct ClampStats {
    long clamped = 0;
};

/// max(v, floor) with subgradient 0 on the clamped branch.
inline double clamp_floor(double v, double floor, ClampStats* s) {
    if (v < floor) {
        if (s) ++s->clamped;
        return floor;
    }
    return v;
}
inline Var clamp_floor(Var v, double floor, ClampStats* s) {
    if (v.val() < floor) {
        if (s) ++s->clamped;
        return Var::unary(v, 0.0, floor);
    }
    return v;
}

/**
 * Differentiation context handed to loss functors: evaluates the bound
 * network at points, exposing û and its input derivatives as tape variables.
 * After the functor builds a scalar loss, backward() turns tape adjoints on
 * those leaves into parameter-space gradients via the stored jet stashes.
 */
template <int N>
class DiffContext {
    struct EvalBase {
        virtual ~EvalBase() = default;
        virtual void push(const Tape& tape, std::span<double> grad) = 0;
    };
    template <int Order>
    struct Eval : EvalBase {
        JetEvaluator<N, Order> ev;
        std::array<int, Jet<N, Order>::size> leaf{};
        explicit Eval(const Network& net) : ev(net) {}
        void push(const Tape& tape, std::span<double> grad) override {
            using L = JetLayout<N, Order>;
            Jet<N, Order> ybar;
            // leaves carry derivatives = coeff * alpha!, so dL/dcoeff scales up
            for (int k = 0; k < Jet<N, Order>::size; ++k)
                ybar.c[k] = tape.adjoint(leaf[k]) * L::factorial[k];
            ev.backward(ybar, grad);
        }
    };

public:
    /// Tape-variable view of one evaluation; at() follows MultiIndex slots.
    struct JetVars {
        std::array<Var, 10> entries;  // order <= 3 in 2 vars has <= 10 slots
        int order = 0;
        Var value() const { return entries[0]; }
        Var at(MultiIndex mi) const {
            if (mi.dt < 0 || mi.dx < 0 || mi.total() > order) throw MissingJetEntry(mi);
            if (N == 1 && mi.dx != 0) throw MissingJetEntry(mi);
            std::array<int, N> alpha{};
            alpha[0] = mi.dt;
            if constexpr (N == 2) alpha[1] = mi.dx;
            // lower-order layouts are prefixes of the order-3 layout
            const int k = JetLayout<N, 3>::index_of(alpha);
            if (k < 0) throw MissingJetEntry(mi);
            return entries[k];
        }
    };

    DiffContext(const Network& net, Tape& tape) : net_(&net), tape_(&tape) {
        if (net.input_dim() != N)
            throw DimensionError("DiffContext dimension does not match the network");
    }

    Var value(std::array<double, N> p) { return jet(p, 0).value(); }

    JetVars jet(std::array<double, N> p, int order) {
        if (order < 0 || order > 3) throw DimensionError("jet order must be in [0,3]");
        switch (order) {
            case 0: return jet_impl<0>(p);
            case 1: return jet_impl<1>(p);
            case 2: return jet_impl<2>(p);
            default: return jet_impl<3>(p);
        }
    }

    /// Gradient of `loss` w.r.t. the bound network's flat parameters.
    std::vector<double> backward(Var loss) {
        std::vector<double> grad(net_->param_count(), 0.0);
        tape_->backward(loss.idx());
        for (auto& e : evals_) e->push(*tape_, grad);
        return grad;
    }

private:
    template <int Order>
    JetVars jet_impl(std::array<double, N> p) {
        auto rec = std::make_unique<Eval<Order>>(*net_);
        const auto& y = rec->ev.forward(p);
        JetVars out;
        out.order = Order;
        using L = JetLayout<N, Order>;
        for (int k = 0; k < Jet<N, Order>::size; ++k) {
            Var v(*tape_, y.c[k] * L::factorial[k]);
            rec->leaf[k] = v.idx();
            out.entries[k] = v;
        }
        evals_.push_back(std::move(rec));
        return out;
    }

    const Network* net_;
    Tape* tape_;
    std::vector<std::unique_ptr<EvalBase>> evals_;
};

/**
 * Gradient of an arbitrary scalar loss built from network evaluations.
 * F receives a DiffContext<N>& and returns a Var; the result is dL/dtheta in
 * canonical flat order and matches central finite differences.
 */
template <int N, class F>
std::vector<double> loss_param_gradient(const Network& net, F&& loss_fn) {
    Tape tape;
    DiffContext<N> ctx(net, tape);
    Var loss = loss_fn(ctx);
    if (!std::isfinite(loss.val()))
        throw NanError(strf("loss evaluated to a non-finite value (%g)", loss.val()));
    return ctx.backward(loss);
}

}  // namespace gstpinn
