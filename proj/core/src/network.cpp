#include "affinelens/network.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "affinelens/errors.hpp"

namespace affinelens {

const char* to_string(LayerKind kind)
{
    switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::activation: return "activation";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::residual_begin: return "residual_begin";
    case LayerKind::residual_end: return "residual_end";
    case LayerKind::flattened_conv: return "flattened_conv";
    }
    return "unknown";
}

LayerSpec LayerSpec::dense(Eigen::MatrixXd weight, Eigen::VectorXd bias)
{
    LayerSpec l;
    l.kind = LayerKind::dense;
    l.weight = std::move(weight);
    l.bias = std::move(bias);
    return l;
}

LayerSpec LayerSpec::activation(double slope_pos, double slope_neg)
{
    LayerSpec l;
    l.kind = LayerKind::activation;
    l.slope_pos = slope_pos;
    l.slope_neg = slope_neg;
    return l;
}

LayerSpec LayerSpec::batchnorm(Eigen::VectorXd scale, Eigen::VectorXd shift)
{
    LayerSpec l;
    l.kind = LayerKind::batchnorm;
    l.bn_scale = std::move(scale);
    l.bn_shift = std::move(shift);
    return l;
}

LayerSpec LayerSpec::residual_begin()
{
    LayerSpec l;
    l.kind = LayerKind::residual_begin;
    return l;
}

LayerSpec LayerSpec::residual_end()
{
    LayerSpec l;
    l.kind = LayerKind::residual_end;
    return l;
}

LayerSpec LayerSpec::flattened_conv(Eigen::MatrixXd weight, Eigen::VectorXd bias)
{
    LayerSpec l = dense(std::move(weight), std::move(bias));
    l.kind = LayerKind::flattened_conv;
    return l;
}

Network::Network(int input_dim, std::vector<LayerSpec> layers)
    : input_dim_(input_dim), layers_(std::move(layers))
{
    if (input_dim_ <= 0)
        throw StructuralError("network input dimension must be positive");
    if (layers_.empty())
        throw StructuralError("network has no layers");
    if (layers_.back().kind == LayerKind::activation)
        throw StructuralError("network must end with an affine op, not an activation");

    int dim = input_dim_;
    std::vector<int> skip_dims;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerSpec& l = layers_[i];
        const std::string where = "layer " + std::to_string(i) + " (" + to_string(l.kind) + ")";
        switch (l.kind) {
        case LayerKind::dense:
        case LayerKind::flattened_conv:
            if (l.weight.cols() != dim)
                throw StructuralError(where + ": weight has " + std::to_string(l.weight.cols()) +
                                      " columns, expected " + std::to_string(dim));
            if (l.bias.size() != l.weight.rows())
                throw StructuralError(where + ": bias length does not match weight rows");
            if (l.weight.rows() == 0)
                throw StructuralError(where + ": zero output width");
            if (!l.weight.allFinite() || !l.bias.allFinite())
                throw StructuralError(where + ": non-finite parameters");
            dim = static_cast<int>(l.weight.rows());
            break;
        case LayerKind::activation:
            if (!std::isfinite(l.slope_pos) || !std::isfinite(l.slope_neg))
                throw StructuralError(where + ": non-finite slopes");
            activation_ops_.push_back(i);
            activation_widths_.push_back(dim);
            break;
        case LayerKind::batchnorm:
            if (l.bn_scale.size() != dim || l.bn_shift.size() != dim)
                throw StructuralError(where + ": scale/shift length does not match width " + std::to_string(dim));
            if (!l.bn_scale.allFinite() || !l.bn_shift.allFinite())
                throw StructuralError(where + ": non-finite parameters");
            break;
        case LayerKind::residual_begin:
            skip_dims.push_back(dim);
            break;
        case LayerKind::residual_end:
            if (skip_dims.empty())
                throw StructuralError(where + ": residual end without a matching begin");
            if (skip_dims.back() != dim)
                throw StructuralError(where + ": block output width " + std::to_string(dim) +
                                      " does not match skip width " + std::to_string(skip_dims.back()));
            skip_dims.pop_back();
            break;
        }
    }
    if (!skip_dims.empty())
        throw StructuralError("network has an unterminated residual block");
    output_dim_ = dim;
}

int Network::activation_width(int depth) const
{
    if (depth < 1 || depth > activation_layer_count())
        throw StructuralError("activation layer index " + std::to_string(depth) + " out of range");
    return activation_widths_[static_cast<std::size_t>(depth - 1)];
}

int Network::total_activation_neurons() const
{
    int n = 0;
    for (int w : activation_widths_)
        n += w;
    return n;
}

void SignPattern::append_layer(const std::vector<std::int8_t>& bits)
{
    bits_.insert(bits_.end(), bits.begin(), bits.end());
    widths_.push_back(static_cast<int>(bits.size()));
}

std::vector<std::int8_t> SignPattern::layer(int depth) const
{
    if (depth < 1 || depth > this->depth())
        throw StructuralError("sign pattern layer out of range");
    std::size_t start = 0;
    for (int i = 0; i < depth - 1; ++i)
        start += static_cast<std::size_t>(widths_[static_cast<std::size_t>(i)]);
    const auto w = static_cast<std::size_t>(widths_[static_cast<std::size_t>(depth - 1)]);
    return {bits_.begin() + static_cast<std::ptrdiff_t>(start), bits_.begin() + static_cast<std::ptrdiff_t>(start + w)};
}

SignPattern SignPattern::truncated(int depth) const
{
    SignPattern out;
    for (int l = 1; l <= std::min(depth, this->depth()); ++l)
        out.append_layer(layer(l));
    return out;
}

std::string SignPattern::key() const
{
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] > 0)
            s[i] = '1';
    return s;
}

SignPattern SignPattern::from_key(std::string_view key, const std::vector<int>& widths)
{
    std::size_t total = 0;
    for (int w : widths)
        total += static_cast<std::size_t>(w);
    if (total != key.size())
        throw ParseError("sign key length " + std::to_string(key.size()) + " does not match layer widths");
    SignPattern p;
    std::size_t pos = 0;
    for (int w : widths) {
        std::vector<std::int8_t> bits;
        for (int i = 0; i < w; ++i, ++pos) {
            const char c = key[pos];
            if (c != '0' && c != '1')
                throw ParseError("sign key must contain only '0' and '1'");
            bits.push_back(c == '1' ? 1 : -1);
        }
        p.append_layer(bits);
    }
    return p;
}

namespace {

void check_finite(const Eigen::VectorXd& v, std::size_t op)
{
    if (!v.allFinite())
        throw NumericOverflow("non-finite value after op " + std::to_string(op));
}

} // namespace

ForwardTrace forward_trace(const Network& net, const Eigen::VectorXd& x)
{
    if (x.size() != net.input_dim())
        throw StructuralError("forward: input has length " + std::to_string(x.size()) + ", expected " +
                              std::to_string(net.input_dim()));
    ForwardTrace trace;
    Eigen::VectorXd v = x;
    std::vector<Eigen::VectorXd> skips;
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::dense:
        case LayerKind::flattened_conv:
            v = l.weight * v + l.bias;
            break;
        case LayerKind::activation:
            trace.pre_activations.push_back(v);
            for (Eigen::Index k = 0; k < v.size(); ++k)
                v(k) = two_slope(v(k), l.slope_pos, l.slope_neg);
            break;
        case LayerKind::batchnorm:
            v = l.bn_scale.cwiseProduct(v) + l.bn_shift;
            break;
        case LayerKind::residual_begin:
            skips.push_back(v);
            break;
        case LayerKind::residual_end:
            v += skips.back();
            skips.pop_back();
            break;
        }
        check_finite(v, i);
    }
    trace.output = std::move(v);
    return trace;
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x)
{
    return forward_trace(net, x).output;
}

SignPattern sign_pattern(const Network& net, const Eigen::VectorXd& x, int depth)
{
    if (depth < 0 || depth > net.activation_layer_count())
        throw StructuralError("sign_pattern: depth " + std::to_string(depth) + " out of range");
    const ForwardTrace trace = forward_trace(net, x);
    SignPattern p;
    for (int l = 0; l < depth; ++l) {
        const Eigen::VectorXd& pre = trace.pre_activations[static_cast<std::size_t>(l)];
        std::vector<std::int8_t> bits(static_cast<std::size_t>(pre.size()));
        for (Eigen::Index k = 0; k < pre.size(); ++k)
            bits[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(sgn(pre(k)));
        p.append_layer(bits);
    }
    return p;
}

EffectiveAffine effective_affine(const Network& net, const Eigen::VectorXd& ref, int target_layer)
{
    if (ref.size() != net.input_dim())
        throw StructuralError("effective_affine: reference point has the wrong dimension");
    if (target_layer < 1 || target_layer > net.depth())
        throw StructuralError("effective_affine: target layer " + std::to_string(target_layer) + " out of range");

    struct Frame {
        Eigen::MatrixXd W;
        Eigen::VectorXd b;
        Eigen::VectorXd v;
    };
    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(net.input_dim(), net.input_dim());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(net.input_dim());
    Eigen::VectorXd v = ref; // forward value at ref, source of the slope matrices
    std::vector<Frame> skips;
    int seen = 0;

    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::dense:
        case LayerKind::flattened_conv:
            W = l.weight * W;
            b = l.weight * b + l.bias;
            v = l.weight * v + l.bias;
            break;
        case LayerKind::activation: {
            if (++seen == target_layer)
                return EffectiveAffine{std::move(W), std::move(b)};
            Eigen::VectorXd gamma(v.size());
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                gamma(k) = slope_selector(v(k), l.slope_pos, l.slope_neg);
                v(k) = two_slope(v(k), l.slope_pos, l.slope_neg);
            }
            W = gamma.asDiagonal() * W;
            b = gamma.cwiseProduct(b);
            break;
        }
        case LayerKind::batchnorm:
            W = l.bn_scale.asDiagonal() * W;
            b = l.bn_scale.cwiseProduct(b) + l.bn_shift;
            v = l.bn_scale.cwiseProduct(v) + l.bn_shift;
            break;
        case LayerKind::residual_begin:
            skips.push_back(Frame{W, b, v});
            break;
        case LayerKind::residual_end:
            W += skips.back().W;
            b += skips.back().b;
            v += skips.back().v;
            skips.pop_back();
            break;
        }
        check_finite(v, i);
    }
    if (!W.allFinite() || !b.allFinite())
        throw NumericOverflow("effective_affine: non-finite effective parameters");
    return EffectiveAffine{std::move(W), std::move(b)};
}

LayerHyperplanes layer_hyperplanes(const Network& net, const Eigen::VectorXd& ref, int layer, const Tolerances& tol)
{
    if (layer < 1 || layer > net.activation_layer_count())
        throw StructuralError("layer_hyperplanes: layer " + std::to_string(layer) + " is not an activation layer");
    const EffectiveAffine eff = effective_affine(net, ref, layer);
    LayerHyperplanes out;
    for (Eigen::Index i = 0; i < eff.W.rows(); ++i) {
        const int neuron = static_cast<int>(i);
        if (eff.W.row(i).norm() <= tol.eps_zero_normal) {
            out.fixed.push_back(FixedNeuron{neuron, sgn(eff.b(i))});
            continue;
        }
        out.hyperplanes.push_back(NeuronHyperplane{neuron, Hyperplane{eff.W.row(i).transpose(), eff.b(i)}});
    }
    return out;
}

Network fold_batchnorm(const Network& net)
{
    std::vector<LayerSpec> out;
    const auto& layers = net.layers();
    out.reserve(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        if (l.kind != LayerKind::batchnorm) {
            out.push_back(l);
            continue;
        }
        if (!out.empty() && out.back().is_linear_map()) {
            LayerSpec& d = out.back();
            d.weight = l.bn_scale.asDiagonal() * d.weight;
            d.bias = l.bn_scale.cwiseProduct(d.bias) + l.bn_shift;
            continue;
        }
        // Fold forward: collect the run of batchnorms and compose into the next linear op.
        Eigen::VectorXd scale = l.bn_scale;
        Eigen::VectorXd shift = l.bn_shift;
        std::size_t j = i + 1;
        while (j < layers.size() && layers[j].kind == LayerKind::batchnorm) {
            scale = layers[j].bn_scale.cwiseProduct(scale);
            shift = layers[j].bn_scale.cwiseProduct(shift) + layers[j].bn_shift;
            ++j;
        }
        if (j >= layers.size() || !layers[j].is_linear_map())
            throw StructuralError("batchnorm at op " + std::to_string(i) + " is not adjacent to a dense layer");
        LayerSpec d = layers[j];
        d.bias = d.weight * shift + d.bias;
        d.weight = d.weight * scale.asDiagonal();
        out.push_back(std::move(d));
        i = j;
    }
    return Network(net.input_dim(), std::move(out));
}

LayerSpec lower_conv(const ConvSpec& c)
{
    if (c.in_channels <= 0 || c.in_height <= 0 || c.in_width <= 0 || c.out_channels <= 0 || c.kernel_h <= 0 ||
        c.kernel_w <= 0 || c.stride <= 0 || c.padding < 0)
        throw StructuralError("conv2d: shape fields must be positive (padding non-negative)");
    if (c.in_height + 2 * c.padding < c.kernel_h || c.in_width + 2 * c.padding < c.kernel_w)
        throw StructuralError("conv2d: kernel larger than padded input");
    const std::size_t expected = static_cast<std::size_t>(c.out_channels) * static_cast<std::size_t>(c.in_channels) *
                                 static_cast<std::size_t>(c.kernel_h) * static_cast<std::size_t>(c.kernel_w);
    if (c.weight.size() != expected)
        throw StructuralError("conv2d: weight has " + std::to_string(c.weight.size()) + " entries, expected " +
                              std::to_string(expected));
    if (!c.bias.empty() && c.bias.size() != static_cast<std::size_t>(c.out_channels))
        throw StructuralError("conv2d: bias length must equal out_channels");

    const int oh = c.out_height();
    const int ow = c.out_width();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(c.output_size(), c.input_size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(c.output_size());
    auto widx = [&](int o, int ch, int i, int j) {
        return ((static_cast<std::size_t>(o) * c.in_channels + ch) * c.kernel_h + i) * c.kernel_w + j;
    };
    for (int o = 0; o < c.out_channels; ++o) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                const int row = (o * oh + y) * ow + x;
                b(row) = c.bias.empty() ? 0.0 : c.bias[static_cast<std::size_t>(o)];
                for (int ch = 0; ch < c.in_channels; ++ch) {
                    for (int i = 0; i < c.kernel_h; ++i) {
                        const int iy = y * c.stride + i - c.padding;
                        if (iy < 0 || iy >= c.in_height)
                            continue;
                        for (int j = 0; j < c.kernel_w; ++j) {
                            const int ix = x * c.stride + j - c.padding;
                            if (ix < 0 || ix >= c.in_width)
                                continue;
                            const int col = (ch * c.in_height + iy) * c.in_width + ix;
                            W(row, col) += c.weight[widx(o, ch, i, j)];
                        }
                    }
                }
            }
        }
    }
    return LayerSpec::flattened_conv(std::move(W), std::move(b));
}

} // namespace affinelens
