#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "affinelens/polytope.hpp"
#include "affinelens/tolerances.hpp"

namespace affinelens {

enum class LayerKind { dense, activation, batchnorm, residual_begin, residual_end, flattened_conv };

const char* to_string(LayerKind kind);

/// One op of a network. Only the fields relevant to `kind` are populated.
struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    Eigen::MatrixXd weight; // dense, flattened_conv: d_out x d_in
    Eigen::VectorXd bias;   // dense, flattened_conv: d_out
    double slope_pos = 1.0; // activation: slope for t > 0
    double slope_neg = 0.0; // activation: slope for t <= 0
    Eigen::VectorXd bn_scale; // batchnorm (inference mode, pre-combined)
    Eigen::VectorXd bn_shift;

    static LayerSpec dense(Eigen::MatrixXd weight, Eigen::VectorXd bias);
    static LayerSpec activation(double slope_pos, double slope_neg);
    static LayerSpec relu() { return activation(1.0, 0.0); }
    static LayerSpec leaky_relu(double negative_slope) { return activation(1.0, negative_slope); }
    static LayerSpec batchnorm(Eigen::VectorXd scale, Eigen::VectorXd shift);
    static LayerSpec residual_begin();
    static LayerSpec residual_end();
    static LayerSpec flattened_conv(Eigen::MatrixXd weight, Eigen::VectorXd bias);

    bool is_linear_map() const { return kind == LayerKind::dense || kind == LayerKind::flattened_conv; }
};

/// A CPA network as an op list; residual blocks are bracketed by begin/end markers
/// and add the block input to the block output.
///
/// Immutable after construction. The constructor validates dimension chaining,
/// marker nesting, finiteness, and that the last op is not an activation.
class Network {
public:
    Network(int input_dim, std::vector<LayerSpec> layers);

    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_dim_; }
    const std::vector<LayerSpec>& layers() const { return layers_; }

    /// Number of activation layers, i.e. L - 1.
    int activation_layer_count() const { return static_cast<int>(activation_ops_.size()); }
    /// Op index of each activation layer, in order.
    const std::vector<std::size_t>& activation_layer_indices() const { return activation_ops_; }
    /// Neuron count of activation layer `depth` (1-based).
    int activation_width(int depth) const;
    std::vector<int> activation_widths() const { return activation_widths_; }
    int total_activation_neurons() const;
    /// Network depth L (activation layers plus the output map).
    int depth() const { return activation_layer_count() + 1; }

private:
    int input_dim_;
    int output_dim_ = 0;
    std::vector<LayerSpec> layers_;
    std::vector<std::size_t> activation_ops_;
    std::vector<int> activation_widths_;
};

/// sgn with the convention sgn(0) = -1.
inline int sgn(double t)
{
    return t > 0.0 ? 1 : -1;
}

/// Two-slope selector: a for t > 0, b for t <= 0, written through sgn.
inline double slope_selector(double t, double a, double b)
{
    const double s = sgn(t);
    return (a * (s + 1.0) - b * (s - 1.0)) / 2.0;
}

/// Two-slope activation: a*t for t > 0, b*t for t <= 0.
inline double two_slope(double t, double a, double b)
{
    return t > 0.0 ? a * t : b * t;
}

/// Sign bits (+1 / -1) of every activation neuron up to some depth, layer-major.
class SignPattern {
public:
    SignPattern() = default;

    void append_layer(const std::vector<std::int8_t>& bits);

    int depth() const { return static_cast<int>(widths_.size()); }
    std::size_t size() const { return bits_.size(); }
    const std::vector<std::int8_t>& bits() const { return bits_; }
    const std::vector<int>& widths() const { return widths_; }
    std::vector<std::int8_t> layer(int depth) const;
    /// Bits of the first `depth` layers.
    SignPattern truncated(int depth) const;

    /// '1' for +1 and '0' for -1, concatenated layer-major.
    std::string key() const;
    static SignPattern from_key(std::string_view key, const std::vector<int>& widths);

    friend bool operator==(const SignPattern&, const SignPattern&) = default;

private:
    std::vector<std::int8_t> bits_;
    std::vector<int> widths_;
};

/// Per-region affine map f(x) = W x + b.
struct EffectiveAffine {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return W * x + b; }
};

/// Network output plus the pre-activation vector recorded at every activation layer.
struct ForwardTrace {
    Eigen::VectorXd output;
    std::vector<Eigen::VectorXd> pre_activations;
};

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x);
ForwardTrace forward_trace(const Network& net, const Eigen::VectorXd& x);

SignPattern sign_pattern(const Network& net, const Eigen::VectorXd& x, int depth);

/// Affine map realized on the region of `ref` by the pre-activation of
/// activation layer `target_layer` (1-based), or by the network output when
/// target_layer == net.depth(). Slope matrices are frozen from the forward pass
/// at `ref`; residual ends add the saved skip map.
EffectiveAffine effective_affine(const Network& net, const Eigen::VectorXd& ref, int target_layer);

struct NeuronHyperplane {
    int neuron = 0;
    Hyperplane plane;
};

/// A neuron whose effective row is constant (zero normal) on the region.
struct FixedNeuron {
    int neuron = 0;
    int sign = -1;
};

struct LayerHyperplanes {
    std::vector<NeuronHyperplane> hyperplanes;
    std::vector<FixedNeuron> fixed;
};

/// Neuron hyperplanes of activation layer `layer` on the region of `ref`.
LayerHyperplanes layer_hyperplanes(const Network& net,
                                   const Eigen::VectorXd& ref,
                                   int layer,
                                   const Tolerances& tol = {});

/// Merges each batchnorm op into the adjacent dense op (preceding if present, else following).
/// Throws StructuralError when neither neighbour is a dense op.
Network fold_batchnorm(const Network& net);

/// 2D convolution over a CHW input, stride/padding equal on both axes.
struct ConvSpec {
    int in_channels = 1;
    int in_height = 1;
    int in_width = 1;
    int out_channels = 1;
    int kernel_h = 1;
    int kernel_w = 1;
    int stride = 1;
    int padding = 0;
    /// [out][in][kh][kw], row-major.
    std::vector<double> weight;
    /// One per output channel; empty means zero.
    std::vector<double> bias;

    int out_height() const { return (in_height + 2 * padding - kernel_h) / stride + 1; }
    int out_width() const { return (in_width + 2 * padding - kernel_w) / stride + 1; }
    int input_size() const { return in_channels * in_height * in_width; }
    int output_size() const { return out_channels * out_height() * out_width(); }
};

/// Dense matrix with the convolution's weight-sharing and zero pattern (CHW in, CHW out).
LayerSpec lower_conv(const ConvSpec& conv);

// Interchange format, see README. The loader folds batchnorm and lowers conv2d eagerly.
Network parse_network_json(std::string_view text);
Network load_network(const std::filesystem::path& path);
std::string network_to_json(const Network& net);

} // namespace affinelens
