#include <string>
#include <vector>

#include <json.hpp>

#include "affinelens/errors.hpp"
#include "affinelens/network.hpp"
#include "json_util.hpp"

namespace affinelens {

using nlohmann::json;

namespace {

void flatten_numbers(const json& v, std::vector<double>& out, const std::string& where)
{
    if (v.is_array()) {
        for (const auto& e : v)
            flatten_numbers(e, out, where);
        return;
    }
    out.push_back(detail::read_number(v, where));
}

int shape_field(const json& shape, const char* key, int fallback, bool required)
{
    auto it = shape.find(key);
    if (it == shape.end()) {
        if (required)
            throw ParseError(std::string("conv2d.shape: missing field \"") + key + "\"");
        return fallback;
    }
    if (!it->is_number_integer())
        throw ParseError(std::string("conv2d.shape: \"") + key + "\" must be an integer");
    return it->get<int>();
}

void parse_layers(const json& arr, std::vector<LayerSpec>& out, const std::string& where)
{
    if (!arr.is_array())
        throw ParseError(where + ": expected an array of layers");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& l = arr[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!l.is_object())
            throw ParseError(at + ": layer must be an object");
        const json& kind_v = detail::require(l, "kind", at);
        if (!kind_v.is_string())
            throw ParseError(at + ": \"kind\" must be a string");
        const std::string kind = kind_v.get<std::string>();
        if (kind == "dense") {
            Eigen::MatrixXd W = detail::read_matrix(detail::require(l, "W", at), at + ".W");
            Eigen::VectorXd b = detail::read_vector(detail::require(l, "b", at), at + ".b");
            out.push_back(LayerSpec::dense(std::move(W), std::move(b)));
        } else if (kind == "activation") {
            const double a = l.contains("a") ? detail::read_number(l["a"], at + ".a") : 1.0;
            const double b = l.contains("b") ? detail::read_number(l["b"], at + ".b") : 0.0;
            out.push_back(LayerSpec::activation(a, b));
        } else if (kind == "batchnorm") {
            Eigen::VectorXd scale = detail::read_vector(detail::require(l, "scale", at), at + ".scale");
            Eigen::VectorXd shift = detail::read_vector(detail::require(l, "shift", at), at + ".shift");
            out.push_back(LayerSpec::batchnorm(std::move(scale), std::move(shift)));
        } else if (kind == "residual") {
            out.push_back(LayerSpec::residual_begin());
            parse_layers(detail::require(l, "body", at), out, at + ".body");
            out.push_back(LayerSpec::residual_end());
        } else if (kind == "conv2d") {
            const json& shape = detail::require(l, "shape", at);
            if (!shape.is_object())
                throw ParseError(at + ".shape: expected an object");
            ConvSpec c;
            c.in_channels = shape_field(shape, "in_channels", 1, true);
            c.in_height = shape_field(shape, "in_height", 1, true);
            c.in_width = shape_field(shape, "in_width", 1, true);
            c.out_channels = shape_field(shape, "out_channels", 1, true);
            c.kernel_h = shape_field(shape, "kernel_h", 1, true);
            c.kernel_w = shape_field(shape, "kernel_w", 1, true);
            c.stride = shape_field(shape, "stride", 1, false);
            c.padding = shape_field(shape, "padding", 0, false);
            flatten_numbers(detail::require(l, "weight", at), c.weight, at + ".weight");
            if (l.contains("bias"))
                flatten_numbers(l["bias"], c.bias, at + ".bias");
            try {
                out.push_back(lower_conv(c));
            } catch (const StructuralError& e) {
                throw ParseError(at + ": " + e.what());
            }
        } else {
            throw ParseError(at + ": unknown layer kind \"" + kind + "\"");
        }
    }
}

json layers_to_json(const std::vector<LayerSpec>& layers, std::size_t& i)
{
    json arr = json::array();
    while (i < layers.size()) {
        const LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::dense:
        case LayerKind::flattened_conv:
            arr.push_back({{"kind", "dense"}, {"W", detail::matrix_to_json(l.weight)}, {"b", detail::vector_to_json(l.bias)}});
            break;
        case LayerKind::activation:
            arr.push_back({{"kind", "activation"}, {"a", l.slope_pos}, {"b", l.slope_neg}});
            break;
        case LayerKind::batchnorm:
            arr.push_back({{"kind", "batchnorm"},
                           {"scale", detail::vector_to_json(l.bn_scale)},
                           {"shift", detail::vector_to_json(l.bn_shift)}});
            break;
        case LayerKind::residual_begin: {
            ++i;
            json body = layers_to_json(layers, i);
            arr.push_back({{"kind", "residual"}, {"body", std::move(body)}});
            break;
        }
        case LayerKind::residual_end:
            return arr;
        }
        ++i;
    }
    return arr;
}

} // namespace

Network parse_network_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("network: document must be an object");
    const int input_dim = detail::require_int(doc, "input_dim", "network");
    std::vector<LayerSpec> layers;
    parse_layers(detail::require(doc, "layers", "network"), layers, "network.layers");
    try {
        return fold_batchnorm(Network(input_dim, std::move(layers)));
    } catch (const StructuralError& e) {
        throw ParseError(std::string("network: ") + e.what());
    }
}

Network load_network(const std::filesystem::path& path)
{
    return parse_network_json(detail::read_file(path));
}

std::string network_to_json(const Network& net)
{
    std::size_t i = 0;
    json doc;
    doc["input_dim"] = net.input_dim();
    doc["layers"] = layers_to_json(net.layers(), i);
    return doc.dump(2);
}

} // namespace affinelens
