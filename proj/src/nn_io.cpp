#include <cstdint>
#include <vector>

#include "guardnet/nn.hpp"
#include "wire.hpp"

namespace guardnet {

namespace {

constexpr char kMagic[4] = {'S', 'N', 'E', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

void serialize_network(std::vector<std::uint8_t>& out, const Network& net) {
    out.insert(out.end(), kMagic, kMagic + 4);
    wire::put_u32le(out, kFormatVersion);
    wire::put_u32le(out, static_cast<std::uint32_t>(net.layers().size()));
    for (const Layer& layer : net.layers()) {
        wire::put_u32le(out, static_cast<std::uint32_t>(layer.kind));
        switch (layer.kind) {
        case LayerKind::dense:
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.in_dim));
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.out_dim));
            for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                wire::put_f64le(out, layer.weight[i]);
            }
            for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                wire::put_f64le(out, layer.bias[i]);
            }
            break;
        case LayerKind::relu:
        case LayerKind::flatten:
            break;
        case LayerKind::conv2d:
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.in_ch));
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.out_ch));
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.kernel));
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.stride));
            for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                wire::put_f64le(out, layer.weight[i]);
            }
            for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                wire::put_f64le(out, layer.bias[i]);
            }
            break;
        case LayerKind::maxpool2d:
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.window));
            wire::put_u32le(out, static_cast<std::uint32_t>(layer.stride));
            break;
        }
    }
}

Network parse_network(wire::Reader& reader) {
    const std::size_t magic_offset = reader.offset();
    char magic[4];
    reader.bytes(magic, 4, "model magic");
    if (magic[0] != kMagic[0] || magic[1] != kMagic[1] || magic[2] != kMagic[2] ||
        magic[3] != kMagic[3]) {
        throw FormatError("bad model magic, expected \"SNET\"", magic_offset);
    }
    const std::size_t version_offset = reader.offset();
    const std::uint32_t version = reader.u32le("format version");
    if (version != kFormatVersion) {
        throw FormatError("unsupported model format version " + std::to_string(version) +
                              " (supported: " + std::to_string(kFormatVersion) + ")",
                          version_offset);
    }
    const std::uint32_t layer_count = reader.u32le("layer count");
    if (layer_count == 0) {
        throw IntegrityError("model file declares zero layers");
    }

    std::vector<Layer> layers;
    layers.reserve(layer_count);
    for (std::uint32_t li = 0; li < layer_count; ++li) {
        const std::size_t kind_offset = reader.offset();
        const std::uint32_t kind = reader.u32le("layer kind");
        switch (static_cast<LayerKind>(kind)) {
        case LayerKind::dense: {
            const std::uint32_t in_dim = reader.u32le("dense in_dim");
            const std::uint32_t out_dim = reader.u32le("dense out_dim");
            if (in_dim == 0 || out_dim == 0) {
                throw IntegrityError("layer " + std::to_string(li) +
                                     ": dense dimensions must be positive");
            }
            Layer layer = Layer::dense(in_dim, out_dim);
            for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                layer.weight[i] = reader.f64le("dense weights");
            }
            for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                layer.bias[i] = reader.f64le("dense bias");
            }
            layers.push_back(std::move(layer));
            break;
        }
        case LayerKind::relu:
            layers.push_back(Layer::relu());
            break;
        case LayerKind::flatten:
            layers.push_back(Layer::flatten());
            break;
        case LayerKind::conv2d: {
            const std::uint32_t in_ch = reader.u32le("conv2d in_ch");
            const std::uint32_t out_ch = reader.u32le("conv2d out_ch");
            const std::uint32_t kernel = reader.u32le("conv2d kernel");
            const std::uint32_t stride = reader.u32le("conv2d stride");
            if (in_ch == 0 || out_ch == 0 || kernel == 0 || stride == 0) {
                throw IntegrityError("layer " + std::to_string(li) +
                                     ": conv2d parameters must be positive");
            }
            Layer layer = Layer::conv2d(in_ch, out_ch, kernel, stride);
            for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                layer.weight[i] = reader.f64le("conv2d weights");
            }
            for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                layer.bias[i] = reader.f64le("conv2d bias");
            }
            layers.push_back(std::move(layer));
            break;
        }
        case LayerKind::maxpool2d: {
            const std::uint32_t window = reader.u32le("maxpool2d window");
            const std::uint32_t stride = reader.u32le("maxpool2d stride");
            if (window == 0 || stride == 0) {
                throw IntegrityError("layer " + std::to_string(li) +
                                     ": maxpool2d parameters must be positive");
            }
            layers.push_back(Layer::maxpool2d(window, stride));
            break;
        }
        default:
            throw ParseError("unknown layer kind tag " + std::to_string(kind), kind_offset);
        }
    }

    try {
        return Network(std::move(layers));
    } catch (const ShapeError& e) {
        throw IntegrityError(std::string("model layers do not compose: ") + e.what());
    }
}

void save_model(const Network& net, const std::string& path) {
    std::vector<std::uint8_t> bytes;
    serialize_network(bytes, net);
    wire::write_file(path, bytes);
}

Network load_model(const std::string& path) {
    const std::vector<std::uint8_t> bytes = wire::read_file(path);
    wire::Reader reader(bytes);
    Network net = parse_network(reader);
    if (!reader.at_end()) {
        throw ParseError("trailing bytes after model payload", reader.offset());
    }
    return net;
}

}  // namespace guardnet
