#include "eenet/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eenet/errors.hpp"
#include "eenet/format.hpp"

namespace eenet {

namespace {

using nlohmann::json;

void write_doubles(std::ostream& out, const std::vector<double>& values) {
    out << '[';
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << format_double(values[i]);
    }
    out << ']';
}

const char* kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::Dense:
        return "dense";
    case LayerKind::ReLU:
        return "relu";
    case LayerKind::AvgPool:
        return "avgpool";
    }
    return "?";
}

void write_layer(std::ostream& out, const Layer& layer) {
    out << "{\"kind\":\"" << kind_name(layer.kind) << "\",\"dims\":[";
    switch (layer.kind) {
    case LayerKind::Dense:
        out << layer.in_dim << ',' << layer.out_dim;
        break;
    case LayerKind::ReLU:
        out << layer.in_dim;
        break;
    case LayerKind::AvgPool:
        out << layer.in_dim << ',' << layer.pool_factor;
        break;
    }
    out << "],\"weights\":";
    write_doubles(out, layer.kind == LayerKind::Dense ? layer.weight.data
                                                      : std::vector<double>{});
    out << ",\"bias\":";
    write_doubles(out, layer.kind == LayerKind::Dense && layer.has_bias
                           ? layer.bias.data
                           : std::vector<double>{});
    out << '}';
}

json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void check_version(const json& doc, const std::string& path) {
    if (!doc.is_object() || !doc.contains("format_version")) {
        throw ParseError(path + ": missing format_version");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != 1) {
        throw ValidationError(path + ": unsupported format_version " + std::to_string(version));
    }
}

std::vector<double> doubles_field(const json& obj, const char* field, const std::string& path) {
    if (!obj.contains(field) || !obj.at(field).is_array()) {
        throw ParseError(path + ": missing array field '" + field + "'");
    }
    std::vector<double> out;
    out.reserve(obj.at(field).size());
    for (const auto& v : obj.at(field)) {
        if (!v.is_number()) {
            throw ParseError(path + ": non-numeric entry in '" + field + "'");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

Layer layer_from_json(const json& obj, const std::string& path, size_t index) {
    const std::string where = path + ": layer " + std::to_string(index + 1);
    if (!obj.contains("kind") || !obj.contains("dims")) {
        throw ParseError(where + ": missing kind/dims");
    }
    const std::string kind = obj.at("kind").get<std::string>();
    const auto dims = obj.at("dims").get<std::vector<int64_t>>();
    for (int64_t d : dims) {
        if (d <= 0) {
            throw ValidationError(where + ": dims must be positive");
        }
    }
    std::vector<double> weights = doubles_field(obj, "weights", where);
    std::vector<double> bias = doubles_field(obj, "bias", where);
    if (kind == "dense") {
        if (dims.size() != 2) {
            throw ValidationError(where + ": dense dims must be [in, out]");
        }
        const size_t in_dim = static_cast<size_t>(dims[0]);
        const size_t out_dim = static_cast<size_t>(dims[1]);
        if (weights.size() != in_dim * out_dim) {
            throw ValidationError(where + ": weight count " + std::to_string(weights.size()) +
                                  " != in*out");
        }
        const bool has_bias = !bias.empty();
        if (has_bias && bias.size() != out_dim) {
            throw ValidationError(where + ": bias count " + std::to_string(bias.size()) +
                                  " != out");
        }
        return make_dense(in_dim, out_dim, has_bias,
                          Tensor({out_dim, in_dim}, std::move(weights)),
                          has_bias ? Tensor::vector(std::move(bias)) : Tensor{});
    }
    if (kind == "relu") {
        if (dims.size() != 1) {
            throw ValidationError(where + ": relu dims must be [n]");
        }
        return make_relu(static_cast<size_t>(dims[0]));
    }
    if (kind == "avgpool") {
        if (dims.size() != 2) {
            throw ValidationError(where + ": avgpool dims must be [n, factor]");
        }
        return make_avgpool(static_cast<size_t>(dims[0]), static_cast<size_t>(dims[1]));
    }
    throw ValidationError(where + ": unknown layer kind '" + kind + "'");
}

} // namespace

void save_model(const Model& model, const std::string& path) {
    std::ostringstream out;
    out << "{\"format_version\":1,\"num_classes\":" << model.network.num_classes
        << ",\"layers\":[";
    for (size_t i = 0; i < model.network.layers.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        write_layer(out, model.network.layers[i]);
    }
    out << "],\"internal_classifiers\":[";
    for (size_t i = 0; i < model.ics.classifiers.size(); ++i) {
        const InternalClassifier& ic = model.ics.classifiers[i];
        if (i > 0) {
            out << ',';
        }
        out << "{\"attach_after_layer\":" << ic.attach_after_layer
            << ",\"pool_factor\":" << ic.pool_factor << ",\"in_dim\":" << ic.linear.in_dim
            << ",\"weights\":";
        write_doubles(out, ic.linear.weight.data);
        out << ",\"bias\":";
        write_doubles(out, ic.linear.bias.data);
        out << '}';
    }
    out << "],\"placement_fractions\":";
    write_doubles(out, model.ics.placement_fractions);
    out << "}\n";

    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << out.str())) {
        throw IoError("cannot write " + path);
    }
}

Model load_model(const std::string& path) {
    const json doc = parse_file(path);
    check_version(doc, path);
    if (!doc.contains("num_classes") || !doc.contains("layers")) {
        throw ParseError(path + ": missing num_classes/layers");
    }

    Model model;
    const int64_t k = doc.at("num_classes").get<int64_t>();
    if (k <= 0) {
        throw ValidationError(path + ": num_classes must be positive");
    }
    model.network.num_classes = static_cast<size_t>(k);
    const auto& layers = doc.at("layers");
    if (!layers.is_array() || layers.empty()) {
        throw ValidationError(path + ": layers must be a non-empty array");
    }
    for (size_t i = 0; i < layers.size(); ++i) {
        model.network.layers.push_back(layer_from_json(layers[i], path, i));
    }
    finalize_network(model.network);

    if (doc.contains("internal_classifiers")) {
        size_t prev_attach = 0;
        for (const auto& obj : doc.at("internal_classifiers")) {
            InternalClassifier ic;
            ic.attach_after_layer = obj.at("attach_after_layer").get<size_t>();
            ic.pool_factor = obj.at("pool_factor").get<size_t>();
            const size_t in_dim = obj.at("in_dim").get<size_t>();
            if (ic.attach_after_layer < 1 ||
                ic.attach_after_layer > model.network.layer_count()) {
                throw ValidationError(path + ": internal classifier attach layer out of range");
            }
            if (ic.attach_after_layer <= prev_attach) {
                throw ValidationError(path + ": internal classifier attach points must increase");
            }
            prev_attach = ic.attach_after_layer;
            const size_t width = model.network.layer_output_dim(ic.attach_after_layer);
            if (ic.pool_factor == 0 || in_dim * ic.pool_factor != width) {
                throw ValidationError(path + ": internal classifier pool geometry mismatch");
            }
            std::vector<double> weights = doubles_field(obj, "weights", path);
            std::vector<double> bias = doubles_field(obj, "bias", path);
            if (weights.size() != in_dim * model.network.num_classes ||
                bias.size() != model.network.num_classes) {
                throw ValidationError(path + ": internal classifier parameter count mismatch");
            }
            ic.linear = make_dense(in_dim, model.network.num_classes, true,
                                   Tensor({model.network.num_classes, in_dim}, std::move(weights)),
                                   Tensor::vector(std::move(bias)));
            model.ics.classifiers.push_back(std::move(ic));
        }
    }
    if (doc.contains("placement_fractions")) {
        model.ics.placement_fractions = doc.at("placement_fractions").get<std::vector<double>>();
    }
    return model;
}

void save_class_means(const ClassMeansModel& means, const std::string& path) {
    std::ostringstream out;
    out << "{\"format_version\":1,\"layer_count\":" << means.layer_count
        << ",\"class_count\":" << means.class_count << ",\"means\":[";
    for (size_t j = 0; j < means.means.size(); ++j) {
        if (j > 0) {
            out << ',';
        }
        out << '[';
        for (size_t c = 0; c < means.means[j].size(); ++c) {
            if (c > 0) {
                out << ',';
            }
            write_doubles(out, means.means[j][c].data);
        }
        out << ']';
    }
    out << "],\"normalizers\":[";
    for (size_t j = 0; j < means.normalizers.size(); ++j) {
        if (j > 0) {
            out << ',';
        }
        write_doubles(out, means.normalizers[j]);
    }
    out << "]}\n";

    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << out.str())) {
        throw IoError("cannot write " + path);
    }
}

ClassMeansModel load_class_means(const std::string& path) {
    const json doc = parse_file(path);
    check_version(doc, path);
    if (!doc.contains("layer_count") || !doc.contains("class_count") ||
        !doc.contains("means") || !doc.contains("normalizers")) {
        throw ParseError(path + ": missing layer_count/class_count/means/normalizers");
    }

    ClassMeansModel model;
    model.layer_count = doc.at("layer_count").get<size_t>();
    model.class_count = doc.at("class_count").get<size_t>();
    if (model.layer_count == 0 || model.class_count == 0) {
        throw ValidationError(path + ": layer_count and class_count must be positive");
    }
    const auto& means = doc.at("means");
    const auto& norms = doc.at("normalizers");
    if (means.size() != model.layer_count || norms.size() != model.layer_count) {
        throw ValidationError(path + ": means/normalizers must cover every layer");
    }
    model.means.resize(model.layer_count);
    model.normalizers.resize(model.layer_count);
    for (size_t j = 0; j < model.layer_count; ++j) {
        if (means[j].size() != model.class_count) {
            throw ValidationError(path + ": layer " + std::to_string(j + 1) +
                                  " means must cover every class");
        }
        for (const auto& vec : means[j]) {
            auto values = vec.get<std::vector<double>>();
            if (values.empty()) {
                throw ValidationError(path + ": empty mean vector");
            }
            model.means[j].push_back(Tensor::vector(std::move(values)));
        }
        model.normalizers[j] = norms[j].get<std::vector<double>>();
        if (model.normalizers[j].size() != model.class_count) {
            throw ValidationError(path + ": layer " + std::to_string(j + 1) +
                                  " normalizers must cover every class");
        }
        for (double v : model.normalizers[j]) {
            if (!(v > 0.0)) {
                throw ValidationError(path + ": normalizers must be positive");
            }
        }
    }
    return model;
}

} // namespace eenet
