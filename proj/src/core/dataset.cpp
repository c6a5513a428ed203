#include "eenet/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "eenet/errors.hpp"
#include "eenet/format.hpp"
#include "eenet/rng.hpp"

namespace eenet {

void Dataset::validate() const {
    if (samples.empty()) {
        throw InputError("dataset is empty");
    }
    if (num_classes == 0 || feature_dim == 0) {
        throw ValidationError("dataset num_classes and feature_dim must be positive");
    }
    for (size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (s.label < 1 || static_cast<size_t>(s.label) > num_classes) {
            throw ValidationError("sample " + std::to_string(i + 1) + ": label " +
                                  std::to_string(s.label) + " out of range [1.." +
                                  std::to_string(num_classes) + "]");
        }
        if (!s.features.is_vector() || s.features.numel() != feature_dim) {
            throw ValidationError("sample " + std::to_string(i + 1) + ": feature length " +
                                  std::to_string(s.features.numel()) + " != " +
                                  std::to_string(feature_dim));
        }
        s.features.check_finite("dataset features");
    }
}

std::vector<double> cluster_center(size_t k, size_t dim, double separation) {
    std::vector<double> center(dim, 0.0);
    center[k % dim] = separation * static_cast<double>(1 + k / dim);
    return center;
}

Dataset generate_clusters(size_t num_classes, size_t dim, size_t per_class,
                          double separation, double noise_sigma, uint64_t seed) {
    if (num_classes == 0 || dim == 0 || per_class == 0) {
        throw InputError("generate_clusters counts must be positive");
    }
    if (separation <= 0.0 || noise_sigma <= 0.0) {
        throw InputError("separation and noise_sigma must be positive");
    }
    Dataset ds;
    ds.num_classes = num_classes;
    ds.feature_dim = dim;
    ds.samples.reserve(num_classes * per_class);
    Xoshiro256ss rng(derive_seed(seed, SeedDomain::DataGen));
    for (size_t k = 0; k < num_classes; ++k) {
        const std::vector<double> center = cluster_center(k, dim, separation);
        for (size_t i = 0; i < per_class; ++i) {
            std::vector<double> values(dim);
            for (size_t d = 0; d < dim; ++d) {
                values[d] = center[d] + noise_sigma * rng.normal();
            }
            ds.samples.push_back({Tensor::vector(std::move(values)), static_cast<int>(k) + 1});
        }
    }
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InputError("test_fraction must lie in (0, 1)");
    }
    dataset.validate();

    std::vector<std::vector<size_t>> by_class(dataset.num_classes);
    for (size_t i = 0; i < dataset.size(); ++i) {
        by_class[dataset.samples[i].label - 1].push_back(i);
    }

    Dataset train, test;
    train.num_classes = test.num_classes = dataset.num_classes;
    train.feature_dim = test.feature_dim = dataset.feature_dim;
    for (size_t k = 0; k < by_class.size(); ++k) {
        auto& indices = by_class[k];
        Xoshiro256ss rng(derive_seed(seed, SeedDomain::Split, k));
        // Fisher-Yates
        for (size_t i = indices.size(); i > 1; --i) {
            std::swap(indices[i - 1], indices[rng.next_below(i)]);
        }
        const size_t n_test = static_cast<size_t>(
            std::llround(test_fraction * static_cast<double>(indices.size())));
        for (size_t i = 0; i < indices.size(); ++i) {
            (i < n_test ? test : train).samples.push_back(dataset.samples[indices[i]]);
        }
    }
    if (train.samples.empty() || test.samples.empty()) {
        throw InputError("split produced an empty part; adjust test_fraction");
    }
    return {std::move(train), std::move(test)};
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << dataset.num_classes << ' ' << dataset.feature_dim << ' ' << dataset.size() << '\n';
    for (const Sample& s : dataset.samples) {
        out << s.label;
        for (double v : s.features.data) {
            out << ' ' << format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

namespace {

long parse_count(const std::string& token, const char* what, size_t line_no) {
    try {
        size_t pos = 0;
        const long v = std::stol(token, &pos);
        if (pos != token.size() || v <= 0) {
            throw std::invalid_argument("bad");
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": invalid " + std::string(what) +
                         " '" + token + "'");
    }
}

} // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw ParseError(path + ": line 1: empty file, expected 'K dim N' header");
    }
    std::istringstream header(line);
    std::string k_tok, dim_tok, n_tok, extra;
    if (!(header >> k_tok >> dim_tok >> n_tok) || (header >> extra)) {
        throw ParseError(path + ": line 1: expected header 'K dim N'");
    }
    Dataset ds;
    ds.num_classes = static_cast<size_t>(parse_count(k_tok, "class count", 1));
    ds.feature_dim = static_cast<size_t>(parse_count(dim_tok, "feature dim", 1));
    const size_t n = static_cast<size_t>(parse_count(n_tok, "sample count", 1));

    ds.samples.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const size_t line_no = i + 2;
        if (!std::getline(in, line)) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": unexpected end of file, expected " + std::to_string(n) +
                             " samples");
        }
        std::istringstream row(line);
        long label = 0;
        if (!(row >> label)) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": missing label");
        }
        if (label < 1 || static_cast<size_t>(label) > ds.num_classes) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": label " +
                                  std::to_string(label) + " out of range [1.." +
                                  std::to_string(ds.num_classes) + "]");
        }
        std::vector<double> values(ds.feature_dim);
        for (size_t d = 0; d < ds.feature_dim; ++d) {
            if (!(row >> values[d])) {
                throw ParseError(path + ": line " + std::to_string(line_no) + ": offset " +
                                 std::to_string(d + 1) + ": expected " +
                                 std::to_string(ds.feature_dim) + " features");
            }
        }
        std::string trailing;
        if (row >> trailing) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": trailing content '" + trailing + "'");
        }
        ds.samples.push_back({Tensor::vector(std::move(values)), static_cast<int>(label)});
    }
    ds.validate();
    return ds;
}

} // namespace eenet
