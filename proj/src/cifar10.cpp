#include "phaselab/cifar10.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace phaselab {

Dataset parse_cifar10_bytes(const std::vector<std::uint8_t>& bytes,
                            const std::set<int>& positive_classes) {
    if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0)
        throw std::runtime_error(
            "cifar10: file length " + std::to_string(bytes.size()) +
            " is not a positive multiple of 3073 (format error)");

    const std::size_t n = bytes.size() / kCifarRecordBytes;
    Dataset ds;
    ds.n = n;
    ds.d = kCifarPixels;
    ds.features.resize(n * kCifarPixels);
    ds.labels.resize(n);
    std::vector<int> raw_labels(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* rec = bytes.data() + i * kCifarRecordBytes;
        int cls = rec[0];
        if (cls > 9)
            throw std::runtime_error("cifar10: label byte " + std::to_string(cls) +
                                     " > 9 at record " + std::to_string(i) +
                                     " (corruption)");
        raw_labels[i] = cls;
        ds.labels[i] = positive_classes.count(cls) ? 1 : -1;
        for (std::size_t p = 0; p < kCifarPixels; ++p)
            ds.features[i * kCifarPixels + p] =
                static_cast<double>(rec[1 + p]) / 255.0;
    }

    ds.meta = {{"generator", "cifar10"},
               {"positive_classes", std::vector<int>(positive_classes.begin(),
                                                     positive_classes.end())},
               {"cifar_raw_labels", raw_labels}};
    return ds;
}

Dataset load_cifar10_binary(const std::vector<std::string>& paths,
                            const std::set<int>& positive_classes) {
    std::vector<std::uint8_t> all;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cifar10: cannot open " + path);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0)
            throw std::runtime_error("cifar10: " + path + " length " +
                                     std::to_string(bytes.size()) +
                                     " is not a positive multiple of 3073");
        all.insert(all.end(), bytes.begin(), bytes.end());
    }
    Dataset ds = parse_cifar10_bytes(all, positive_classes);
    ds.meta["paths"] = paths;
    return ds;
}

std::vector<std::uint8_t> serialize_cifar10(const Dataset& ds) {
    if (ds.d != kCifarPixels || !ds.meta.contains("cifar_raw_labels"))
        throw std::invalid_argument("cifar10: dataset was not parsed from CIFAR records");
    auto raw = ds.meta["cifar_raw_labels"].get<std::vector<int>>();
    if (raw.size() != ds.n)
        throw std::invalid_argument("cifar10: raw label count mismatch");

    std::vector<std::uint8_t> bytes(ds.n * kCifarRecordBytes);
    for (std::size_t i = 0; i < ds.n; ++i) {
        std::uint8_t* rec = bytes.data() + i * kCifarRecordBytes;
        rec[0] = static_cast<std::uint8_t>(raw[i]);
        for (std::size_t p = 0; p < kCifarPixels; ++p)
            rec[1 + p] = static_cast<std::uint8_t>(
                std::lround(ds.at(i, p) * 255.0));
    }
    return bytes;
}

} // namespace phaselab
