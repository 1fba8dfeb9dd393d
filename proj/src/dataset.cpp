#include "phaselab/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phaselab {

void Dataset::validate() const {
    if (n < 1 || d < 1)
        throw std::invalid_argument("dataset: need n >= 1 and d >= 1");
    if (features.size() != n * d)
        throw std::invalid_argument("dataset: feature matrix size mismatch");
    if (labels.size() != n)
        throw std::invalid_argument("dataset: label count mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] != 1 && labels[i] != -1)
            throw std::invalid_argument("dataset: label not in {-1,+1} at index " +
                                        std::to_string(i));
    for (double x : features)
        if (!std::isfinite(x))
            throw std::invalid_argument("dataset: non-finite feature value");
    if (!weights.empty()) {
        if (weights.size() != n)
            throw std::invalid_argument("dataset: weight count mismatch");
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("dataset: negative weight");
            sum += w;
        }
        if (std::fabs(sum - 1.0) >= 1e-12)
            throw std::invalid_argument("dataset: weights do not sum to 1");
    }
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& meta_path) {
    ds.validate();
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    for (std::size_t i = 0; i < ds.n; ++i) {
        csv << ds.labels[i];
        for (std::size_t j = 0; j < ds.d; ++j)
            csv << ',' << format_double(ds.at(i, j));
        csv << '\n';
    }

    nlohmann::json side;
    side["n"] = ds.n;
    side["d"] = ds.d;
    side["meta"] = ds.meta;
    if (!ds.weights.empty()) side["weights"] = ds.weights;
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open " + meta_path);
    meta << side.dump(2) << '\n';
}

Dataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
    std::ifstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open " + meta_path);
    nlohmann::json side = nlohmann::json::parse(meta);

    Dataset ds;
    ds.n = side.at("n").get<std::size_t>();
    ds.d = side.at("d").get<std::size_t>();
    ds.meta = side.value("meta", nlohmann::json::object());
    if (side.contains("weights"))
        ds.weights = side["weights"].get<std::vector<double>>();

    ds.features.reserve(ds.n * ds.d);
    ds.labels.reserve(ds.n);
    std::ifstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        ds.labels.push_back(std::stoi(cell));
        while (std::getline(ss, cell, ','))
            ds.features.push_back(std::stod(cell));
    }
    ds.validate();
    return ds;
}

} // namespace phaselab
