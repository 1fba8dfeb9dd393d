#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "phaselab/dataset.hpp"

namespace phaselab {

// CIFAR-10 binary format: concatenated 3073-byte records, one label byte in
// 0..9 followed by 3072 pixel bytes.
inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarPixels = 3072;

// Label maps to +1 when the raw class is in positive_classes, -1 otherwise.
// Pixels are scaled to [0,1]. Raw class labels are kept in
// meta["cifar_raw_labels"] so the record stream can be re-serialized.
Dataset load_cifar10_binary(const std::vector<std::string>& paths,
                            const std::set<int>& positive_classes);

Dataset parse_cifar10_bytes(const std::vector<std::uint8_t>& bytes,
                            const std::set<int>& positive_classes);

// Inverse of the parse: rebuilds the raw record stream byte-for-byte.
std::vector<std::uint8_t> serialize_cifar10(const Dataset& ds);

} // namespace phaselab
