#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bqfl {

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

/// Big-endian IDX files: magic 0x00000803 for images, 0x00000801 for labels.
IdxImages read_idx_images(const std::string& path);
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

}  // namespace bqfl
