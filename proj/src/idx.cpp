#include "bqfl/idx.hpp"

#include <fstream>
#include <stdexcept>

namespace bqfl {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::runtime_error("truncated IDX header in " + path);
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::ifstream open(const std::string& path, std::uint32_t magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open IDX file " + path);
    }
    const auto found = read_be32(in, path);
    if (found != magic) {
        throw std::runtime_error("bad IDX magic in " + path);
    }
    return in;
}

void read_payload(std::istream& in, std::vector<std::uint8_t>& out, const std::string& path) {
    if (!in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()))) {
        throw std::runtime_error("truncated IDX payload in " + path);
    }
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
    auto in = open(path, 0x00000803U);
    IdxImages images;
    images.count = read_be32(in, path);
    images.rows = read_be32(in, path);
    images.cols = read_be32(in, path);
    images.pixels.resize(images.count * images.rows * images.cols);
    read_payload(in, images.pixels, path);
    return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
    auto in = open(path, 0x00000801U);
    std::vector<std::uint8_t> labels(read_be32(in, path));
    read_payload(in, labels, path);
    return labels;
}

}  // namespace bqfl
