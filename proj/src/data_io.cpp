#include "dbm/data_io.hpp"

#include <zlib.h>

#include <fstream>

#include "dbm/rng.hpp"

namespace dbm {

namespace {

uint32_t read_be32(std::span<const uint8_t> bytes, size_t offset) {
  if (offset + 4 > bytes.size()) throw TruncationError("IDX header truncated");
  return (uint32_t{bytes[offset]} << 24) | (uint32_t{bytes[offset + 1]} << 16) |
         (uint32_t{bytes[offset + 2]} << 8) | uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

}  // namespace

uint32_t crc32_of(std::span<const uint8_t> bytes) {
  return static_cast<uint32_t>(
      ::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

RawImages parse_idx_images(std::span<const uint8_t> bytes) {
  if (read_be32(bytes, 0) != kImageMagic)
    throw BadMagicError("not an IDX image file (bad magic)");
  const uint32_t count = read_be32(bytes, 4);
  const uint32_t rows = read_be32(bytes, 8);
  const uint32_t cols = read_be32(bytes, 12);
  if (count > (1u << 24) || rows > 4096 || cols > 4096)
    throw FormatError("IDX dimensions implausibly large");
  const size_t expected = size_t{count} * rows * cols;
  if (bytes.size() < 16 + expected) throw TruncationError("IDX payload truncated");
  if (bytes.size() > 16 + expected) throw FormatError("IDX trailing bytes");
  RawImages img;
  img.count = static_cast<int>(count);
  img.rows = static_cast<int>(rows);
  img.cols = static_cast<int>(cols);
  img.pixels.assign(bytes.begin() + 16, bytes.end());
  return img;
}

std::vector<uint8_t> parse_idx_labels(std::span<const uint8_t> bytes) {
  if (read_be32(bytes, 0) != kLabelMagic)
    throw BadMagicError("not an IDX label file (bad magic)");
  const uint32_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + count) throw TruncationError("IDX payload truncated");
  if (bytes.size() > 8 + count) throw FormatError("IDX trailing bytes");
  return std::vector<uint8_t>(bytes.begin() + 8, bytes.end());
}

std::vector<uint8_t> serialize_idx_images(const RawImages& images) {
  std::vector<uint8_t> out;
  out.reserve(16 + images.pixels.size());
  append_be32(out, kImageMagic);
  append_be32(out, static_cast<uint32_t>(images.count));
  append_be32(out, static_cast<uint32_t>(images.rows));
  append_be32(out, static_cast<uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<uint8_t> maybe_gunzip(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1f || bytes[1] != 0x8b)
    return std::vector<uint8_t>(bytes.begin(), bytes.end());
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
    throw IoError("inflateInit failed");
  std::vector<uint8_t> out;
  std::vector<uint8_t> buf(1 << 16);
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  int ret = Z_OK;
  do {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("gzip stream corrupt");
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
  } while (ret != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

BinaryDataset binarize(const RawImages& images, int threshold) {
  BinaryDataset ds;
  ds.count = images.count;
  ds.image_height = images.rows;
  ds.image_width = images.cols;
  ds.dim = images.rows * images.cols;
  ds.bits.resize(images.pixels.size());
  for (size_t i = 0; i < images.pixels.size(); ++i)
    ds.bits[i] = images.pixels[i] >= threshold ? 1 : 0;
  ds.source_checksum = crc32_of(images.pixels);
  return ds;
}

Matrix BinaryDataset::batch(const std::vector<int>& indices) const {
  Matrix out(indices.size(), dim);
  for (size_t r = 0; r < indices.size(); ++r) {
    const uint8_t* row = bits.data() + size_t{static_cast<size_t>(indices[r])} * dim;
    for (int c = 0; c < dim; ++c) out(r, c) = row[c];
  }
  return out;
}

std::vector<bool> BinaryDataset::example(int index) const {
  const uint8_t* row = bits.data() + size_t{static_cast<size_t>(index)} * dim;
  return std::vector<bool>(row, row + dim);
}

std::vector<std::vector<int>> minibatches(int count, int batch_size,
                                          uint64_t seed, uint64_t epoch) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (batch_size > count) throw ConfigError("batch size exceeds dataset size");
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  // Fisher-Yates with a stream keyed on (seed, epoch).
  CounterRng rng(seed, 0x9d5c0f31ULL + epoch);
  for (int i = count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next() % static_cast<uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<int>> batches;
  const int n_batches = count / batch_size;
  batches.reserve(n_batches);
  for (int b = 0; b < n_batches; ++b)
    batches.emplace_back(order.begin() + size_t{static_cast<size_t>(b)} * batch_size,
                         order.begin() + size_t{static_cast<size_t>(b) + 1} * batch_size);
  return batches;
}

}  // namespace dbm
