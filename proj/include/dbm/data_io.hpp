#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dbm/model.hpp"

namespace dbm {

struct RawImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> pixels;  // count * rows * cols, row-major
};

/// Binarized dataset. Examples are stored as packed rows of bits expanded to
/// bytes; `batch` materializes a real-valued minibatch for the linear algebra.
struct BinaryDataset {
  int count = 0;
  int dim = 0;  // = image_height * image_width
  int image_height = 0;
  int image_width = 0;
  std::vector<uint8_t> bits;  // count * dim, each 0 or 1
  uint32_t source_checksum = 0;

  Matrix batch(const std::vector<int>& indices) const;
  std::vector<bool> example(int index) const;
};

// Big-endian IDX image container (magic 0x00000803). Rejects bad magic,
// truncated payloads, and dimension overflow with distinct errors.
RawImages parse_idx_images(std::span<const uint8_t> bytes);

// IDX label container (magic 0x00000801).
std::vector<uint8_t> parse_idx_labels(std::span<const uint8_t> bytes);

// Inverse of parse_idx_images, bit-exact.
std::vector<uint8_t> serialize_idx_images(const RawImages& images);

// Transparent gunzip when the payload starts with the gzip prefix 0x1f 0x8b;
// otherwise returns the input unchanged.
std::vector<uint8_t> maybe_gunzip(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

// Fixed-threshold binarization: pixel >= threshold -> 1.
BinaryDataset binarize(const RawImages& images, int threshold = 128);

// Seeded permutation of [0, count), cut into floor(count/batch_size) full
// batches; the partial remainder is dropped. Deterministic in (seed, epoch).
std::vector<std::vector<int>> minibatches(int count, int batch_size,
                                          uint64_t seed, uint64_t epoch);

uint32_t crc32_of(std::span<const uint8_t> bytes);

}  // namespace dbm
