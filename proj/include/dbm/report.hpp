#pragma once

#include <iosfwd>
#include <string>

#include "dbm/model.hpp"

namespace dbm {

// Visualizes hidden units in pixel space. Layer 1 filters are the columns of
// W(1); a unit in layer l >= 2 is projected as the linear combination of the
// projected lower-layer filters over its top_k largest-magnitude connections.
Matrix project_filters(const ModelParams& params, int layer, int top_k = 20);

struct TileSheet {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major grayscale
};

// Per-tile min-max normalization to [0, 255]; constant tiles render as
// mid-gray 128. Filters are the columns of `filters`, laid out left to
// right, `cols` per row, one gutter pixel band between tiles.
TileSheet render_tiles(const Matrix& filters, int image_height, int image_width,
                       int cols, int gutter = 1, uint8_t gutter_value = 0);

// Binary PGM (P5), maxval 255.
std::vector<uint8_t> encode_pgm(const TileSheet& sheet);
void write_pgm(const std::string& path, const TileSheet& sheet);

struct LayerNormReport {
  int layer = 0;
  Vector norms;
  Vector init_norms;
  double mean = 0, variance = 0, cv = 0, min = 0, max = 0;
  int dead_count = 0;
};

// Column-norm diagnostics per layer; dead = norm < 2x its initial norm.
std::vector<LayerNormReport> norm_report(const ModelParams& params,
                                         const std::vector<Vector>& init_norms);

// CSV: one row per (layer, unit) plus a summary row per layer.
void write_norm_csv(std::ostream& os, const std::vector<LayerNormReport>& reports);

}  // namespace dbm
