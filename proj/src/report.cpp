#include "dbm/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dbm/data_io.hpp"
#include "dbm/regularizer.hpp"

namespace dbm {

Matrix project_filters(const ModelParams& params, int layer, int top_k) {
  if (layer < 1 || layer > params.depth())
    throw DimensionError("filter projection layer out of range");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (layer == 1) return params.weights[0];
  const Matrix lower = project_filters(params, layer - 1, top_k);
  const Matrix& w = params.weights[layer - 1];  // fan-in x N_layer
  Matrix out = Matrix::Zero(lower.rows(), w.cols());
  const int fan_in = static_cast<int>(w.rows());
  const int keep = std::min(top_k, fan_in);
  std::vector<int> order(fan_in);
  for (int unit = 0; unit < w.cols(); ++unit) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](int a, int b) {
                        return std::abs(w(a, unit)) > std::abs(w(b, unit));
                      });
    for (int r = 0; r < keep; ++r)
      out.col(unit) += w(order[r], unit) * lower.col(order[r]);
  }
  return out;
}

TileSheet render_tiles(const Matrix& filters, int image_height, int image_width,
                       int cols, int gutter, uint8_t gutter_value) {
  if (filters.rows() != int64_t{image_height} * image_width)
    throw DimensionError("filter length does not match image dimensions");
  if (cols < 1) throw ConfigError("tile columns must be >= 1");
  const int n = static_cast<int>(filters.cols());
  const int rows = (n + cols - 1) / cols;
  TileSheet sheet;
  sheet.width = cols * (image_width + gutter) - gutter;
  sheet.height = rows * (image_height + gutter) - gutter;
  sheet.pixels.assign(size_t{static_cast<size_t>(sheet.width)} * sheet.height,
                      gutter_value);
  for (int t = 0; t < n; ++t) {
    const int tr = t / cols;
    const int tc = t % cols;
    const double lo = filters.col(t).minCoeff();
    const double hi = filters.col(t).maxCoeff();
    const double range = hi - lo;
    for (int y = 0; y < image_height; ++y) {
      for (int x = 0; x < image_width; ++x) {
        const double v = filters(y * image_width + x, t);
        const uint8_t px =
            range > 0.0
                ? static_cast<uint8_t>(std::lround((v - lo) / range * 255.0))
                : uint8_t{128};
        const int py = tr * (image_height + gutter) + y;
        const int qx = tc * (image_width + gutter) + x;
        sheet.pixels[size_t{static_cast<size_t>(py)} * sheet.width + qx] = px;
      }
    }
  }
  return sheet;
}

std::vector<uint8_t> encode_pgm(const TileSheet& sheet) {
  std::ostringstream header;
  header << "P5\n" << sheet.width << " " << sheet.height << "\n255\n";
  const std::string h = header.str();
  std::vector<uint8_t> out(h.begin(), h.end());
  out.insert(out.end(), sheet.pixels.begin(), sheet.pixels.end());
  return out;
}

void write_pgm(const std::string& path, const TileSheet& sheet) {
  write_file(path, encode_pgm(sheet));
}

std::vector<LayerNormReport> norm_report(const ModelParams& params,
                                         const std::vector<Vector>& init_norms) {
  if (init_norms.size() != params.weights.size())
    throw DimensionError("initial norm layer count mismatch");
  std::vector<LayerNormReport> reports;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    LayerNormReport rep;
    rep.layer = static_cast<int>(l) + 1;
    rep.norms = column_norms(params.weights[l]);
    rep.init_norms = init_norms[l];
    if (rep.init_norms.size() != rep.norms.size())
      throw DimensionError("initial norm length mismatch");
    rep.mean = rep.norms.mean();
    // Two-pass variance; single-pass accumulation cancels badly here.
    rep.variance = (rep.norms.array() - rep.mean).square().sum() /
                   static_cast<double>(rep.norms.size());
    rep.cv = rep.mean != 0.0 ? std::sqrt(rep.variance) / rep.mean : 0.0;
    rep.min = rep.norms.minCoeff();
    rep.max = rep.norms.maxCoeff();
    for (int i = 0; i < rep.norms.size(); ++i)
      if (rep.norms[i] < 2.0 * rep.init_norms[i]) rep.dead_count += 1;
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_norm_csv(std::ostream& os,
                    const std::vector<LayerNormReport>& reports) {
  os << "layer,unit,norm,init_norm,dead\n";
  for (const auto& rep : reports) {
    for (int i = 0; i < rep.norms.size(); ++i) {
      os << rep.layer << ',' << i << ',' << rep.norms[i] << ','
         << rep.init_norms[i] << ','
         << (rep.norms[i] < 2.0 * rep.init_norms[i] ? 1 : 0) << '\n';
    }
    os << rep.layer << ",summary," << rep.mean << ',' << rep.variance << ','
       << rep.dead_count << '\n';
  }
}

}  // namespace dbm
