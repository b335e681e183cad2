#include <cstring>

#include "dbm/data_io.hpp"
#include "dbm/trainer.hpp"

namespace dbm {

namespace {

constexpr char kMagic[8] = {'B', 'F', 'D', 'B', 'M', '0', '0', '1'};

// Little-endian primitive writers. Host is assumed little-endian (checked
// once at load).
template <typename T>
void put(std::vector<uint8_t>& out, T v) {
  uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size())
      throw TruncationError("checkpoint truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  size_t pos() const { return pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

// Header fields are length-prefixed so a reader can skip unknown trailers.
struct FieldWriter {
  std::vector<uint8_t>& out;
  std::vector<uint8_t> buf;
  void commit() {
    put<uint32_t>(out, static_cast<uint32_t>(buf.size()));
    out.insert(out.end(), buf.begin(), buf.end());
    buf.clear();
  }
};

void put_matrix(std::vector<uint8_t>& out, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

void put_vector(std::vector<uint8_t>& out, const Vector& v) {
  for (int i = 0; i < v.size(); ++i) put<double>(out, v[i]);
}

}  // namespace

std::vector<uint8_t> checkpoint_serialize(const TrainerState& state,
                                          const TrainingConfig& config) {
  const ModelParams& p = state.params;
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);

  FieldWriter f{out, {}};
  // layer sizes
  put<uint32_t>(f.buf, static_cast<uint32_t>(p.layer_sizes.size()));
  for (int s : p.layer_sizes) put<uint32_t>(f.buf, static_cast<uint32_t>(s));
  f.commit();
  // chain count
  put<uint32_t>(f.buf, static_cast<uint32_t>(state.chains.chain_count()));
  f.commit();
  // update index + seed
  put<uint64_t>(f.buf, static_cast<uint64_t>(state.update_index));
  put<uint64_t>(f.buf, config.seed);
  f.commit();
  // config scalars
  put<double>(f.buf, config.learning_rate);
  put<double>(f.buf, config.gamma);
  put<double>(f.buf, config.mu_damping);
  put<double>(f.buf, config.mf_tol);
  put<double>(f.buf, config.weight_init_std);
  put<uint32_t>(f.buf, static_cast<uint32_t>(config.batch_size));
  put<uint32_t>(f.buf, static_cast<uint32_t>(config.gibbs_k));
  put<uint32_t>(f.buf, static_cast<uint32_t>(config.mf_max_sweeps));
  put<uint8_t>(f.buf, config.regularizer_enabled ? 1 : 0);
  put<uint64_t>(f.buf, static_cast<uint64_t>(config.n_updates));
  f.commit();
  // regularizer alpha + mu
  for (double a : state.reg.alpha) put<double>(f.buf, a);
  for (double m : state.reg.mu) put<double>(f.buf, m);
  f.commit();
  // initial column norms
  for (const auto& n : state.init_norms) put_vector(f.buf, n);
  f.commit();
  // RNG positions: steps taken, then one draw counter per chain
  put<uint64_t>(f.buf, state.chains.steps_taken);
  for (const auto& rng : state.chains.rngs) put<uint64_t>(f.buf, rng.counter());
  f.commit();

  // parameter tensors, float64 little-endian row-major
  for (const auto& w : p.weights) put_matrix(out, w);
  put_vector(out, p.vis_bias);
  for (const auto& d : p.hid_bias) put_vector(out, d);

  // chain bit-states, 8 per byte, LSB first, padded per chain
  for (const auto& s : state.chains.states) {
    uint8_t byte = 0;
    int nbits = 0;
    for (const auto& layer : s.layers) {
      for (bool bit : layer) {
        if (bit) byte |= uint8_t(1u << nbits);
        if (++nbits == 8) {
          out.push_back(byte);
          byte = 0;
          nbits = 0;
        }
      }
    }
    if (nbits > 0) out.push_back(byte);
  }

  put<uint32_t>(out, crc32_of(out));
  return out;
}

CheckpointData checkpoint_parse(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12) throw TruncationError("checkpoint too short");
  if (std::memcmp(bytes.data(), kMagic, 5) != 0)
    throw BadMagicError("not a checkpoint file");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw VersionError("unsupported checkpoint version");
  const auto body = bytes.subspan(0, bytes.size() - 4);
  uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (stored != crc32_of(body))
    throw ChecksumError("checkpoint checksum mismatch");

  Reader r(body.subspan(8));
  auto begin_field = [&] { return r.get<uint32_t>(); };

  CheckpointData out;
  TrainingConfig& cfg = out.config;
  TrainerState& st = out.state;

  begin_field();
  const uint32_t n_layers = r.get<uint32_t>();
  if (n_layers < 2 || n_layers > 64) throw FormatError("bad layer count");
  std::vector<int> sizes(n_layers);
  for (auto& s : sizes) s = static_cast<int>(r.get<uint32_t>());
  cfg.layer_sizes = sizes;
  const int L = static_cast<int>(n_layers) - 1;

  begin_field();
  const uint32_t n_chains = r.get<uint32_t>();
  begin_field();
  st.update_index = static_cast<int64_t>(r.get<uint64_t>());
  cfg.seed = r.get<uint64_t>();
  begin_field();
  cfg.learning_rate = r.get<double>();
  cfg.gamma = r.get<double>();
  cfg.mu_damping = r.get<double>();
  cfg.mf_tol = r.get<double>();
  cfg.weight_init_std = r.get<double>();
  cfg.batch_size = static_cast<int>(r.get<uint32_t>());
  cfg.gibbs_k = static_cast<int>(r.get<uint32_t>());
  cfg.mf_max_sweeps = static_cast<int>(r.get<uint32_t>());
  cfg.regularizer_enabled = r.get<uint8_t>() != 0;
  cfg.n_updates = static_cast<int64_t>(r.get<uint64_t>());
  cfg.n_chains = static_cast<int>(n_chains);

  begin_field();
  st.reg.alpha.resize(L);
  st.reg.mu.resize(L);
  for (auto& a : st.reg.alpha) a = r.get<double>();
  for (auto& m : st.reg.mu) m = r.get<double>();
  st.reg.gamma = cfg.gamma;
  st.reg.mu_lr_damping = cfg.mu_damping;
  cfg.alpha = st.reg.alpha;

  begin_field();
  st.params = ModelParams::zeros(sizes);
  for (int l = 0; l < L; ++l) {
    Vector n(sizes[l + 1]);
    for (int i = 0; i < n.size(); ++i) n[i] = r.get<double>();
    st.init_norms.push_back(n);
  }

  begin_field();
  st.chains.master_seed = cfg.seed;
  st.chains.steps_taken = r.get<uint64_t>();
  std::vector<uint64_t> counters(n_chains);
  for (auto& c : counters) c = r.get<uint64_t>();

  for (int l = 0; l < L; ++l)
    for (int j = 0; j < sizes[l]; ++j)
      for (int i = 0; i < sizes[l + 1]; ++i)
        st.params.weights[l](j, i) = r.get<double>();
  for (int j = 0; j < sizes[0]; ++j) st.params.vis_bias[j] = r.get<double>();
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < sizes[l + 1]; ++i)
      st.params.hid_bias[l][i] = r.get<double>();

  for (uint32_t c = 0; c < n_chains; ++c) {
    BinaryState s = BinaryState::zeros(st.params);
    uint8_t byte = 0;
    int nbits = 8;
    for (auto& layer : s.layers) {
      for (size_t i = 0; i < layer.size(); ++i) {
        if (nbits == 8) {
          byte = r.get<uint8_t>();
          nbits = 0;
        }
        layer[i] = (byte >> nbits) & 1u;
        ++nbits;
      }
    }
    st.chains.states.push_back(std::move(s));
    CounterRng rng(cfg.seed, c);
    rng.set_counter(counters[c]);
    st.chains.rngs.push_back(rng);
  }
  if (r.pos() != body.size() - 8)
    throw FormatError("checkpoint has trailing bytes");
  return out;
}

void checkpoint_save(const TrainerState& state, const TrainingConfig& config,
                     const std::string& path) {
  write_file(path, checkpoint_serialize(state, config));
}

CheckpointData checkpoint_load(const std::string& path) {
  return checkpoint_parse(read_file(path));
}

}  // namespace dbm
