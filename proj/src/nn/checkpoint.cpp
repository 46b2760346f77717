#include "terra/nn/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace terra::nn {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'E', 'R', 'R', 'A', 'N', 'N', '1'};

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <class T>
  void put(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class Scalar>
  void put_matrix(const Eigen::DenseBase<Scalar>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) put(m(r, c));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  explicit Reader(std::ifstream& in) : in_(in) {}
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw CheckpointError("checkpoint truncated");
    return v;
  }
  template <class Derived>
  void get_matrix(Eigen::DenseBase<Derived>& m) {
    using S = typename Derived::Scalar;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<S>();
  }

 private:
  std::ifstream& in_;
};

void put_config(Writer& w, const NetworkConfig& c) {
  for (int v : {c.blocks, c.filters, c.policy_filters, c.value_filters, c.value_fc, c.batch_size, c.input_rows,
                c.input_cols, c.input_layers})
    w.put<std::int32_t>(v);
  for (double v : {c.l2, c.learning_rate, c.momentum}) w.put(v);
}

NetworkConfig get_config(Reader& r) {
  NetworkConfig c;
  for (int* v : {&c.blocks, &c.filters, &c.policy_filters, &c.value_filters, &c.value_fc, &c.batch_size, &c.input_rows,
                 &c.input_cols, &c.input_layers})
    *v = r.get<std::int32_t>();
  for (double* v : {&c.l2, &c.learning_rate, &c.momentum}) *v = r.get<double>();
  return c;
}

struct Header {
  std::uint64_t hash = 0;
  std::uint32_t scalar_bytes = 0;
  NetworkConfig config;
  std::uint64_t step = 0;
};

Header read_header(Reader& r) {
  std::array<char, 8> magic{};
  for (char& c : magic) c = r.get<char>();
  if (magic != kMagic) throw CheckpointError("not a checkpoint file");
  Header h;
  h.hash = r.get<std::uint64_t>();
  h.scalar_bytes = r.get<std::uint32_t>();
  h.config = get_config(r);
  h.step = r.get<std::uint64_t>();
  return h;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return in;
}

}  // namespace

std::uint64_t checkpoint_layout_hash(const NetworkConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t layout = encoding::layout_hash();
  h = fnv1a(h, &layout, sizeof layout);
  for (const ParamShape& p : parameter_shapes(cfg)) {
    h = fnv1a(h, p.name.data(), p.name.size());
    const std::int32_t dims[2] = {p.rows, p.cols};
    h = fnv1a(h, dims, sizeof dims);
  }
  return h;
}

template <class Scalar>
void save_checkpoint(Network<Scalar>& net, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    Writer w(out);
    out.write(kMagic.data(), kMagic.size());
    w.put<std::uint64_t>(checkpoint_layout_hash(net.config()));
    w.put<std::uint32_t>(sizeof(Scalar));
    put_config(w, net.config());
    w.put<std::uint64_t>(net.step());
    for (const Param<Scalar>* p : net.parameters()) {
      w.put_matrix(p->value);
      w.put_matrix(p->velocity);
    }
    for (const BatchNorm<Scalar>* n : net.norms()) {
      w.put_matrix(n->running_mean);
      w.put_matrix(n->running_var);
    }
    if (!out) throw CheckpointError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

template <class Scalar>
Network<Scalar> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  Reader r(in);
  const Header h = read_header(r);
  if (h.scalar_bytes != sizeof(Scalar)) throw CheckpointError("checkpoint scalar width mismatch");
  try {
    h.config.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
  }
  if (h.hash != checkpoint_layout_hash(h.config)) throw CheckpointError("checkpoint layout hash mismatch");
  Network<Scalar> net(h.config);
  net.set_step(h.step);
  for (Param<Scalar>* p : net.parameters()) {
    r.get_matrix(p->value);
    r.get_matrix(p->velocity);
  }
  for (BatchNorm<Scalar>* n : net.norms()) {
    r.get_matrix(n->running_mean);
    r.get_matrix(n->running_var);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes in checkpoint");
  return net;
}

NetworkConfig checkpoint_config(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  Reader r(in);
  return read_header(r).config;
}

template void save_checkpoint<float>(Network<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(Network<double>&, const std::filesystem::path&);
template Network<float> load_checkpoint<float>(const std::filesystem::path&);
template Network<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace terra::nn
