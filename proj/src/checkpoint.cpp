#include "wvdnet/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"

namespace wvdnet {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename V>
  void put(V v) {
    char buf[sizeof(V)];
    std::memcpy(buf, &v, sizeof(V));
    out_.append(buf, sizeof(V));
  }
  void u32(std::size_t v) {
    if (v > 0xffffffffULL) throw InvalidArgument("checkpoint: value does not fit in u32");
    put(static_cast<std::uint32_t>(v));
  }
  void bytes(const std::string& s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename V>
  V get(const char* what) {
    if (pos_ + sizeof(V) > in_.size()) throw DataError(std::string("checkpoint truncated while reading ") + what);
    V v;
    std::memcpy(&v, in_.data() + pos_, sizeof(V));
    pos_ += sizeof(V);
    return v;
  }
  std::size_t u32(const char* what) { return get<std::uint32_t>(what); }
  std::string bytes(std::size_t n, const char* what) {
    if (pos_ + n > in_.size()) throw DataError(std::string("checkpoint truncated while reading ") + what);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(Network<float>& net) {
  const NetworkConfig& cfg = net.config();
  Writer w;
  w.bytes(std::string(kCheckpointMagic, 4));
  w.put(kCheckpointVersion);
  w.u32(cfg.input_shape[0]);
  w.u32(cfg.input_shape[1]);
  w.u32(cfg.input_shape[2]);
  w.u32(cfg.num_classes);
  w.put<std::uint64_t>(cfg.seed);
  w.u32(cfg.class_names.size());
  for (const auto& name : cfg.class_names) {
    w.u32(name.size());
    w.bytes(name);
  }
  w.u32(cfg.layers.size());
  for (const auto& l : cfg.layers) {
    w.put(static_cast<std::uint8_t>(l.kind));
    w.u32(l.in_channels);
    w.u32(l.out_channels);
    w.u32(l.kernel);
    w.u32(l.stride);
    w.u32(l.padding);
    w.u32(l.in_features);
    w.u32(l.out_features);
    w.put<double>(l.p);
  }
  const auto params = net.params();
  w.u32(params.size());
  for (const auto& p : params) {
    w.u32(p.value->rank());
    for (std::size_t d : p.value->shape()) w.u32(d);
    for (float v : p.value->values()) w.put(v);
  }
  return w.take();
}

Network<float> deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(4, "magic") != std::string(kCheckpointMagic, 4)) throw DataError("checkpoint: bad magic (expected WVDN)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported format version " + std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  NetworkConfig cfg;
  cfg.input_shape[0] = r.u32("input channels");
  cfg.input_shape[1] = r.u32("input rows");
  cfg.input_shape[2] = r.u32("input cols");
  cfg.num_classes = r.u32("num_classes");
  cfg.seed = r.get<std::uint64_t>("seed");
  const std::size_t n_names = r.u32("class name count");
  for (std::size_t i = 0; i < n_names; ++i) cfg.class_names.push_back(r.bytes(r.u32("name length"), "class name"));
  const std::size_t n_layers = r.u32("layer count");
  for (std::size_t i = 0; i < n_layers; ++i) {
    LayerSpec s;
    const auto kind = r.get<std::uint8_t>("layer kind");
    if (kind < 1 || kind > 6) throw DataError("checkpoint: unknown layer kind " + std::to_string(kind));
    s.kind = static_cast<LayerKind>(kind);
    s.in_channels = r.u32("layer");
    s.out_channels = r.u32("layer");
    s.kernel = r.u32("layer");
    s.stride = r.u32("layer");
    s.padding = r.u32("layer");
    s.in_features = r.u32("layer");
    s.out_features = r.u32("layer");
    s.p = r.get<double>("layer");
    cfg.layers.push_back(s);
  }

  Network<float> net = [&] {
    try {
      return Network<float>(cfg);
    } catch (const InvalidArgument& e) {
      throw DataError(std::string("checkpoint: invalid network config: ") + e.what());
    }
  }();
  auto params = net.params();
  const std::size_t n_tensors = r.u32("tensor count");
  if (n_tensors != params.size()) {
    throw DataError("checkpoint: " + std::to_string(n_tensors) + " tensors stored, config needs " +
                    std::to_string(params.size()));
  }
  for (auto& p : params) {
    const std::size_t rank = r.u32("tensor rank");
    Shape shape;
    for (std::size_t d = 0; d < rank; ++d) shape.push_back(r.u32("tensor dim"));
    if (shape != p.value->shape()) {
      throw DataError("checkpoint: tensor " + p.name + " has shape " + shape_string(shape) + ", config expects " +
                      shape_string(p.value->shape()));
    }
    for (auto& v : p.value->values()) v = r.get<float>("tensor data");
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes after last tensor");
  return net;
}

void save_checkpoint(Network<float>& net, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(net));
}

Network<float> load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace wvdnet
