#include "cgcn/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cgcn {
namespace {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'G', 'C', 'N', 'A', 'R', 'C', 'H'};
constexpr std::size_t kHeaderSize = sizeof(kMagic) + sizeof(std::uint32_t);

class Writer {
 public:
  template <typename T>
  void pod(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    out_.append(raw, sizeof(T));
  }

  void text(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_ += s;
  }

  void matrix(const Eigen::MatrixXd& m) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    pod<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) pod<double>(m(i, j));
    }
  }

  void vector(const Eigen::VectorXd& v) {
    pod<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) pod<double>(v(i));
  }

  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t begin, std::size_t end) : bytes_(bytes), pos_(begin), end_(end) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::uint64_t count(std::uint64_t element_size) {
    const auto n = pod<std::uint64_t>();
    if (element_size > 0 && n > (end_ - pos_) / element_size) throw ArchiveError("archive: length field out of range");
    return n;
  }

  std::string text() {
    const auto n = count(1);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  Eigen::MatrixXd matrix() {
    const auto rows = pod<std::uint64_t>();
    const auto cols = pod<std::uint64_t>();
    if (cols != 0 && rows > (end_ - pos_) / sizeof(double) / cols) throw ArchiveError("archive: matrix shape out of range");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = pod<double>();
    }
    return m;
  }

  Eigen::VectorXd vector() {
    const auto n = count(sizeof(double));
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = pod<double>();
    return v;
  }

  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw ArchiveError("archive: unexpected end of payload");
  }

  const std::string& bytes_;
  std::size_t pos_;
  std::size_t end_;
};

void write_readout(Writer& w, const Readout& r) {
  w.matrix(r.weights);
  w.vector(r.bias);
}

Readout read_readout(Reader& r) {
  Readout out;
  out.weights = r.matrix();
  out.bias = r.vector();
  return out;
}

}  // namespace

std::uint32_t archive_checksum(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* data = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string serialize_model(const CgcnModel& model, const std::string& config_echo) {
  Writer w;
  w.bytes().append(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kArchiveVersion);
  w.text(config_echo);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(model.shift_kind));
  w.pod<std::uint64_t>(model.layers.size());
  for (const CgcnLayer& layer : model.layers) {
    w.pod<double>(layer.budget);
    w.matrix(layer.filters);
    w.pod<std::uint64_t>(layer.kernels.size());
    for (const FactorizedKernel& fk : layer.kernels) {
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(fk.spec.kind));
      w.pod<double>(fk.spec.gamma);
      w.pod<std::int32_t>(fk.hop);
      w.matrix(fk.anchors);
      w.pod<std::uint64_t>(fk.landmark_indices.size());
      for (Eigen::Index idx : fk.landmark_indices) w.pod<std::int64_t>(idx);
      w.matrix(fk.pinv.u);
      w.vector(fk.pinv.sigma);
      w.matrix(fk.pinv.v);
      w.pod<double>(fk.pinv.cutoff);
    }
  }
  w.pod<std::uint64_t>(model.hidden_readouts.size());
  for (const Readout& r : model.hidden_readouts) write_readout(w, r);
  write_readout(w, model.readout);
  const std::uint32_t crc = archive_checksum(w.bytes());
  w.pod<std::uint32_t>(crc);
  return std::move(w.bytes());
}

ModelArchive deserialize_model(const std::string& bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ArchiveError("archive: not a model archive (bad magic)");
  }
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + sizeof(kMagic), sizeof(version));
  if (version != kArchiveVersion) {
    throw ArchiveError("archive: unsupported format version " + std::to_string(version) + " (expected " +
                       std::to_string(kArchiveVersion) + ")");
  }
  if (bytes.size() < kHeaderSize + sizeof(std::uint32_t)) throw ArchiveError("archive: checksum mismatch (truncated)");
  const std::size_t body_end = bytes.size() - sizeof(std::uint32_t);
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + body_end, sizeof(stored));
  if (archive_checksum(bytes.substr(0, body_end)) != stored) throw ArchiveError("archive: checksum mismatch");

  Reader r(bytes, kHeaderSize, body_end);
  ModelArchive out;
  out.version = version;
  out.config_echo = r.text();
  const auto shift = r.pod<std::uint32_t>();
  if (shift > static_cast<std::uint32_t>(ShiftKind::kNormLaplacian)) throw ArchiveError("archive: bad shift kind");
  out.model.shift_kind = static_cast<ShiftKind>(shift);
  const auto num_layers = r.count(1);
  for (std::uint64_t l = 0; l < num_layers; ++l) {
    CgcnLayer layer;
    layer.budget = r.pod<double>();
    layer.filters = r.matrix();
    const auto num_kernels = r.count(1);
    for (std::uint64_t k = 0; k < num_kernels; ++k) {
      FactorizedKernel fk;
      const auto kind = r.pod<std::uint32_t>();
      if (kind > static_cast<std::uint32_t>(KernelKind::kGaussianRbf)) throw ArchiveError("archive: bad kernel kind");
      fk.spec.kind = static_cast<KernelKind>(kind);
      fk.spec.gamma = r.pod<double>();
      fk.hop = r.pod<std::int32_t>();
      fk.anchors = r.matrix();
      const auto landmarks = r.count(sizeof(std::int64_t));
      for (std::uint64_t i = 0; i < landmarks; ++i) fk.landmark_indices.push_back(r.pod<std::int64_t>());
      fk.pinv.u = r.matrix();
      fk.pinv.sigma = r.vector();
      fk.pinv.v = r.matrix();
      fk.pinv.cutoff = r.pod<double>();
      layer.kernels.push_back(std::move(fk));
    }
    out.model.layers.push_back(std::move(layer));
  }
  const auto num_hidden = r.count(1);
  for (std::uint64_t i = 0; i < num_hidden; ++i) out.model.hidden_readouts.push_back(read_readout(r));
  out.model.readout = read_readout(r);
  if (!r.done()) throw ArchiveError("archive: trailing bytes after payload");
  return out;
}

void save_model(const CgcnModel& model, const std::filesystem::path& path, const std::string& config_echo) {
  const std::string bytes = serialize_model(model, config_echo);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model archive '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing model archive '" + path.string() + "'");
}

ModelArchive load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model archive '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace cgcn
