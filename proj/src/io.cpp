#include "mfpose/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr std::array<std::uint8_t, 4> kSpclMagic{'S', 'P', 'C', '1'};
constexpr std::array<std::uint8_t, 4> kSvolMagic{'S', 'V', 'L', '1'};
constexpr std::array<std::uint8_t, 4> kPclsMagic{'P', 'C', 'L', '1'};

class Writer {
 public:
  void magic(const std::array<std::uint8_t, 4>& m) { out_.insert(out_.end(), m.begin(), m.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void reserve(std::size_t n) { out_.reserve(n); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  void magic(const std::array<std::uint8_t, 4>& m, const char* what) {
    need(4);
    if (std::memcmp(b_.data() + pos_, m.data(), 4) != 0) {
      throw Error(ErrorCode::BadMagic, std::string("not a ") + what + " file");
    }
    pos_ += 4;
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 4; ++s) v |= static_cast<std::uint32_t>(b_[pos_ + s]) << (8 * s);
    pos_ += 4;
    return v;
  }
  double f32() {
    const float f = std::bit_cast<float>(u32());
    if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteValue, "non-finite value in payload");
    return f;
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  // Verifies the declared payload size exactly matches the bytes left.
  void expect_payload(unsigned __int128 bytes) const {
    if (bytes > remaining()) throw Error(ErrorCode::TruncatedPayload, "file shorter than its header declares");
    if (bytes < remaining()) throw Error(ErrorCode::TrailingData, "unexpected bytes after payload");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::TruncatedPayload, "file ends inside header or payload");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

void write_grid(Writer& w, const GridGeometry& g) {
  for (int a = 0; a < 3; ++a) w.u32(static_cast<std::uint32_t>(g.dims[a]));
  for (int a = 0; a < 3; ++a) w.f32(g.origin[a]);
  w.f32(g.voxel_size);
}

GridGeometry read_grid(Reader& r) {
  GridGeometry g;
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t n = r.u32();
    if (n == 0 || n > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw Error(ErrorCode::InvalidValue, "grid dimension out of range");
    }
    g.dims[a] = static_cast<int>(n);
  }
  for (int a = 0; a < 3; ++a) g.origin[a] = r.f32();
  g.voxel_size = r.f32();
  g.validate();
  return g;
}

using U128 = unsigned __int128;

U128 cells_of(const GridGeometry& g) { return U128(g.dims[0]) * U128(g.dims[1]) * U128(g.dims[2]); }

}  // namespace

Bytes encode_object(const StructuredPointCloud& obj, bool normalize_flag) {
  const auto n = static_cast<std::size_t>(obj.size());
  const auto d = static_cast<std::size_t>(obj.descriptor_dim());
  Writer w;
  w.reserve(13 + n * (3 + d) * 4);
  w.magic(kSpclMagic);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(d));
  w.u8(normalize_flag ? 1 : 0);
  for (Eigen::Index i = 0; i < obj.size(); ++i) {
    for (int a = 0; a < 3; ++a) w.f32(obj.points()(a, i));
    for (Eigen::Index k = 0; k < obj.descriptor_dim(); ++k) w.f32(obj.descriptors()(k, i));
  }
  return w.take();
}

StructuredPointCloud decode_object(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic(kSpclMagic, "SPCL");
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint8_t flag = r.u8();
  if (flag > 1) throw Error(ErrorCode::InvalidValue, "normalize flag must be 0 or 1");
  if (n == 0) throw Error(ErrorCode::EmptyInput, "point cloud has no points");
  if (d == 0) throw Error(ErrorCode::InvalidValue, "descriptor dimension must be positive");
  r.expect_payload(U128(n) * (U128(d) + 3) * 4);

  Eigen::Matrix3Xd points(3, n);
  Eigen::MatrixXd desc(d, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) points(a, i) = r.f32();
    for (std::uint32_t k = 0; k < d; ++k) desc(k, i) = r.f32();
  }
  if (flag == 1) return StructuredPointCloud::normalized(std::move(points), std::move(desc));
  return StructuredPointCloud(std::move(points), std::move(desc));
}

Bytes encode_scene(const SceneField& scene) {
  const auto d = static_cast<std::size_t>(scene.descriptor_dim());
  Writer w;
  w.reserve(36 + scene.cell_count() * (1 + 4 * d));
  w.magic(kSvolMagic);
  write_grid(w, scene.geometry());
  w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t c = 0; c < scene.cell_count(); ++c) {
    w.u8(static_cast<std::uint8_t>(scene.tag(c)));
    for (double v : scene.cell_values(c)) w.f32(v);
  }
  return w.take();
}

SceneField decode_scene(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic(kSvolMagic, "SVOL");
  const GridGeometry g = read_grid(r);
  const std::uint32_t d = r.u32();
  if (d == 0) throw Error(ErrorCode::InvalidValue, "descriptor dimension must be positive");
  r.expect_payload(cells_of(g) * (1 + U128(d) * 4));

  const std::size_t cells = g.cell_count();
  std::vector<CellTag> tags(cells);
  std::vector<double> values(cells * d);
  for (std::size_t c = 0; c < cells; ++c) {
    const std::uint8_t t = r.u8();
    if (t > 2) throw Error(ErrorCode::InvalidValue, "unknown cell tag " + std::to_string(t));
    tags[c] = static_cast<CellTag>(t);
    for (std::uint32_t k = 0; k < d; ++k) values[c * d + k] = r.f32();
  }
  return SceneField(g, static_cast<int>(d), std::move(tags), std::move(values));
}

Bytes encode_classifier(const ClassifierField& cls) {
  Writer w;
  w.reserve(36 + cls.values().size() * 4);
  w.magic(kPclsMagic);
  write_grid(w, cls.geometry());
  w.f32(cls.c_min());
  for (double v : cls.values()) w.f32(v);
  return w.take();
}

ClassifierField decode_classifier(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic(kPclsMagic, "PCLS");
  const GridGeometry g = read_grid(r);
  const double c_min = r.f32();
  r.expect_payload(cells_of(g) * 4);
  std::vector<double> values(g.cell_count());
  for (double& v : values) v = r.f32();
  return ClassifierField(g, c_min, std::move(values));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

StructuredPointCloud load_object(const std::filesystem::path& path) { return decode_object(read_file(path)); }
void save_object(const StructuredPointCloud& obj, const std::filesystem::path& path) { write_file(path, encode_object(obj)); }
SceneField load_scene(const std::filesystem::path& path) { return decode_scene(read_file(path)); }
void save_scene(const SceneField& scene, const std::filesystem::path& path) { write_file(path, encode_scene(scene)); }
ClassifierField load_classifier(const std::filesystem::path& path) { return decode_classifier(read_file(path)); }
void save_classifier(const ClassifierField& cls, const std::filesystem::path& path) {
  write_file(path, encode_classifier(cls));
}

}  // namespace mfpose
