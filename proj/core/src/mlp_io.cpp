#include "orl/funcapprox/mlp_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "orl/error.hpp"

namespace orl {

namespace {

constexpr char kMagic[8] = {'O', 'R', 'L', 'M', 'L', 'P', '\0', '\0'};

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.append(reinterpret_cast<const char*>(bits.data()), bits.size());
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ValidationError("model file is truncated");
    std::array<unsigned char, sizeof(T)> bits;
    std::memcpy(bits.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }
  void expect_magic() {
    if (bytes_.size() < sizeof kMagic || std::memcmp(bytes_.data(), kMagic, sizeof kMagic) != 0) {
      throw ValidationError("not a model file (bad magic)");
    }
    pos_ = sizeof kMagic;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_mlp(const Mlp& model) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kMlpFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.layer_sizes().size()));
  for (int s : model.layer_sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto& w = model.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put<double>(out, w(r, c));
    }
    const auto& b = model.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) put<double>(out, b(i));
  }
  return out;
}

Mlp deserialize_mlp(const std::string& bytes) {
  Reader in(bytes);
  in.expect_magic();
  const auto version = in.get<std::uint32_t>();
  if (version != kMlpFormatVersion) {
    throw ValidationError("unsupported model format version " + std::to_string(version));
  }
  const auto count = in.get<std::uint32_t>();
  if (count < 2 || count > 64) throw ValidationError("implausible layer count in model file");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = in.get<std::uint32_t>();
    if (s == 0 || s > (1u << 20)) throw ValidationError("implausible layer size in model file");
    sizes.push_back(static_cast<int>(s));
  }
  Mlp m = Mlp::zeros(sizes);
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    auto& w = m.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in.get<double>();
    }
    auto& b = m.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = in.get<double>();
  }
  if (!in.at_end()) throw ValidationError("trailing bytes after model parameters");
  return m;
}

void save_mlp(const std::filesystem::path& path, const Mlp& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto bytes = serialize_mlp(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_mlp(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace orl
