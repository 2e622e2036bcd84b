#include "coexsim/agent/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coexsim::agent {
namespace {

constexpr char kMagic[4] = {'C', 'X', 'Q', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64(const char* field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

  void raw(char* dst, std::size_t n, const char* field) {
    need(n, field);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n), dst);
    pos_ += n;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) {
    if (data_.size() - pos_ < n) {
      throw std::runtime_error("checkpoint " + path_ + " truncated while reading " + field);
    }
  }

  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const QNetwork& net, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  const auto& dims = net.layer_dims();
  put_u32(out, static_cast<std::uint32_t>(dims.front()));
  put_u32(out, static_cast<std::uint32_t>(dims.back()));
  put_u32(out, static_cast<std::uint32_t>(dims.size() - 2));
  for (std::size_t i = 1; i + 1 < dims.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(dims[i]));
  }
  const auto params = net.parameters();
  put_u64(out, params.size());
  for (double p : params) put_f64(out, p);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed for checkpoint: " + path);
}

QNetwork load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  Reader r(data, path);
  char magic[4];
  r.raw(magic, 4, "magic");
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw std::runtime_error("checkpoint " + path + " has wrong magic");
  }
  const auto version = r.u32("version");
  if (version != kVersion) {
    throw std::runtime_error("checkpoint " + path + " has unsupported version " +
                             std::to_string(version));
  }
  const auto input = r.u32("input width");
  const auto output = r.u32("output width");
  const auto hidden_count = r.u32("hidden layer count");
  if (input == 0 || output == 0 || hidden_count > 64) {
    throw std::runtime_error("checkpoint " + path + " has implausible dimensions");
  }
  std::vector<int> hidden(hidden_count);
  for (auto& h : hidden) {
    const auto v = r.u32("hidden width");
    if (v == 0) throw std::runtime_error("checkpoint " + path + " has zero hidden width");
    h = static_cast<int>(v);
  }

  QNetwork net(static_cast<int>(input), hidden, static_cast<int>(output));
  const auto count = r.u64("parameter count");
  auto params = net.parameters();
  if (count != params.size()) {
    throw std::runtime_error("checkpoint " + path + " parameter count mismatch: file has " +
                             std::to_string(count) + ", architecture needs " +
                             std::to_string(params.size()));
  }
  for (auto& p : params) p = r.f64("parameter");
  if (r.remaining() != 0) {
    throw std::runtime_error("checkpoint " + path + " has trailing bytes");
  }
  return net;
}

}  // namespace coexsim::agent
