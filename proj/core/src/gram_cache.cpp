#include "kerrkit/gram_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "hash.hpp"
#include "kerrkit/error.hpp"
#include "npz.hpp"

namespace kerrkit {

static_assert(std::endian::native == std::endian::little, "gram cache I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::vector<unsigned char>& buf, T v) {
  const auto* p = reinterpret_cast<const unsigned char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<unsigned char>& buf, std::size_t at) {
  if (at + sizeof(T) > buf.size()) throw ParseError("truncated gram cache", at);
  T v;
  std::memcpy(&v, buf.data() + at, sizeof(T));
  return v;
}

}  // namespace

void write_gram_cache(const std::string& path, const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) throw DomainError("gram cache needs a square matrix");
  std::vector<unsigned char> buf = {'K', 'G', 'R', 'M'};
  put<std::uint32_t>(buf, kGramCacheVersion);
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(gram.rows()));
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) put<double>(buf, gram(i, j));
  }
  const auto digest = detail::sha256(buf.data(), buf.size());
  buf.insert(buf.end(), digest.begin(), digest.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed for " + path);
}

Eigen::MatrixXd read_gram_cache(const std::string& path) {
  const auto buf = detail::read_file_bytes(path);
  if (buf.size() < 16 + 32 || std::memcmp(buf.data(), "KGRM", 4) != 0) {
    throw ParseError("not a gram cache (bad magic)", 0);
  }
  const auto version = get<std::uint32_t>(buf, 4);
  if (version != kGramCacheVersion) throw ParseError("unsupported gram cache version " + std::to_string(version), 4);
  const auto n = get<std::uint64_t>(buf, 8);
  const std::uint64_t expected = 16 + n * n * 8 + 32;
  if (n > (1u << 20) || buf.size() != expected) {
    throw ParseError("gram cache size does not match n = " + std::to_string(n), 8);
  }
  const std::size_t body = buf.size() - 32;
  const auto digest = detail::sha256(buf.data(), body);
  if (std::memcmp(digest.data(), buf.data() + body, 32) != 0) throw ParseError("gram cache hash mismatch", body);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t at = 16;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j, at += 8) g(i, j) = get<double>(buf, at);
  }
  return g;
}

std::string file_sha256(const std::string& path) {
  const auto buf = detail::read_file_bytes(path);
  const auto digest = detail::sha256(buf.data(), buf.size());
  return detail::hex(digest.data(), digest.size());
}

}  // namespace kerrkit
