#include "npz.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <zlib.h>

#include "kerrkit/datasets.hpp"
#include "kerrkit/error.hpp"

namespace kerrkit::detail {

namespace {

std::uint64_t read_le(const std::vector<unsigned char>& b, std::size_t at, int width) {
  if (at + static_cast<std::size_t>(width) > b.size()) throw ParseError("truncated archive", at);
  std::uint64_t v = 0;
  for (int k = width - 1; k >= 0; --k) v = (v << 8) | b[at + static_cast<std::size_t>(k)];
  return v;
}

std::vector<unsigned char> inflate_raw(const unsigned char* src, std::size_t n_in, std::size_t n_out,
                                       std::size_t offset) {
  std::vector<unsigned char> out(n_out);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ParseError("zlib init failed", offset);
  zs.next_in = const_cast<unsigned char*>(src);
  zs.avail_in = static_cast<uInt>(n_in);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(n_out);
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != n_out) throw ParseError("corrupt deflate stream", offset);
  return out;
}

// Text between the quotes following key, or the parenthesised tuple.
std::string dict_value(const std::string& header, const std::string& key, std::size_t base) {
  const auto k = header.find("'" + key + "'");
  if (k == std::string::npos) throw ParseError("npy header lacks '" + key + "'", base);
  auto p = header.find(':', k);
  if (p == std::string::npos) throw ParseError("malformed npy header", base + k);
  ++p;
  while (p < header.size() && header[p] == ' ') ++p;
  if (p >= header.size()) throw ParseError("malformed npy header", base + p);
  if (header[p] == '\'') {
    const auto e = header.find('\'', p + 1);
    if (e == std::string::npos) throw ParseError("malformed npy header", base + p);
    return header.substr(p + 1, e - p - 1);
  }
  if (header[p] == '(') {
    const auto e = header.find(')', p);
    if (e == std::string::npos) throw ParseError("malformed npy header", base + p);
    return header.substr(p + 1, e - p - 1);
  }
  auto e = header.find_first_of(",}", p);
  return header.substr(p, e - p);
}

}  // namespace

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataUnavailable("file not found: " + path);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

NpyArray parse_npy(const std::vector<unsigned char>& b, std::size_t base) {
  static const unsigned char magic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
  if (b.size() < 10 || std::memcmp(b.data(), magic, 6) != 0) throw ParseError("bad npy magic", base);
  const int major = b[6];
  std::size_t header_len = 0;
  std::size_t start = 0;
  if (major == 1) {
    header_len = read_le(b, 8, 2);
    start = 10;
  } else if (major == 2 || major == 3) {
    header_len = read_le(b, 8, 4);
    start = 12;
  } else {
    throw ParseError("unsupported npy version " + std::to_string(major), base + 6);
  }
  if (start + header_len > b.size()) throw ParseError("truncated npy header", base + start);
  const std::string header(b.begin() + static_cast<long>(start),
                           b.begin() + static_cast<long>(start + header_len));
  const std::string descr = dict_value(header, "descr", base + start);
  const std::string fortran = dict_value(header, "fortran_order", base + start);
  if (fortran.find("True") != std::string::npos) {
    throw ParseError("Fortran-ordered arrays are not supported", base + start);
  }
  NpyArray arr;
  std::size_t count = 1;
  const std::string shape = dict_value(header, "shape", base + start);
  std::size_t p = 0;
  while (p < shape.size()) {
    while (p < shape.size() && (shape[p] == ' ' || shape[p] == ',')) ++p;
    if (p >= shape.size()) break;
    std::size_t q = p;
    while (q < shape.size() && std::isdigit(static_cast<unsigned char>(shape[q]))) ++q;
    if (q == p) throw ParseError("malformed npy shape", base + start);
    arr.shape.push_back(std::stoull(shape.substr(p, q - p)));
    count *= arr.shape.back();
    p = q;
  }

  if (descr.size() < 3) throw ParseError("unsupported dtype '" + descr + "'", base + start);
  const char order = descr[0];
  const char kind = descr[1];
  const int width = std::stoi(descr.substr(2));
  if (order == '>' && width > 1) throw ParseError("big-endian arrays are not supported", base + start);
  const std::size_t data = start + header_len;
  if (data + count * static_cast<std::size_t>(width) > b.size()) {
    throw ParseError("npy payload shorter than its shape", base + data);
  }
  arr.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = data + i * static_cast<std::size_t>(width);
    const std::uint64_t raw = read_le(b, at, width);
    double v = 0.0;
    if (kind == 'u') {
      v = static_cast<double>(raw);
    } else if (kind == 'i') {
      const int shift = 64 - 8 * width;
      v = static_cast<double>(static_cast<std::int64_t>(raw << shift) >> shift);
    } else if (kind == 'b') {
      v = raw ? 1.0 : 0.0;
    } else if (kind == 'f' && width == 8) {
      std::memcpy(&v, &raw, 8);
    } else if (kind == 'f' && width == 4) {
      float f;
      const auto r32 = static_cast<std::uint32_t>(raw);
      std::memcpy(&f, &r32, 4);
      v = f;
    } else {
      throw ParseError("unsupported dtype '" + descr + "'", base + start);
    }
    arr.values[i] = v;
  }
  return arr;
}

std::map<std::string, NpyArray> read_npz(const std::string& path) {
  const auto b = read_file_bytes(path);
  // End of central directory: scan backwards (comment up to 64 KiB).
  if (b.size() < 22) throw ParseError("file too small for a zip archive", 0);
  std::size_t eocd = std::string::npos;
  const std::size_t lo = b.size() > 22 + 65535 ? b.size() - 22 - 65535 : 0;
  for (std::size_t p = b.size() - 22 + 1; p-- > lo;) {
    if (read_le(b, p, 4) == 0x06054b50) {
      eocd = p;
      break;
    }
  }
  if (eocd == std::string::npos) throw ParseError("zip end-of-central-directory not found", b.size());
  std::uint64_t entries = read_le(b, eocd + 10, 2);
  std::uint64_t cd_offset = read_le(b, eocd + 16, 4);
  if (cd_offset == 0xFFFFFFFFu || entries == 0xFFFF) {
    // Zip64 locator sits immediately before the classic record.
    if (eocd < 20 || read_le(b, eocd - 20, 4) != 0x07064b50) {
      throw ParseError("zip64 locator missing", eocd);
    }
    const std::uint64_t z64 = read_le(b, eocd - 20 + 8, 8);
    if (read_le(b, z64, 4) != 0x06064b50) throw ParseError("zip64 end record missing", z64);
    entries = read_le(b, z64 + 32, 8);
    cd_offset = read_le(b, z64 + 48, 8);
  }

  std::map<std::string, NpyArray> out;
  std::size_t p = cd_offset;
  for (std::uint64_t e = 0; e < entries; ++e) {
    if (read_le(b, p, 4) != 0x02014b50) throw ParseError("bad central directory entry", p);
    const auto method = read_le(b, p + 10, 2);
    std::uint64_t comp_size = read_le(b, p + 20, 4);
    std::uint64_t size = read_le(b, p + 24, 4);
    const auto name_len = read_le(b, p + 28, 2);
    const auto extra_len = read_le(b, p + 30, 2);
    const auto comment_len = read_le(b, p + 32, 2);
    std::uint64_t local = read_le(b, p + 42, 4);
    if (p + 46 + name_len > b.size()) throw ParseError("truncated central directory", p);
    const std::string name(b.begin() + static_cast<long>(p + 46),
                           b.begin() + static_cast<long>(p + 46 + name_len));
    // Zip64 extended information replaces saturated fields in order.
    std::size_t x = p + 46 + name_len;
    const std::size_t x_end = x + extra_len;
    while (x + 4 <= x_end) {
      const auto id = read_le(b, x, 2);
      const auto len = read_le(b, x + 2, 2);
      if (id == 0x0001) {
        std::size_t q = x + 4;
        if (size == 0xFFFFFFFFu) size = read_le(b, q, 8), q += 8;
        if (comp_size == 0xFFFFFFFFu) comp_size = read_le(b, q, 8), q += 8;
        if (local == 0xFFFFFFFFu) local = read_le(b, q, 8);
      }
      x += 4 + len;
    }
    p = x_end + comment_len;

    if (read_le(b, local, 4) != 0x04034b50) throw ParseError("bad local file header", local);
    const auto l_name = read_le(b, local + 26, 2);
    const auto l_extra = read_le(b, local + 28, 2);
    const std::size_t data = local + 30 + l_name + l_extra;
    if (data + comp_size > b.size()) throw ParseError("zip member extends past end of file", data);
    std::vector<unsigned char> payload;
    if (method == 0) {
      payload.assign(b.begin() + static_cast<long>(data), b.begin() + static_cast<long>(data + comp_size));
    } else if (method == 8) {
      payload = inflate_raw(b.data() + data, comp_size, size, data);
    } else {
      throw ParseError("unsupported zip compression method " + std::to_string(method), local + 8);
    }
    std::string key = name;
    if (key.size() > 4 && key.ends_with(".npy")) key.resize(key.size() - 4);
    out.emplace(key, parse_npy(payload, data));
  }
  return out;
}

}  // namespace kerrkit::detail

namespace kerrkit {

Dataset load_breastmnist(const std::string& path, BreastPartition partition) {
  if (!std::filesystem::exists(path)) {
    throw DataUnavailable("dataset unavailable, criterion skipped: " + path + " not found");
  }
  const auto arrays = detail::read_npz(path);
  auto get = [&](const std::string& key) -> const detail::NpyArray& {
    const auto it = arrays.find(key);
    if (it == arrays.end()) throw ParseError("archive lacks array '" + key + "'");
    return it->second;
  };
  std::string second = partition == BreastPartition::TrainVal ? "val" : "test";
  // Archives holding only train/test arrays use test as the held-out part.
  if (partition == BreastPartition::TrainVal && !arrays.count("val_images")) second = "test";

  const auto& xi = get("train_images");
  const auto& yi = get("train_labels");
  const auto& xo = get(second + "_images");
  const auto& yo = get(second + "_labels");
  auto pixels = [](const detail::NpyArray& a) {
    if (a.shape.empty()) throw ParseError("image array has no shape");
    std::size_t d = 1;
    for (std::size_t k = 1; k < a.shape.size(); ++k) d *= a.shape[k];
    return d;
  };
  const std::size_t d = pixels(xi);
  if (pixels(xo) != d) throw ParseError("train and held-out images differ in size");
  const std::size_t n1 = xi.shape[0];
  const std::size_t n2 = xo.shape[0];
  if (yi.values.size() != n1 || yo.values.size() != n2) throw ParseError("label count mismatch");

  Dataset ds;
  ds.name = "breastmnist";
  ds.n_train = n1;
  ds.features.resize(static_cast<Eigen::Index>(n1 + n2), static_cast<Eigen::Index>(d));
  ds.labels.resize(n1 + n2);
  auto fill = [&](const detail::NpyArray& x, const detail::NpyArray& y, std::size_t row0, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < d; ++f) {
        ds.features(static_cast<Eigen::Index>(row0 + i), static_cast<Eigen::Index>(f)) =
            x.values[i * d + f] / 255.0;
      }
      ds.labels[row0 + i] = y.values[i] != 0.0 ? 1 : 0;
    }
  };
  fill(xi, yi, 0, n1);
  fill(xo, yo, n1, n2);
  validate(ds);
  return ds;
}

}  // namespace kerrkit
