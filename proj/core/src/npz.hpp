#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kerrkit::detail {

struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;  // C order
};

// Parses a .npy payload (format versions 1-3; little-endian or byte-sized
// integer and float dtypes, C order). base_offset shifts reported offsets.
NpyArray parse_npy(const std::vector<unsigned char>& bytes, std::size_t base_offset = 0);

// Reads every "<name>.npy" member of a zip archive (stored or deflated,
// zip64 extra fields supported) keyed by name without extension.
std::map<std::string, NpyArray> read_npz(const std::string& path);

std::vector<unsigned char> read_file_bytes(const std::string& path);

}  // namespace kerrkit::detail
