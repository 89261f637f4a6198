#pragma once

#include <string>

#include <Eigen/Dense>

namespace kerrkit {

// Little-endian layout: "KGRM", u32 version (1), u64 n, n*n row-major f64,
// then the SHA-256 of everything before it.
inline constexpr unsigned kGramCacheVersion = 1;

void write_gram_cache(const std::string& path, const Eigen::MatrixXd& gram);
// Throws ParseError (with byte offset) on a bad header, size or hash.
Eigen::MatrixXd read_gram_cache(const std::string& path);

// Hex SHA-256 of a file's contents.
std::string file_sha256(const std::string& path);

}  // namespace kerrkit
