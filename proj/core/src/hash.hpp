#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace kerrkit::detail {

std::array<std::uint8_t, 32> sha256(const void* data, std::size_t size);
std::string hex(const std::uint8_t* data, std::size_t size);

}  // namespace kerrkit::detail
