#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sptb {

// Index widths follow the declared storage model: 32-bit coordinates,
// 8-bit within-block offsets, 64-bit block pointers.
using Index = std::uint32_t;
using BlockIndex = std::uint32_t;
using ElementIndex = std::uint8_t;
using Offset = std::uint64_t;

// Modes are 0-based everywhere inside the library.
using Mode = std::size_t;
using ModeOrder = std::vector<Mode>;

enum class Precision { f32, f64 };

}  // namespace sptb
