#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace siglab {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 over the concatenation of `parts`.
Digest sha256(std::initializer_list<std::span<const std::uint8_t>> parts);
Digest sha256(std::span<const std::uint8_t> data);

/// Deterministic byte stream: SHA-256 in counter mode over `label`.
std::vector<std::uint8_t> expand_bytes(std::string_view label, std::size_t count);

}  // namespace siglab
