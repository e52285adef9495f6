#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

namespace dpcp {

// Builds fixed-width big-endian byte strings used as canonical state keys.
// Equal states always produce identical bytes; distinct scalars produce
// distinct bytes (doubles are serialized as their IEEE-754 bit pattern).
class KeyBuilder {
 public:
  void u8(std::uint8_t x) { buf_.push_back(static_cast<char>(x)); }

  void u16(std::uint16_t x) {
    u8(static_cast<std::uint8_t>(x >> 8));
    u8(static_cast<std::uint8_t>(x));
  }

  void u32(std::uint32_t x) {
    u16(static_cast<std::uint16_t>(x >> 16));
    u16(static_cast<std::uint16_t>(x));
  }

  void u64(std::uint64_t x) {
    u32(static_cast<std::uint32_t>(x >> 32));
    u32(static_cast<std::uint32_t>(x));
  }

  void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }

  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

}  // namespace dpcp
