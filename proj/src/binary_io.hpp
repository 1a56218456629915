#pragma once

// Little-endian helpers shared by the graph and embedding file formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>

#include "lmk/error.hpp"

namespace lmk::detail {

template <typename T>
void put_le(std::string& buf, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& buf, double value) { put_le(buf, std::bit_cast<std::uint64_t>(value)); }

// Cursor over an in-memory byte buffer; every read is bounds-checked and a
// short read raises FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  template <typename T>
  T get_le() {
    require(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return value;
  }

  double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

  void expect_magic(std::string_view magic) {
    require(magic.size());
    if (bytes_.substr(pos_, magic.size()) != magic) throw FormatError(std::string(what_) + ": bad magic");
    pos_ += magic.size();
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void require(std::size_t count) const {
    if (remaining() < count) throw FormatError(std::string(what_) + ": truncated");
  }

 private:
  std::string_view bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

inline std::string slurp(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed");
  return data;
}

inline void write_all(std::ostream& out, const std::string& buf) {
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed");
}

}  // namespace lmk::detail
