#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ee {

// Little-endian primitive readers/writers for the binary file formats.
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
void write_f64_array(std::ostream& os, const double* p, std::size_t n);

std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
void read_f64_array(std::istream& is, double* p, std::size_t n);

// CRC-32 (IEEE 802.3 polynomial, reflected).
class Crc32 {
public:
  Crc32();
  void update(const void* data, std::size_t n);
  std::uint32_t value() const { return state_ ^ 0xffffffffu; }

  static std::uint32_t of(const void* data, std::size_t n);

private:
  std::uint32_t state_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ee
