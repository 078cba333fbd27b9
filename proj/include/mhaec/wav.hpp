#pragma once

// Minimal RIFF/WAVE I/O, 32-bit float mono only.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhaec {

class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct WavData {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;
};

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

inline void write_wav(const std::string& path, std::span<const double> samples,
                      std::uint32_t sample_rate) {
  std::string bytes;
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 4);
  bytes.reserve(44 + data_size);
  bytes += "RIFF";
  detail::put_u32(bytes, 36 + data_size);
  bytes += "WAVEfmt ";
  detail::put_u32(bytes, 16);
  detail::put_u16(bytes, 3);  // IEEE float
  detail::put_u16(bytes, 1);  // mono
  detail::put_u32(bytes, sample_rate);
  detail::put_u32(bytes, sample_rate * 4);
  detail::put_u16(bytes, 4);
  detail::put_u16(bytes, 32);
  bytes += "data";
  detail::put_u32(bytes, data_size);
  for (double v : samples) {
    const float f = static_cast<float>(v);
    char buf[4];
    std::memcpy(buf, &f, 4);
    bytes.append(buf, 4);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::invalid_argument("'" + path + "' is not a RIFF/WAVE file");

  WavData wav;
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t size = detail::get_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size())
      throw std::invalid_argument("'" + path + "': truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw std::invalid_argument("'" + path + "': short fmt chunk");
      format = detail::get_u16(bytes.data() + pos);
      channels = detail::get_u16(bytes.data() + pos + 2);
      wav.sample_rate = detail::get_u32(bytes.data() + pos + 4);
      bits = detail::get_u16(bytes.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw std::invalid_argument("'" + path + "': data before fmt");
      if (format != 3 || bits != 32)
        throw std::invalid_argument("'" + path + "': only 32-bit float WAV is supported");
      if (channels != 1)
        throw std::invalid_argument("'" + path + "': only mono WAV is supported");
      wav.samples.resize(size / 4);
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        float f;
        std::memcpy(&f, bytes.data() + pos + 4 * i, 4);
        wav.samples[i] = static_cast<double>(f);
      }
      return wav;
    }
    pos += size + (size & 1);  // chunks are word aligned
  }
  throw std::invalid_argument("'" + path + "': no data chunk");
}

}  // namespace mhaec
