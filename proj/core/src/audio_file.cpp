// SPDX-License-Identifier: Apache-2.0
#include "roomcomp/audio_file.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace roomcomp::io {

namespace {

void push_u16(std::vector<std::uint8_t>& buf, std::uint16_t v) {
  buf.push_back(static_cast<std::uint8_t>(v & 0xff));
  buf.push_back(static_cast<std::uint8_t>(v >> 8));
}

void push_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xff));
    v >>= 8;
  }
}

void push_tag(std::vector<std::uint8_t>& buf, const char* tag) {
  buf.insert(buf.end(), tag, tag + 4);
}

std::uint16_t read_u16(const std::vector<std::uint8_t>& buf, std::size_t pos) {
  return static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8));
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& buf, std::size_t pos) {
  return static_cast<std::uint32_t>(buf[pos]) |
         (static_cast<std::uint32_t>(buf[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(buf[pos + 2]) << 16) |
         (static_cast<std::uint32_t>(buf[pos + 3]) << 24);
}

bool tag_is(const std::vector<std::uint8_t>& buf, std::size_t pos,
            const char* tag) {
  return std::memcmp(buf.data() + pos, tag, 4) == 0;
}

[[noreturn]] void corrupt(const std::filesystem::path& path,
                          const std::string& what) {
  throw std::runtime_error("corrupt audio file " + path.string() + ": " + what);
}

constexpr std::uint16_t kFormatIeeeFloat = 3;

}  // namespace

void write_wav(const std::filesystem::path& path, const ImpulseResponse& ir) {
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  if (ir.samples.empty()) throw std::invalid_argument("empty signal");
  if (ir.sample_rate_hz <= 0) {
    throw std::invalid_argument("non-positive sample rate");
  }
  if (ir.samples.size() > 0x1fffffffu) {
    throw std::invalid_argument("signal too long for a wav file");
  }
  const auto n = static_cast<std::uint32_t>(ir.samples.size());
  const std::uint32_t data_size = n * 4;
  const auto fs = static_cast<std::uint32_t>(ir.sample_rate_hz);

  std::vector<std::uint8_t> buf;
  buf.reserve(58 + data_size);
  push_tag(buf, "RIFF");
  push_u32(buf, 4 + (8 + 16) + (8 + 4) + (8 + data_size));
  push_tag(buf, "WAVE");
  push_tag(buf, "fmt ");
  push_u32(buf, 16);
  push_u16(buf, kFormatIeeeFloat);
  push_u16(buf, 1);  // channels
  push_u32(buf, fs);
  push_u32(buf, fs * 4);  // byte rate
  push_u16(buf, 4);       // block align
  push_u16(buf, 32);      // bits per sample
  push_tag(buf, "fact");
  push_u32(buf, 4);
  push_u32(buf, n);
  push_tag(buf, "data");
  push_u32(buf, data_size);
  for (double v : ir.samples) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    push_u32(buf, bits);
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ImpulseResponse read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open audio file " + path.string());
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 12) corrupt(path, "shorter than a RIFF header");
  if (!tag_is(buf, 0, "RIFF") || !tag_is(buf, 8, "WAVE")) {
    corrupt(path, "not a RIFF/WAVE stream");
  }

  bool have_fmt = false;
  std::uint32_t sample_rate = 0;
  ImpulseResponse ir;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_size = read_u32(buf, pos + 4);
    const std::size_t payload = pos + 8;
    if (payload + chunk_size > buf.size()) {
      corrupt(path, "chunk overruns the file");
    }
    if (tag_is(buf, pos, "fmt ")) {
      if (chunk_size < 16) corrupt(path, "fmt chunk too short");
      const std::uint16_t format = read_u16(buf, payload);
      const std::uint16_t channels = read_u16(buf, payload + 2);
      sample_rate = read_u32(buf, payload + 4);
      const std::uint16_t bits = read_u16(buf, payload + 14);
      if (format != kFormatIeeeFloat || channels != 1 || bits != 32) {
        throw std::runtime_error("unsupported audio format in " +
                                 path.string() +
                                 " (expected mono 32-bit float)");
      }
      if (sample_rate == 0 || sample_rate > 0x7fffffffu) {
        corrupt(path, "invalid sample rate");
      }
      have_fmt = true;
    } else if (tag_is(buf, pos, "data")) {
      if (!have_fmt) corrupt(path, "data chunk precedes fmt chunk");
      if (chunk_size % 4 != 0) corrupt(path, "data size not sample-aligned");
      const std::size_t n = chunk_size / 4;
      if (n == 0) corrupt(path, "empty data chunk");
      ir.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = read_u32(buf, payload + 4 * i);
        ir.samples[i] = static_cast<double>(std::bit_cast<float>(bits));
      }
      ir.sample_rate_hz = static_cast<int>(sample_rate);
      return ir;
    }
    pos = payload + chunk_size + (chunk_size & 1);
  }
  corrupt(path, "no data chunk");
}

}  // namespace roomcomp::io
