#include "flower/pgm.hpp"

#include <cstdio>
#include <memory>

namespace flower {
namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<FILE, FileCloser>;

void set_error(std::string* error, std::string message) {
  if (error) *error = std::move(message);
}

// Header fields are separated by whitespace; '#' starts a comment.
bool next_int(FILE* f, int64_t& out) {
  int c;
  do {
    c = std::fgetc(f);
    if (c == '#')
      while (c != EOF && c != '\n') c = std::fgetc(f);
  } while (c == ' ' || c == '\t' || c == '\r' || c == '\n');
  if (c < '0' || c > '9') return false;
  out = 0;
  while (c >= '0' && c <= '9') {
    out = out * 10 + (c - '0');
    c = std::fgetc(f);
  }
  return c != EOF || out >= 0;
}

}  // namespace

std::optional<ImageBuf> read_pgm(const std::string& path, std::string* error) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) {
    set_error(error, "cannot open '" + path + "'");
    return std::nullopt;
  }
  if (std::fgetc(f.get()) != 'P' || std::fgetc(f.get()) != '5') {
    set_error(error, "'" + path + "' is not a binary PGM (P5) file");
    return std::nullopt;
  }
  int64_t w = 0, h = 0, maxval = 0;
  if (!next_int(f.get(), w) || !next_int(f.get(), h) || !next_int(f.get(), maxval) || w <= 0 ||
      h <= 0 || maxval <= 0 || maxval > 65535) {
    set_error(error, "'" + path + "' has a malformed PGM header");
    return std::nullopt;
  }
  ImageBuf img(static_cast<int>(w), static_cast<int>(h));
  size_t pixels = img.data.size();
  if (maxval < 256) {
    std::vector<uint8_t> raw(pixels);
    if (std::fread(raw.data(), 1, pixels, f.get()) != pixels) {
      set_error(error, "'" + path + "' is truncated");
      return std::nullopt;
    }
    for (size_t i = 0; i < pixels; ++i) img.data[i] = raw[i];
  } else {
    std::vector<uint8_t> raw(pixels * 2);
    if (std::fread(raw.data(), 1, raw.size(), f.get()) != raw.size()) {
      set_error(error, "'" + path + "' is truncated");
      return std::nullopt;
    }
    for (size_t i = 0; i < pixels; ++i)
      img.data[i] = (int32_t(raw[2 * i]) << 8) | raw[2 * i + 1];  // big-endian
  }
  return img;
}

bool write_pgm(const std::string& path, const ImageBuf& image, std::string* error) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) {
    set_error(error, "cannot open '" + path + "' for writing");
    return false;
  }
  int32_t max_sample = 0;
  for (int32_t v : image.data) max_sample = std::max(max_sample, v);
  int maxval = max_sample > 255 ? 65535 : 255;
  std::fprintf(f.get(), "P5\n%d %d\n%d\n", image.width, image.height, maxval);
  bool ok = true;
  if (maxval == 255) {
    std::vector<uint8_t> raw(image.data.size());
    for (size_t i = 0; i < raw.size(); ++i)
      raw[i] = uint8_t(std::min(std::max(image.data[i], 0), 255));
    ok = std::fwrite(raw.data(), 1, raw.size(), f.get()) == raw.size();
  } else {
    std::vector<uint8_t> raw(image.data.size() * 2);
    for (size_t i = 0; i < image.data.size(); ++i) {
      int32_t v = std::min(std::max(image.data[i], 0), 65535);
      raw[2 * i] = uint8_t(v >> 8);
      raw[2 * i + 1] = uint8_t(v & 0xff);
    }
    ok = std::fwrite(raw.data(), 1, raw.size(), f.get()) == raw.size();
  }
  if (!ok) set_error(error, "short write to '" + path + "'");
  return ok;
}

}  // namespace flower
