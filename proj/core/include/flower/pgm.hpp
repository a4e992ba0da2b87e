#pragma once

#include <optional>
#include <string>

#include "flower/sim.hpp"

namespace flower {

/// Binary PGM (P5), maxval 255 or 65535; 16-bit samples are big-endian.
/// Values widen to int32 on read.
std::optional<ImageBuf> read_pgm(const std::string& path, std::string* error = nullptr);

/// Writes maxval 255 when every sample fits a byte, 65535 otherwise.
/// Samples clamp into [0, maxval].
bool write_pgm(const std::string& path, const ImageBuf& image, std::string* error = nullptr);

}  // namespace flower
