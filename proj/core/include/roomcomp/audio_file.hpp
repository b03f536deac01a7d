// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "roomcomp/signal.hpp"

namespace roomcomp::io {

// Writes a mono 32-bit float WAV file. The file is assembled next to the
// destination and renamed into place so readers never observe a partial
// write.
void write_wav(const std::filesystem::path& path, const ImpulseResponse& ir);

// Reads a mono 32-bit float WAV file. Anything else is rejected.
ImpulseResponse read_wav(const std::filesystem::path& path);

}  // namespace roomcomp::io
