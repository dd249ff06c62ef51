#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ggi::detail {

// Rows are stored bottom-up in memory (y = 0 is the pattern-space bottom);
// the writer flips them so images display right side up.
void write_png_rgb8(const std::string& path, int width, int height,
                    const std::vector<uint8_t>& rgb);

// Returns rows bottom-up; throws Io / FormatVersionMismatch.
std::vector<uint8_t> read_png_rgb8(const std::string& path, int* width, int* height);

}  // namespace ggi::detail
