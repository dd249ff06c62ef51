#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace ggi {

struct Rgb8 {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8& o) const { return r == o.r && g == o.g && b == o.b; }
  bool operator!=(const Rgb8& o) const { return !(*this == o); }
  uint32_t packed() const { return (uint32_t(r) << 16) | (uint32_t(g) << 8) | b; }
};

constexpr Rgb8 kBackground{0, 0, 0};

/// Stitch colors: evenly spread positions on the 1530-entry full-saturation
/// hue wheel, visited in a large-stride order so consecutive ids get
/// distant hues. Injective for ids 0..254; never background.
Rgb8 stitch_color(int stitch_id);

/// Inverse of stitch_color; nullopt for colors outside the palette.
std::optional<int> stitch_id_of_color(Rgb8 color);

/// Panel-type palette: a fixed table for the common garment vocabulary
/// plus a deterministic hashed fallback for unknown types. In strict mode
/// unknown types raise UnknownPanelType instead.
Rgb8 panel_type_color(const std::string& panel_type, bool strict);

bool panel_type_known(const std::string& panel_type);

/// FNV-1a over the palette definitions; stored in the sidecar so decoders
/// can detect palette drift.
uint64_t panel_palette_hash();
uint64_t stitch_palette_hash();

}  // namespace ggi
