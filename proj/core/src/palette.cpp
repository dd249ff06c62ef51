#include "ggi/palette.hpp"

#include <unordered_map>
#include <utility>
#include <vector>

#include "ggi/error.hpp"

namespace ggi {

namespace {

constexpr int kHueWheel = 1530;  // distinct full-saturation RGB8 hues
constexpr int kHueStride = 947;  // coprime with 1530; spreads consecutive ids

Rgb8 hue_wheel(int p) {
  p = ((p % kHueWheel) + kHueWheel) % kHueWheel;
  const int seg = p / 255;
  const uint8_t rem = static_cast<uint8_t>(p % 255);
  switch (seg) {
    case 0: return {255, rem, 0};
    case 1: return {static_cast<uint8_t>(255 - rem), 255, 0};
    case 2: return {0, 255, rem};
    case 3: return {0, static_cast<uint8_t>(255 - rem), 255};
    case 4: return {rem, 0, 255};
    default: return {255, 0, static_cast<uint8_t>(255 - rem)};
  }
}

// GarmentCodeData-style panel vocabulary. Hues are wheel positions chosen
// to keep related types visually close but distinct.
const std::vector<std::pair<std::string, int>>& panel_type_table() {
  static const std::vector<std::pair<std::string, int>> table = {
      {"torso_front", 0},        {"torso_back", 60},
      {"torso_front_left", 120}, {"torso_front_right", 180},
      {"torso_back_left", 240},  {"torso_back_right", 300},
      {"sleeve", 360},           {"sleeve_left", 420},
      {"sleeve_right", 480},     {"cuff", 540},
      {"cuff_left", 600},        {"cuff_right", 660},
      {"collar", 720},           {"collar_front", 780},
      {"collar_back", 840},      {"hood", 900},
      {"skirt_panel", 960},      {"skirt_front", 1020},
      {"skirt_back", 1080},      {"pant_front", 1140},
      {"pant_back", 1200},       {"pant_front_left", 1260},
      {"pant_front_right", 1320},{"pant_back_left", 1380},
      {"pant_back_right", 1440}, {"waistband", 1500},
      {"belt", 30},              {"pocket", 90},
      {"strap", 150},            {"panel", 210},
  };
  return table;
}

const std::unordered_map<std::string, Rgb8>& panel_color_map() {
  static const std::unordered_map<std::string, Rgb8> map = [] {
    std::unordered_map<std::string, Rgb8> m;
    for (const auto& [name, pos] : panel_type_table()) m.emplace(name, hue_wheel(pos));
    return m;
  }();
  return map;
}

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Rgb8 stitch_color(int stitch_id) {
  if (stitch_id < 0 || stitch_id > 254) {
    throw Error(Errc::BadParams, "stitch palette supports ids 0..254");
  }
  return hue_wheel(stitch_id * kHueStride);
}

std::optional<int> stitch_id_of_color(Rgb8 color) {
  static const std::unordered_map<uint32_t, int> reverse = [] {
    std::unordered_map<uint32_t, int> m;
    for (int id = 0; id <= 254; ++id) m.emplace(stitch_color(id).packed(), id);
    return m;
  }();
  auto it = reverse.find(color.packed());
  if (it == reverse.end()) return std::nullopt;
  return it->second;
}

bool panel_type_known(const std::string& panel_type) {
  return panel_color_map().count(panel_type) != 0;
}

Rgb8 panel_type_color(const std::string& panel_type, bool strict) {
  const auto& map = panel_color_map();
  auto it = map.find(panel_type);
  if (it != map.end()) return it->second;
  if (strict) {
    throw Error(Errc::UnknownPanelType, "no palette entry for panel type '" + panel_type + "'");
  }
  const uint64_t h = fnv1a(panel_type.data(), panel_type.size());
  return hue_wheel(static_cast<int>(h % kHueWheel));
}

uint64_t panel_palette_hash() {
  uint64_t h = 14695981039346656037ull;
  for (const auto& [name, pos] : panel_type_table()) {
    h = fnv1a(name.data(), name.size(), h);
    const Rgb8 c = hue_wheel(pos);
    h = fnv1a(&c, 3, h);
  }
  return h;
}

uint64_t stitch_palette_hash() {
  uint64_t h = 14695981039346656037ull;
  for (int id = 0; id <= 254; ++id) {
    const Rgb8 c = stitch_color(id);
    h = fnv1a(&c, 3, h);
  }
  return h;
}

}  // namespace ggi
