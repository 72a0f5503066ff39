#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::render {

struct Glyph {
  int advance = 0;
  int width = 0;
  int height = 0;
  int x_offset = 0;  // from pen position
  int y_offset = 0;  // bottom edge relative to baseline, up is positive
  std::vector<std::uint8_t> bits;  // width*height, 0 or 1
};

// 1-bit bitmap font at one design size (ascent + descent pixels), scaled
// nearest-neighbour to any requested pixel size.
class BitmapFont {
 public:
  static BitmapFont parse_bdf(std::string_view text, std::string name = {});
  static BitmapFont load_bdf(const std::filesystem::path& path);

  // Monospace font whose glyphs are solid boxes; handy for metric tests.
  static BitmapFont block_font(int advance, int ascent, int descent);

  const std::string& name() const noexcept { return name_; }
  int ascent() const noexcept { return ascent_; }
  int descent() const noexcept { return descent_; }
  int design_size() const noexcept { return ascent_ + descent_; }
  bool monospace() const;

  const Glyph* find(char32_t cp) const;
  bool has_glyph(char32_t cp) const { return find(cp) != nullptr; }

  // Advance in pixels at a line height of `size_px`. Missing glyphs use the tofu advance.
  int advance(char32_t cp, int size_px) const;
  int measure(std::u32string_view line, int size_px) const;
  int measure(std::string_view utf8_line, int size_px) const;

  // Coverage raster (gray, 255 = ink), height = size_px, width = measure().
  // Missing glyphs are drawn as tofu boxes and appended to `missing`.
  Image render(std::u32string_view line, int size_px, std::vector<char32_t>* missing = nullptr) const;
  Image render(std::string_view utf8_line, int size_px, std::vector<char32_t>* missing = nullptr) const;

 private:
  std::string name_;
  int ascent_ = 0;
  int descent_ = 0;
  std::map<char32_t, Glyph> glyphs_;
};

const BitmapFont& builtin_font();

// Font id -> font. Immutable once handed to the renderer.
class FontRegistry {
 public:
  // "mono" (default) and "serif", compiled into the library.
  static FontRegistry builtin();

  // TOML-style config:
  //   default = "mono"
  //   [fonts]
  //   mono = "gf-mono.bdf"        # relative to the config file
  //   serif = "builtin:gf-serif"
  static FontRegistry load_config(const std::filesystem::path& path);
  static FontRegistry parse_config(std::string_view text, const std::filesystem::path& base_dir);

  void add(const std::string& id, std::shared_ptr<const BitmapFont> font);
  void set_default(const std::string& id);

  bool contains(std::string_view id) const;
  // "auto" resolves to the default font; unknown ids throw ValidationError.
  const BitmapFont& resolve(std::string_view id) const;
  const std::string& default_id() const noexcept { return default_id_; }
  std::vector<std::string> ids() const;
  std::string font_list() const;

 private:
  std::map<std::string, std::shared_ptr<const BitmapFont>, std::less<>> fonts_;
  std::string default_id_;
};

}  // namespace glyphforge::render
