#include "glyphforge/font.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "glyphforge/errors.hpp"
#include "glyphforge/resources.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::render {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

int to_int(std::string_view s, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("bdf: bad integer '" + std::string(s) + "' on line " + std::to_string(line_no));
  }
  return v;
}

int scaled(int v, int size_px, int design) {
  return static_cast<int>(std::lround(static_cast<double>(v) * size_px / design));
}

}  // namespace

BitmapFont BitmapFont::parse_bdf(std::string_view text, std::string name) {
  BitmapFont font;
  font.name_ = std::move(name);
  Glyph cur;
  long encoding = -1;
  bool in_char = false;
  bool in_bitmap = false;
  int row = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (in_bitmap) {
      if (tok[0] == "ENDCHAR") {
        in_bitmap = in_char = false;
        if (encoding >= 0) font.glyphs_[static_cast<char32_t>(encoding)] = std::move(cur);
        cur = Glyph{};
        continue;
      }
      if (row >= cur.height) throw ValidationError("bdf: too many bitmap rows on line " + std::to_string(line_no));
      const auto hex = tok[0];
      for (int x = 0; x < cur.width; ++x) {
        const std::size_t nibble_idx = static_cast<std::size_t>(x / 4);
        if (nibble_idx >= hex.size()) break;
        const char c = hex[nibble_idx];
        int nib = 0;
        if (c >= '0' && c <= '9') nib = c - '0';
        else if (c >= 'A' && c <= 'F') nib = c - 'A' + 10;
        else if (c >= 'a' && c <= 'f') nib = c - 'a' + 10;
        else throw ValidationError("bdf: bad hex on line " + std::to_string(line_no));
        cur.bits[static_cast<std::size_t>(row) * cur.width + x] = (nib >> (3 - x % 4)) & 1;
      }
      ++row;
      continue;
    }

    const auto key = tok[0];
    if (key == "FONT" && tok.size() >= 2 && font.name_.empty()) {
      font.name_ = std::string(tok[1]);
    } else if (key == "FONT_ASCENT" && tok.size() >= 2) {
      font.ascent_ = to_int(tok[1], line_no);
    } else if (key == "FONT_DESCENT" && tok.size() >= 2) {
      font.descent_ = to_int(tok[1], line_no);
    } else if (key == "STARTCHAR") {
      in_char = true;
      encoding = -1;
      cur = Glyph{};
    } else if (in_char && key == "ENCODING" && tok.size() >= 2) {
      encoding = to_int(tok[1], line_no);
    } else if (in_char && key == "DWIDTH" && tok.size() >= 2) {
      cur.advance = to_int(tok[1], line_no);
    } else if (in_char && key == "BBX" && tok.size() >= 5) {
      cur.width = to_int(tok[1], line_no);
      cur.height = to_int(tok[2], line_no);
      cur.x_offset = to_int(tok[3], line_no);
      cur.y_offset = to_int(tok[4], line_no);
      if (cur.width < 0 || cur.height < 0) throw ValidationError("bdf: negative BBX on line " + std::to_string(line_no));
      cur.bits.assign(static_cast<std::size_t>(cur.width) * cur.height, 0);
    } else if (in_char && key == "BITMAP") {
      in_bitmap = true;
      row = 0;
    }
  }
  if (font.ascent_ <= 0 || font.descent_ < 0) throw ValidationError("bdf: missing FONT_ASCENT/FONT_DESCENT");
  if (font.glyphs_.empty()) throw ValidationError("bdf: font has no glyphs");
  return font;
}

BitmapFont BitmapFont::load_bdf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open font file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bdf(ss.str(), {});
}

BitmapFont BitmapFont::block_font(int advance, int ascent, int descent) {
  BitmapFont font;
  font.name_ = "block";
  font.ascent_ = ascent;
  font.descent_ = descent;
  for (char32_t cp = 0x20; cp < 0x7F; ++cp) {
    Glyph g;
    g.advance = advance;
    if (cp != U' ') {
      g.width = std::max(1, advance - 2);
      g.height = std::max(1, ascent - 1);
      g.x_offset = 1;
      g.y_offset = 0;
      g.bits.assign(static_cast<std::size_t>(g.width) * g.height, 1);
    }
    font.glyphs_[cp] = std::move(g);
  }
  return font;
}

bool BitmapFont::monospace() const {
  int adv = -1;
  for (const auto& [_, g] : glyphs_) {
    if (adv < 0) adv = g.advance;
    else if (g.advance != adv) return false;
  }
  return true;
}

const Glyph* BitmapFont::find(char32_t cp) const {
  const auto it = glyphs_.find(cp);
  return it == glyphs_.end() ? nullptr : &it->second;
}

int BitmapFont::advance(char32_t cp, int size_px) const {
  if (const Glyph* g = find(cp)) return std::max(1, scaled(g->advance, size_px, design_size()));
  return std::max(2, static_cast<int>(std::lround(size_px * 0.6)));
}

int BitmapFont::measure(std::u32string_view line, int size_px) const {
  int w = 0;
  for (char32_t cp : line) w += advance(cp, size_px);
  return w;
}

int BitmapFont::measure(std::string_view utf8_line, int size_px) const {
  return measure(text::decode_utf8(utf8_line), size_px);
}

Image BitmapFont::render(std::u32string_view line, int size_px, std::vector<char32_t>* missing) const {
  if (line.empty()) throw DegenerateInputError("cannot render an empty line (zero-width canvas)");
  if (size_px < 1) throw ValidationError("font size must be >= 1 px");
  const int width = measure(line, size_px);
  Image out(width, size_px, 1, 0);
  const double scale = static_cast<double>(size_px) / design_size();
  const int baseline = scaled(ascent_, size_px, design_size());
  int pen = 0;
  for (char32_t cp : line) {
    const int adv = advance(cp, size_px);
    const Glyph* g = find(cp);
    if (g == nullptr) {
      if (missing) missing->push_back(cp);
      const int top = std::clamp(static_cast<int>(std::lround(size_px * 0.2)), 0, size_px - 1);
      const int bottom = std::clamp(baseline - 1, top, size_px - 1);
      const int left = pen + (adv > 3 ? 1 : 0);
      const int right = pen + adv - (adv > 3 ? 2 : 1);
      for (int x = left; x <= right; ++x) {
        out.at(x, top) = 255;
        out.at(x, bottom) = 255;
      }
      for (int y = top; y <= bottom; ++y) {
        out.at(left, y) = 255;
        out.at(right, y) = 255;
      }
    } else if (g->width > 0 && g->height > 0) {
      const int gx0 = pen + scaled(g->x_offset, size_px, design_size());
      const int gx1 = pen + scaled(g->x_offset + g->width, size_px, design_size());
      const int gy0 = baseline - scaled(g->y_offset + g->height, size_px, design_size());
      const int gy1 = baseline - scaled(g->y_offset, size_px, design_size());
      for (int y = std::max(gy0, 0); y < std::min(gy1, size_px); ++y) {
        const int sy = std::min(g->height - 1, static_cast<int>((y - gy0 + 0.5) / scale));
        for (int x = std::max(gx0, 0); x < std::min(gx1, width); ++x) {
          const int sx = std::min(g->width - 1, static_cast<int>((x - gx0 + 0.5) / scale));
          if (g->bits[static_cast<std::size_t>(sy) * g->width + sx]) out.at(x, y) = 255;
        }
      }
    }
    pen += adv;
  }
  return out;
}

Image BitmapFont::render(std::string_view utf8_line, int size_px, std::vector<char32_t>* missing) const {
  return render(text::decode_utf8(utf8_line), size_px, missing);
}

const BitmapFont& builtin_font() {
  static const BitmapFont font = BitmapFont::parse_bdf(resources::get("fonts/gf-mono.bdf"), "gf-mono");
  return font;
}

FontRegistry FontRegistry::builtin() {
  FontRegistry reg;
  reg.add("mono", std::shared_ptr<const BitmapFont>(&builtin_font(), [](const BitmapFont*) {}));
  static const BitmapFont serif = BitmapFont::parse_bdf(resources::get("fonts/gf-serif.bdf"), "gf-serif");
  reg.add("serif", std::shared_ptr<const BitmapFont>(&serif, [](const BitmapFont*) {}));
  reg.set_default("mono");
  return reg;
}

FontRegistry FontRegistry::load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open font config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

FontRegistry FontRegistry::parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  FontRegistry reg;
  std::string section;
  std::string default_id;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = text::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "font config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("unterminated section header", where);
      section = text::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "fonts") throw ValidationError("unknown section [" + section + "]", where);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("expected key = \"value\"", where);
    const std::string key = text::trim(std::string_view(line).substr(0, eq));
    std::string value = text::trim(std::string_view(line).substr(eq + 1));
    if (value.size() < 2 || value.front() != '"' || value.back() != '"') {
      throw ValidationError("value must be a double-quoted string", where);
    }
    value = value.substr(1, value.size() - 2);
    if (section.empty()) {
      if (key != "default") throw ValidationError("unknown top-level key '" + key + "'", where);
      default_id = value;
    } else {
      std::shared_ptr<const BitmapFont> font;
      if (value.rfind("builtin:", 0) == 0) {
        const std::string res = "fonts/" + value.substr(8) + ".bdf";
        if (!resources::contains(res)) throw ValidationError("unknown builtin font " + value, where);
        font = std::make_shared<BitmapFont>(BitmapFont::parse_bdf(resources::get(res), value.substr(8)));
      } else {
        std::filesystem::path p(value);
        if (p.is_relative()) p = base_dir / p;
        font = std::make_shared<BitmapFont>(BitmapFont::load_bdf(p));
      }
      reg.add(key, std::move(font));
    }
  }
  if (reg.fonts_.empty()) throw ValidationError("font config declares no fonts");
  reg.set_default(default_id.empty() ? reg.fonts_.begin()->first : default_id);
  return reg;
}

void FontRegistry::add(const std::string& id, std::shared_ptr<const BitmapFont> font) {
  if (id.empty() || id == "auto") throw ValidationError("reserved or empty font id '" + id + "'");
  fonts_[id] = std::move(font);
}

void FontRegistry::set_default(const std::string& id) {
  if (!contains(id)) throw ValidationError("default font '" + id + "' is not registered");
  default_id_ = id;
}

bool FontRegistry::contains(std::string_view id) const { return fonts_.find(id) != fonts_.end(); }

const BitmapFont& FontRegistry::resolve(std::string_view id) const {
  if (id == "auto") id = default_id_;
  const auto it = fonts_.find(id);
  if (it == fonts_.end()) throw ValidationError("unknown font '" + std::string(id) + "'", "font");
  return *it->second;
}

std::vector<std::string> FontRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : fonts_) out.push_back(id);
  return out;
}

std::string FontRegistry::font_list() const {
  std::string out;
  for (const auto& [id, _] : fonts_) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace glyphforge::render
