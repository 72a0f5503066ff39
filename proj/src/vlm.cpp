#include "glyphforge/vlm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "glyphforge/errors.hpp"
#include "glyphforge/glyph_renderer.hpp"
#include "glyphforge/resources.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::vlm {

using nlohmann::json;

namespace {

constexpr std::string_view kTargetsTag = "Target texts: ";
constexpr std::string_view kInputTag = "Input: ";
constexpr std::string_view kPromptTag = "Prompt: ";

PromptTemplate load(std::string name, OutputKind kind) {
  std::string body(resources::get("prompts/" + name + ".txt"));
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
  return {std::move(name), std::move(body), kind};
}

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string hex(const unsigned char* p, std::size_t n) {
  static const char* d = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = d[p[i] >> 4];
    out[2 * i + 1] = d[p[i] & 15];
  }
  return out;
}

std::string strip_quotes(std::string_view s) {
  std::string out;
  for (char32_t cp : text::decode_utf8(s)) {
    if (cp != U'"' && cp != U'“' && cp != U'”') text::append_utf8(out, cp);
  }
  return out;
}

std::optional<std::string> find_text_part(const VlmRequest& req, std::string_view tag) {
  for (const auto& m : req.messages) {
    for (const auto& p : m.content) {
      if (p.kind == MessagePart::Kind::kText && p.text.rfind(tag, 0) == 0) return p.text.substr(tag.size());
    }
  }
  return std::nullopt;
}

std::vector<const MessagePart*> image_parts(const VlmRequest& req) {
  std::vector<const MessagePart*> out;
  for (const auto& m : req.messages) {
    for (const auto& p : m.content) {
      if (p.kind == MessagePart::Kind::kImage) out.push_back(&p);
    }
  }
  return out;
}

std::string mean_color_hex(const std::vector<std::uint8_t>& png) {
  if (png.empty()) return "#FFFFFF";
  const Image img = to_rgb(decode_png(png));
  double sum[3] = {0, 0, 0};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) sum[c] += img.at(x, y, c);
    }
  }
  char buf[8];
  const double n = static_cast<double>(img.pixel_count());
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", static_cast<unsigned>(std::lround(sum[0] / n)),
                static_cast<unsigned>(std::lround(sum[1] / n)), static_cast<unsigned>(std::lround(sum[2] / n)));
  return buf;
}

std::string mock_typography(const VlmRequest& req) {
  const auto targets_text = find_text_part(req, kTargetsTag);
  std::vector<std::string> targets;
  if (targets_text) targets = json::parse(*targets_text).get<std::vector<std::string>>();
  const auto images = image_parts(req);
  plan::TypographyPlan p;
  p.image_analysis.background_style = "plain light background";
  p.image_analysis.dominant_colors = {images.empty() ? std::string("#FFFFFF") : mean_color_hex(images[0]->png)};
  p.image_analysis.text_style_hint = "clean printed type";
  const double band = targets.empty() ? 0.0 : 0.8 / static_cast<double>(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    plan::TextRegion r;
    r.content = targets[i];
    r.bbox = {0.1, 0.1 + band * static_cast<double>(i), 0.9, 0.1 + band * static_cast<double>(i + 1)};
    r.is_latex = render::detect_math(targets[i]);
    p.text_regions.push_back(std::move(r));
  }
  return plan::serialize_plan(p, -1);
}

std::string mock_clean(const VlmRequest& req) {
  const std::string input = find_text_part(req, kInputTag).value_or("");
  std::string kept;
  try {
    std::size_t last = 0;
    for (const auto& sp : text::find_quoted_spans(input)) {
      // quotes are 1 byte (ASCII) or 3 bytes (typographic)
      const std::size_t open = input[sp.begin - 1] == '"' ? 1 : 3;
      kept += input.substr(last, sp.begin - open - last);
      last = sp.end + (input[sp.end] == '"' ? 1 : 3);
    }
    kept += input.substr(std::min(last, input.size()));
  } catch (const ValidationError&) {
    kept = strip_quotes(input);
  }
  auto cps = text::decode_utf8(text::collapse_whitespace(kept));
  while (!cps.empty() && std::u32string_view(U". ,;:!?。，！？").find(cps.back()) != std::u32string_view::npos) {
    cps.pop_back();
  }
  std::string out = text::encode_utf8(cps);
  if (!out.empty()) out += ". ";
  return out + "No text visible.";
}

std::uint64_t digest_u64(const std::string& digest_hex, std::size_t offset = 0) {
  std::uint64_t v = 0;
  std::from_chars(digest_hex.data() + offset, digest_hex.data() + offset + 16, v, 16);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Templates

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < body.size() && is_ident(body[j])) ++j;
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      std::string name = body.substr(i + 1, j - i - 1);
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
      i = j;
    }
  }
  return out;
}

const std::vector<PromptTemplate>& templates() {
  static const std::vector<PromptTemplate> all = {
      load("typography_analysis", OutputKind::kJsonPlan),
      load("clean_prompt", OutputKind::kText),
      load("style_prompt", OutputKind::kText),
      load("refine_prompt", OutputKind::kText),
      load("score_image", OutputKind::kNumber),
      load("rank_images", OutputKind::kIndexList),
      load("ocr_recognition", OutputKind::kRawText),
      load("style_score", OutputKind::kNumber),
      load("faithfulness_score", OutputKind::kNumber),
  };
  return all;
}

const PromptTemplate& get_template(std::string_view name) {
  for (const auto& t : templates()) {
    if (t.name == name) return t;
  }
  throw ValidationError("unknown prompt template '" + std::string(name) + "'", "template");
}

std::string render_template(const PromptTemplate& t, const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(t.body.size());
  const std::string& b = t.body;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == '{') {
      std::size_t j = i + 1;
      while (j < b.size() && is_ident(b[j])) ++j;
      if (j > i + 1 && j < b.size() && b[j] == '}') {
        const std::string name = b.substr(i + 1, j - i - 1);
        const auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw ValidationError("unbound placeholder {" + name + "} in template " + t.name, name);
        }
        out += it->second;
        i = j;
        continue;
      }
    }
    out.push_back(b[i]);
  }
  return out;
}

std::string extract_quoted_text(std::string_view prompt) {
  std::string out;
  for (const auto& sp : text::find_quoted_spans(prompt)) {
    if (!out.empty()) out.push_back(' ');
    out += strip_quotes(prompt.substr(sp.begin, sp.end - sp.begin));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reply parsing

double parse_number_reply(std::string_view reply) {
  const std::string s = text::trim(reply);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError("unparseable numeric reply: '" + s + "'", "reply");
  }
  return std::clamp(v, 0.0, 10.0);
}

std::vector<int> parse_index_list(std::string_view reply) {
  const std::string s = text::trim(reply);
  std::vector<int> out;
  std::size_t pos = 0;
  if (s.empty()) throw ValidationError("empty index-list reply", "reply");
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = text::trim(std::string_view(s).substr(pos, comma - pos));
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ValidationError("unparseable index-list reply: '" + s + "'", "reply");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

ScalarReply parse_scalar_reply(std::string_view text, OutputKind kind) {
  switch (kind) {
    case OutputKind::kNumber:
      return parse_number_reply(text);
    case OutputKind::kIndexList:
      return parse_index_list(text);
    default:
      throw ValidationError("reply kind is not scalar", "kind");
  }
}

std::vector<double> rank_to_scores(const std::vector<int>& ranking, int n) {
  if (static_cast<int>(ranking.size()) != n) throw ValidationError("ranking must list every image once", "reply");
  std::vector<double> scores(n, -1.0);
  for (int p = 0; p < n; ++p) {
    const int idx = ranking[p];
    if (idx < 1 || idx > n || scores[idx - 1] >= 0.0) {
      throw ValidationError("ranking is not a permutation of 1.." + std::to_string(n), "reply");
    }
    scores[idx - 1] = static_cast<double>(n - p) / n;
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Messages and digests

MessagePart MessagePart::from_image(const Image& img) { return {Kind::kImage, {}, encode_png(img)}; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  return hex(md, len);
}

std::string request_digest(const VlmRequest& req) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-256 init failed");
  }
  auto feed = [&](const void* p, std::size_t n) {
    // length prefix keeps part boundaries unambiguous
    const std::uint64_t len = n;
    EVP_DigestUpdate(ctx, &len, sizeof(len));
    EVP_DigestUpdate(ctx, p, n);
  };
  for (const auto& m : req.messages) {
    feed(m.role.data(), m.role.size());
    for (const auto& part : m.content) {
      if (part.kind == MessagePart::Kind::kText) {
        feed("T", 1);
        feed(part.text.data(), part.text.size());
      } else {
        feed("I", 1);
        feed(part.png.data(), part.png.size());
      }
    }
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  return hex(md, len);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

// ---------------------------------------------------------------------------
// Mock backend

void MockVlmBackend::add_fixture(const std::string& template_name, const std::string& digest, std::string reply) {
  fixtures_[{template_name, digest}] = std::move(reply);
}

void MockVlmBackend::load_fixtures(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open fixture file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      add_fixture(j.at("template").get<std::string>(), j.at("digest").get<std::string>(),
                  j.at("reply").get<std::string>());
    } catch (const json::exception& e) {
      throw ValidationError("fixture line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string MockVlmBackend::call(const VlmRequest& req) const {
  const std::string digest = request_digest(req);
  if (const auto it = fixtures_.find({req.template_name, digest}); it != fixtures_.end()) return it->second;

  const std::string& t = req.template_name;
  if (t == "typography_analysis") return mock_typography(req);
  if (t == "clean_prompt") return mock_clean(req);
  if (t == "style_prompt") {
    const std::string input = find_text_part(req, kInputTag).value_or("");
    return "Restyle the text to harmonize with the scene (" + input +
           ") while keeping the background untouched and every text position fixed.";
  }
  if (t == "refine_prompt") {
    return find_text_part(req, kInputTag).value_or("") +
           " The text is clearly legible, well-positioned and high-contrast, under soft natural lighting.";
  }
  if (t == "score_image" || t == "style_score" || t == "faithfulness_score") {
    return std::to_string(3 + digest_u64(digest) % 8);  // 3..10
  }
  if (t == "rank_images") {
    const auto images = image_parts(req);
    std::vector<std::pair<std::string, int>> keyed;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string_view bytes(reinterpret_cast<const char*>(images[i]->png.data()), images[i]->png.size());
      keyed.emplace_back(sha256_hex(std::string(bytes) + digest), static_cast<int>(i) + 1);
    }
    std::sort(keyed.begin(), keyed.end());
    std::string out;
    for (const auto& [key, idx] : keyed) out += (out.empty() ? "" : ",") + std::to_string(idx);
    return out;
  }
  if (t == "ocr_recognition") return "";
  throw BackendError("mock backend has no responder for template '" + t + "'");
}

// ---------------------------------------------------------------------------
// Agent

VlmRequest VlmAgent::compose(const std::string& template_name, const std::map<std::string, std::string>& bindings,
                             const std::vector<std::string>& inputs, const std::vector<const Image*>& images) const {
  VlmRequest req;
  req.template_name = template_name;
  Message m;
  m.content.push_back(MessagePart::from_text(render_template(get_template(template_name), bindings)));
  for (const auto& in : inputs) m.content.push_back(MessagePart::from_text(in));
  for (const Image* img : images) m.content.push_back(MessagePart::from_image(*img));
  req.messages.push_back(std::move(m));
  return req;
}

plan::TypographyPlan VlmAgent::analyze_typography(const Image& grid_preview, const std::vector<std::string>& targets,
                                                  const render::FontRegistry& registry) const {
  const auto req = compose("typography_analysis", {{"font_list", registry.font_list()}},
                           {std::string(kTargetsTag) + json(targets).dump()}, {&grid_preview});
  return plan::parse_plan(backend_->call(req));
}

std::string VlmAgent::clean_prompt(const std::string& prompt, const plan::TypographyPlan* /*typography_plan*/) const {
  return text::trim(backend_->call(compose("clean_prompt", {}, {std::string(kInputTag) + prompt}, {})));
}

std::string VlmAgent::style_prompt(const plan::ImageAnalysis& a) const {
  std::string colors = "[";
  for (std::size_t i = 0; i < a.dominant_colors.size(); ++i) {
    colors += (i ? ",\"" : "\"") + a.dominant_colors[i] + "\"";
  }
  colors += "]";
  const std::string input = std::string(kInputTag) + "background_style=\"" + a.background_style +
                            "\", colors=" + colors + ", hint=\"" + a.text_style_hint + "\"";
  return text::trim(backend_->call(compose("style_prompt", {}, {input}, {})));
}

std::string VlmAgent::refine_prompt(const std::string& prompt) const {
  return text::trim(backend_->call(compose("refine_prompt", {}, {std::string(kInputTag) + prompt}, {})));
}

double VlmAgent::score_image(const Image& img, const std::string& prompt) const {
  const auto reply = backend_->call(compose("score_image", {}, {std::string(kPromptTag) + prompt}, {&img}));
  return parse_number_reply(reply) / 10.0;
}

std::vector<int> VlmAgent::rank_images(const std::vector<const Image*>& images, const std::string& prompt) const {
  const auto reply = backend_->call(
      compose("rank_images", {{"n", std::to_string(images.size())}}, {std::string(kPromptTag) + prompt}, images));
  auto ranking = parse_index_list(reply);
  rank_to_scores(ranking, static_cast<int>(images.size()));  // validates the permutation
  return ranking;
}

std::string VlmAgent::ocr(const Image& img) const {
  return backend_->call(compose("ocr_recognition", {}, {}, {&img}));
}

double VlmAgent::style_score(const Image& img) const {
  return parse_number_reply(backend_->call(compose("style_score", {}, {}, {&img}))) / 10.0;
}

double VlmAgent::faithfulness_score(const Image& img, const std::string& prompt) const {
  return parse_number_reply(
             backend_->call(compose("faithfulness_score", {{"original_prompt", prompt}}, {}, {&img}))) /
         10.0;
}

}  // namespace glyphforge::vlm
