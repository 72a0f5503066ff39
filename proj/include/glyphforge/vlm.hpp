#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glyphforge/font.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/typography_plan.hpp"

namespace glyphforge::vlm {

enum class OutputKind { kJsonPlan, kText, kNumber, kIndexList, kRawText };

struct PromptTemplate {
  std::string name;
  std::string body;
  OutputKind kind = OutputKind::kText;

  // Placeholder names in order of first appearance ("{font_list}" -> "font_list").
  std::vector<std::string> placeholders() const;
};

// typography_analysis, clean_prompt, style_prompt, refine_prompt, score_image,
// rank_images, ocr_recognition, style_score, faithfulness_score.
const std::vector<PromptTemplate>& templates();
const PromptTemplate& get_template(std::string_view name);

// Substitutes every {name}; throws ValidationError naming an unbound placeholder.
std::string render_template(const PromptTemplate& t, const std::map<std::string, std::string>& bindings);

// Double-quoted spans (ASCII and typographic) joined by single spaces, quotes
// stripped. Throws ValidationError on unbalanced quotes.
std::string extract_quoted_text(std::string_view prompt);

using ScalarReply = std::variant<double, std::vector<int>>;
// kNumber: a decimal number, clamped to [0, 10]. kIndexList: comma-separated
// integers. Only surrounding whitespace is tolerated.
ScalarReply parse_scalar_reply(std::string_view text, OutputKind kind);
double parse_number_reply(std::string_view text);
std::vector<int> parse_index_list(std::string_view text);

// 1-based ranking (best first) of n items -> per-item score in (0, 1]:
// the item at rank position p gets (n - p) / n.
std::vector<double> rank_to_scores(const std::vector<int>& ranking, int n);

struct MessagePart {
  enum class Kind { kText, kImage };
  Kind kind = Kind::kText;
  std::string text;
  std::vector<std::uint8_t> png;  // kImage payload

  static MessagePart from_text(std::string s) { return {Kind::kText, std::move(s), {}}; }
  static MessagePart from_image(const Image& img);
};

struct Message {
  std::string role = "user";
  std::vector<MessagePart> content;
};

struct VlmRequest {
  std::string template_name;
  std::vector<Message> messages;
};

// Hex SHA-256 over the text and image bytes of every part, in order.
std::string request_digest(const VlmRequest& req);
std::string sha256_hex(std::string_view bytes);
std::string base64_encode(std::span<const std::uint8_t> bytes);

class VlmBackend {
 public:
  virtual ~VlmBackend() = default;
  virtual std::string call(const VlmRequest& req) const = 0;
  virtual std::string identity() const = 0;
};

// Offline backend: scripted replies keyed by (template, digest), otherwise a
// deterministic per-template responder computed from the request alone.
class MockVlmBackend final : public VlmBackend {
 public:
  MockVlmBackend() = default;

  void add_fixture(const std::string& template_name, const std::string& digest, std::string reply);
  // JSON-lines: {"template": ..., "digest": ..., "reply": ...}
  void load_fixtures(const std::filesystem::path& path);
  std::size_t fixture_count() const noexcept { return fixtures_.size(); }

  std::string call(const VlmRequest& req) const override;
  std::string identity() const override { return "mock-vlm/1"; }

 private:
  std::map<std::pair<std::string, std::string>, std::string> fixtures_;
};

struct RemoteConfig {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string api_key;
  std::string model = "default";
  std::chrono::seconds timeout{60};
  int max_in_flight = 4;

  // GLYPHFORGE_VLM_ENDPOINT, GLYPHFORGE_VLM_KEY, optional GLYPHFORGE_VLM_MODEL.
  static RemoteConfig from_env();
};

// JSON chat client. Request body:
//   {"model": m, "messages": [{"role": r, "content": [{"type": "text"|"image", "data": ...}]}]}
// with base64 PNG images; the reply is choices[0].message.content.
class RemoteVlmBackend final : public VlmBackend {
 public:
  explicit RemoteVlmBackend(RemoteConfig cfg);
  std::string call(const VlmRequest& req) const override;
  std::string identity() const override { return "remote:" + cfg_.model; }

  static std::string build_request_body(const RemoteConfig& cfg, const VlmRequest& req);
  static std::string parse_response_body(std::string_view body);

 private:
  RemoteConfig cfg_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

// High-level calls, one per template. Number-valued calls return the score
// normalized to [0, 1].
class VlmAgent {
 public:
  explicit VlmAgent(std::shared_ptr<const VlmBackend> backend) : backend_(std::move(backend)) {}

  const VlmBackend& backend() const { return *backend_; }

  VlmRequest compose(const std::string& template_name, const std::map<std::string, std::string>& bindings,
                     const std::vector<std::string>& inputs, const std::vector<const Image*>& images) const;

  plan::TypographyPlan analyze_typography(const Image& grid_preview, const std::vector<std::string>& targets,
                                          const render::FontRegistry& registry) const;
  // `typography_plan` is accepted for interface parity and ignored.
  std::string clean_prompt(const std::string& prompt, const plan::TypographyPlan* typography_plan = nullptr) const;
  std::string style_prompt(const plan::ImageAnalysis& analysis) const;
  std::string refine_prompt(const std::string& prompt) const;
  double score_image(const Image& img, const std::string& prompt) const;
  std::vector<int> rank_images(const std::vector<const Image*>& images, const std::string& prompt) const;
  std::string ocr(const Image& img) const;
  double style_score(const Image& img) const;
  double faithfulness_score(const Image& img, const std::string& prompt) const;

 private:
  std::shared_ptr<const VlmBackend> backend_;
};

}  // namespace glyphforge::vlm
