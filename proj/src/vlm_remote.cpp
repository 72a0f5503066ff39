#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "glyphforge/errors.hpp"
#include "glyphforge/vlm.hpp"

namespace glyphforge::vlm {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("endpoint must start with http:// or https://", "endpoint");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ValidationError("unsupported endpoint scheme " + scheme, "endpoint");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig c;
  const char* ep = std::getenv("GLYPHFORGE_VLM_ENDPOINT");
  const char* key = std::getenv("GLYPHFORGE_VLM_KEY");
  if (ep == nullptr || *ep == '\0') throw BackendUnavailable("GLYPHFORGE_VLM_ENDPOINT is not set");
  c.endpoint = ep;
  if (key != nullptr) c.api_key = key;
  if (const char* model = std::getenv("GLYPHFORGE_VLM_MODEL"); model != nullptr && *model) c.model = model;
  return c;
}

RemoteVlmBackend::RemoteVlmBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.max_in_flight < 1) throw ValidationError("in-flight cap must be >= 1", "max_in_flight");
  split_endpoint(cfg_.endpoint);
  slots_ = std::make_unique<std::counting_semaphore<>>(cfg_.max_in_flight);
}

std::string RemoteVlmBackend::build_request_body(const RemoteConfig& cfg, const VlmRequest& req) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    json content = json::array();
    for (const auto& p : m.content) {
      if (p.kind == MessagePart::Kind::kText) {
        content.push_back({{"type", "text"}, {"data", p.text}});
      } else {
        content.push_back({{"type", "image"}, {"data", base64_encode(p.png)}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", std::move(content)}});
  }
  return json{{"model", cfg.model}, {"messages", std::move(messages)}}.dump();
}

std::string RemoteVlmBackend::parse_response_body(std::string_view body) {
  try {
    const json j = json::parse(body);
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string out;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") out += part.contains("data") ? part.at("data").get<std::string>()
                                                                          : part.at("text").get<std::string>();
    }
    return out;
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed VLM response: ") + e.what());
  }
}

std::string RemoteVlmBackend::call(const VlmRequest& req) const {
  const Endpoint ep = split_endpoint(cfg_.endpoint);
  const std::string body = build_request_body(cfg_, req);
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{slots_.get()};

  httplib::Client client(ep.origin);
  const auto t = static_cast<time_t>(cfg_.timeout.count());
  client.set_connection_timeout(t, 0);
  client.set_read_timeout(t, 0);
  client.set_write_timeout(t, 0);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  const auto res = client.Post(ep.path, headers, body, "application/json");
  if (!res) throw BackendError("VLM request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("VLM endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_response_body(res->body);
}

}  // namespace glyphforge::vlm
