#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <iostream>
#include <regex>

#include "primnav/planner/planner.hpp"

namespace primnav::planner {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ValidationError("malformed endpoint URL '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/v1/chat/completions"};
}

}  // namespace

PlannerResponse call_endpoint(const EndpointConfig& config, const PlannerRequest& request) {
  const auto url = split_url(config.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(config.timeout_seconds);
  client.set_read_timeout(config.timeout_seconds);
  const nlohmann::json body = {
      {"model", request.model.empty() ? config.model : request.model},
      {"temperature", request.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})}};
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);
  if (config.verbose)
    std::cerr << "POST " << config.url << " (Authorization: Bearer ***)\n" << body.dump(2) << "\n";

  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) throw NetworkError("request to " + url.origin + " failed: " + httplib::to_string(res.error()));
  if (config.verbose) std::cerr << "HTTP " << res->status << "\n" << res->body << "\n";
  if (res->status == 401 || res->status == 403)
    throw AuthError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
  if (res->status != 200) throw NetworkError("endpoint returned HTTP " + std::to_string(res->status));

  PlannerResponse out;
  try {
    const auto j = nlohmann::json::parse(res->body);
    out.raw = j.at("choices").at(0).at("message").at("content").get<std::string>();
    for (const char* key : {"id", "model", "usage"})
      if (j.contains(key)) out.metadata[key] = j[key];
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError(std::string("unexpected endpoint reply: ") + e.what());
  }
  out.program_text = extract_program(out.raw);
  return out;
}

}  // namespace primnav::planner
