#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "stylereward/datagen.hpp"
#include "stylereward/error.hpp"

namespace stylereward {

ChatCompletionsGenerator::ChatCompletionsGenerator(Options options)
    : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw Error(ErrorKind::InvalidConfig, "generator base_url is empty");
  }
  if (!options_.api_key_env.empty()) {
    if (const char* key = std::getenv(options_.api_key_env.c_str())) {
      api_key_ = key;
    }
  }
}

std::string ChatCompletionsGenerator::generate(const GeneratorRequest& request) {
  if (request.prompt.empty()) {
    throw Error(ErrorKind::InvalidConfig, "empty generator prompt");
  }
  nlohmann::json body{
      {"model", options_.model},
      {"temperature", request.temperature},
      {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};

  // One client per call keeps concurrent synthesis tasks independent.
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }
  auto res = client.Post(options_.path, headers, body.dump(),
                         "application/json");
  if (!res) {
    throw Error(ErrorKind::GeneratorUnavailable,
                "request to " + options_.base_url + " failed: " +
                    httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorKind::GeneratorUnavailable,
                "generator returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::GeneratorUnavailable,
                std::string("unexpected generator response: ") + e.what());
  }
}

}  // namespace stylereward
