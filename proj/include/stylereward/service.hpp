#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "stylereward/config.hpp"

namespace stylereward {

struct ServiceReply {
  int status = 200;
  nlohmann::json body;
};

// 12 significant digits, the precision every numeric response field carries.
double round12(double x);

// Stateless request handlers over models loaded once at construction. All
// handlers are const and safe to call concurrently.
class RewardService {
 public:
  struct LoadedStyle {
    std::optional<StyleModels> models;
    std::string error;  // why loading failed, when models is empty
    std::map<std::string, std::string> fingerprints;  // file role -> sha256
  };

  // Loads every configured style; a style that fails to load answers 503.
  explicit RewardService(const EngineConfig& config);
  // Pre-built models, for embedding the service in tests or other hosts.
  RewardService(std::map<Style, StyleModels> styles, ServiceConfig service,
                nlohmann::json config_echo = nlohmann::json::object());

  ServiceReply reward(const std::string& body) const;
  ServiceReply reward_batch(const std::string& body) const;
  ServiceReply judge(const std::string& body) const;
  ServiceReply health() const;

  // Scores one parsed request; throws Error.
  nlohmann::json score(const nlohmann::json& request) const;

  const ServiceConfig& settings() const noexcept { return service_; }
  bool loaded(Style style) const;

 private:
  const StyleModels& models_for(const nlohmann::json& request) const;

  std::map<Style, LoadedStyle> styles_;
  ServiceConfig service_;
  nlohmann::json config_echo_;
  std::map<std::string, std::string> shared_fingerprints_;
};

// Runs the HTTP front end on a background thread until stop() or destruction.
class ServiceHandle {
 public:
  // port 0 binds an ephemeral port; see port().
  ServiceHandle(std::shared_ptr<const RewardService> service,
                const std::string& host, int port);
  ~ServiceHandle();
  ServiceHandle(const ServiceHandle&) = delete;
  ServiceHandle& operator=(const ServiceHandle&) = delete;

  int port() const noexcept;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving requests until the process is interrupted.
void serve(std::shared_ptr<const RewardService> service,
           const std::string& host, int port);

}  // namespace stylereward
