#include "stylereward/service.hpp"

#include <cstdio>
#include <string>
#include <thread>

#include "httplib.h"

#include "stylereward/error.hpp"
#include "stylereward/metrics.hpp"

namespace stylereward {
namespace {

struct RequestError {
  int status;
  std::string kind;
  std::string message;
};

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownLevel:
    case ErrorKind::UnknownStyle:
      return 422;
    case ErrorKind::EmptyDocument:
    case ErrorKind::EmptySource:
    case ErrorKind::EmptyGenerated:
      return 400;
    default:
      return 500;
  }
}

nlohmann::json error_body(const RequestError& e) {
  return {{"error",
           {{"status", e.status}, {"kind", e.kind}, {"message", e.message}}}};
}

RequestError to_request_error(const Error& e) {
  return {status_for(e.kind()), to_string(e.kind()), e.what()};
}

nlohmann::json parse_body(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) {
      throw RequestError{400, "BadRequest", "request body must be an object"};
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw RequestError{400, "BadRequest",
                       std::string("request is not valid JSON: ") + e.what()};
  }
}

const nlohmann::json& field(const nlohmann::json& j, const char* name,
                            bool (nlohmann::json::*check)() const noexcept,
                            const char* type) {
  const auto it = j.find(name);
  if (it == j.end() || !((*it).*check)()) {
    throw RequestError{400, "BadRequest",
                       std::string("field '") + name + "' must be a " + type};
  }
  return *it;
}

nlohmann::json verdict_summary(const JudgeVerdict& v,
                               const IntensityScale& scale) {
  nlohmann::json j{{"mode", to_string(v.mode)},
                   {"predicted_level", v.predicted_level}};
  if (scale.contains_level(v.predicted_level)) {
    j["label"] = scale.level(v.predicted_level).label;
  }
  if (v.mode == JudgeMode::Regression) {
    j["score"] = round12(v.score);
  } else {
    nlohmann::json dist = nlohmann::json::array();
    for (double p : v.distribution) dist.push_back(round12(p));
    j["distribution"] = std::move(dist);
  }
  return j;
}

ServiceReply guarded(const std::function<nlohmann::json()>& fn) {
  try {
    return {200, fn()};
  } catch (const RequestError& e) {
    return {e.status, error_body(e)};
  } catch (const Error& e) {
    const auto re = to_request_error(e);
    return {re.status, error_body(re)};
  } catch (const std::exception& e) {
    return {500, error_body({500, "Internal", e.what()})};
  }
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

RewardService::RewardService(const EngineConfig& config)
    : service_(config.service), config_echo_(config.to_json()) {
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::string embeddings_error;
  try {
    if (config.embeddings.empty()) {
      throw Error(ErrorKind::InvalidConfig, "no embedding table configured");
    }
    embeddings = std::make_shared<const EmbeddingTable>(
        EmbeddingTable::load(config.embeddings, config.oov));
    shared_fingerprints_["embeddings"] = sha256_file(config.embeddings);
  } catch (const std::exception& e) {
    embeddings_error = e.what();
  }
  for (const auto& [style, sc] : config.styles) {
    LoadedStyle ls;
    try {
      if (!embeddings) {
        throw Error(ErrorKind::InvalidConfig, embeddings_error);
      }
      ls.models = load_style(config, style, embeddings);
      ls.fingerprints["pivots"] = sha256_file(sc.pivots);
      if (!sc.judge_path.empty()) {
        ls.fingerprints["judge"] = sha256_file(sc.judge_path);
      }
    } catch (const std::exception& e) {
      ls.models.reset();
      ls.error = e.what();
    }
    styles_.emplace(style, std::move(ls));
  }
}

RewardService::RewardService(std::map<Style, StyleModels> styles,
                             ServiceConfig service, nlohmann::json config_echo)
    : service_(std::move(service)), config_echo_(std::move(config_echo)) {
  for (auto& [style, m] : styles) {
    LoadedStyle ls;
    ls.models = std::move(m);
    styles_.emplace(style, std::move(ls));
  }
}

bool RewardService::loaded(Style style) const {
  const auto it = styles_.find(style);
  return it != styles_.end() && it->second.models.has_value();
}

const StyleModels& RewardService::models_for(
    const nlohmann::json& request) const {
  const auto& name =
      field(request, "style", &nlohmann::json::is_string, "string");
  const Style style = parse_style(name.get<std::string>());
  const auto it = styles_.find(style);
  if (it == styles_.end()) {
    throw RequestError{503, "NotLoaded",
                       std::string("style '") + to_string(style) +
                           "' is not configured"};
  }
  if (!it->second.models) {
    throw RequestError{503, "NotLoaded",
                       std::string("style '") + to_string(style) +
                           "' failed to load: " + it->second.error};
  }
  return *it->second.models;
}

nlohmann::json RewardService::score(const nlohmann::json& request) const {
  if (!request.is_object()) {
    throw RequestError{400, "BadRequest", "request must be an object"};
  }
  const auto& source =
      field(request, "source", &nlohmann::json::is_string, "string");
  const auto& generated =
      field(request, "generated", &nlohmann::json::is_string, "string");
  const auto& target = field(request, "target_level",
                             &nlohmann::json::is_number_integer, "integer");
  const StyleModels& m = models_for(request);
  const int level = target.get<int>();
  if (!m.scale.contains_level(level)) {
    throw Error(ErrorKind::UnknownLevel,
                "target_level " + std::to_string(level) + " is not in 1.." +
                    std::to_string(m.scale.size()));
  }
  const Document src = tokenize(source.get<std::string>());
  const Document gen = tokenize(generated.get<std::string>());
  if (src.empty()) throw Error(ErrorKind::EmptySource, "source is empty");
  if (gen.empty()) throw Error(ErrorKind::EmptyGenerated, "generated is empty");

  const auto ctx = m.context();
  const JudgeVerdict verdict = m.judge->judge(gen);
  const RewardBreakdown r = total_reward(src, gen, verdict, level, ctx, m.reward);
  return {{"r_sent", round12(r.sentence)},
          {"r_lex", round12(r.lexicon)},
          {"r_cons", round12(r.consistency)},
          {"total", round12(r.total)},
          {"h_re", round12(h_re(r.sentence, r.lexicon))},
          {"judge", verdict_summary(verdict, m.scale)}};
}

ServiceReply RewardService::reward(const std::string& body) const {
  return guarded([&] { return score(parse_body(body)); });
}

ServiceReply RewardService::reward_batch(const std::string& body) const {
  return guarded([&] {
    const auto j = parse_body(body);
    const auto& items =
        field(j, "requests", &nlohmann::json::is_array, "array");
    if (items.size() > service_.batch_limit) {
      throw RequestError{413, "BatchTooLarge",
                         "batch of " + std::to_string(items.size()) +
                             " exceeds the limit of " +
                             std::to_string(service_.batch_limit)};
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& item : items) {
      try {
        out.push_back(score(item));
      } catch (const RequestError& e) {
        out.push_back(error_body(e));
      } catch (const Error& e) {
        out.push_back(error_body(to_request_error(e)));
      }
    }
    return nlohmann::json{{"responses", std::move(out)}};
  });
}

ServiceReply RewardService::judge(const std::string& body) const {
  return guarded([&] {
    const auto j = parse_body(body);
    const auto& text = field(j, "text", &nlohmann::json::is_string, "string");
    const StyleModels& m = models_for(j);
    const Document doc = tokenize(text.get<std::string>());
    if (doc.empty()) throw Error(ErrorKind::EmptyDocument, "text is empty");
    return verdict_summary(m.judge->judge(doc), m.scale);
  });
}

ServiceReply RewardService::health() const {
  nlohmann::json styles = nlohmann::json::object();
  bool any = false;
  for (const auto& [style, ls] : styles_) {
    nlohmann::json s{{"loaded", ls.models.has_value()},
                     {"fingerprints", ls.fingerprints}};
    if (ls.models) {
      any = true;
      s["levels"] = ls.models->scale.size();
      s["scale"] = ls.models->scale.name();
      s["reward"] = ls.models->reward.to_json();
    } else {
      s["error"] = ls.error;
    }
    styles[to_string(style)] = std::move(s);
  }
  return {any ? 200 : 503,
          {{"status", any ? "ok" : "unavailable"},
           {"styles", std::move(styles)},
           {"fingerprints", shared_fingerprints_},
           {"config", config_echo_}}};
}

namespace {

void install_routes(httplib::Server& server,
                    const std::shared_ptr<const RewardService>& service) {
  auto reply = [](httplib::Response& res, const ServiceReply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/v1/reward", [service, reply](const httplib::Request& req,
                                             httplib::Response& res) {
    reply(res, service->reward(req.body));
  });
  server.Post("/v1/reward/batch", [service, reply](const httplib::Request& req,
                                                   httplib::Response& res) {
    reply(res, service->reward_batch(req.body));
  });
  server.Post("/v1/judge", [service, reply](const httplib::Request& req,
                                            httplib::Response& res) {
    reply(res, service->judge(req.body));
  });
  server.Get("/v1/health", [service, reply](const httplib::Request&,
                                            httplib::Response& res) {
    reply(res, service->health());
  });
}

}  // namespace

struct ServiceHandle::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

ServiceHandle::ServiceHandle(std::shared_ptr<const RewardService> service,
                             const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  install_routes(impl_->server, service);
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(ErrorKind::Io, "cannot bind " + host + ":" +
                                   std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

ServiceHandle::~ServiceHandle() { stop(); }

int ServiceHandle::port() const noexcept { return impl_->port; }

void ServiceHandle::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void serve(std::shared_ptr<const RewardService> service,
           const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  if (!server.listen(host, port)) {
    throw Error(ErrorKind::Io,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace stylereward
