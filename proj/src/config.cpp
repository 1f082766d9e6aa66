#include "stylereward/config.hpp"

#include <openssl/evp.h>

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

JudgeKind parse_judge_kind(const std::string& s) {
  if (s == "fre") return JudgeKind::Fre;
  if (s == "naive_bayes") return JudgeKind::NaiveBayes;
  throw Error(ErrorKind::InvalidConfig, "unknown judge kind '" + s + "'");
}

const char* to_string(JudgeKind k) {
  return k == JudgeKind::Fre ? "fre" : "naive_bayes";
}

}  // namespace

EngineConfig EngineConfig::from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
  if (!j.is_object()) {
    throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  }
  EngineConfig cfg;
  try {
    if (j.contains("embeddings")) {
      const auto& e = j.at("embeddings");
      cfg.embeddings = resolve(base_dir, e.value("path", ""));
      cfg.oov.policy = parse_oov_policy(e.value("oov_policy", "zero"));
      cfg.oov.seed = e.value("seed", cfg.oov.seed);
      cfg.oov.buckets = e.value("buckets", cfg.oov.buckets);
    }
    if (j.contains("reward")) {
      cfg.reward = RewardConfig::from_json(j.at("reward"), cfg.reward);
    }
    if (j.contains("styles")) {
      for (const auto& [name, s] : j.at("styles").items()) {
        const Style style = parse_style(name);
        StyleConfig sc;
        sc.scale = s.value("scale", std::string(to_string(style)));
        for (const auto& c : s.value("corpora", std::vector<std::string>{})) {
          sc.corpora.push_back(resolve(base_dir, c));
        }
        sc.pivots = resolve(base_dir, s.value("pivots", ""));
        sc.judge = style == Style::Readability ? JudgeKind::Fre
                                               : JudgeKind::NaiveBayes;
        if (s.contains("judge")) {
          const auto& jj = s.at("judge");
          sc.judge = parse_judge_kind(jj.value("kind", to_string(sc.judge)));
          sc.judge_path = resolve(base_dir, jj.value("path", ""));
        }
        if (sc.scale != "readability" && sc.scale != "sentiment") {
          sc.scale = resolve(base_dir, sc.scale).string();
        }
        cfg.styles[style] = std::move(sc);
      }
    }
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      cfg.generator.base_url = g.value("base_url", cfg.generator.base_url);
      cfg.generator.path = g.value("path", cfg.generator.path);
      cfg.generator.model = g.value("model", cfg.generator.model);
      cfg.generator.api_key_env =
          g.value("api_key_env", cfg.generator.api_key_env);
      cfg.generator.timeout_seconds =
          g.value("timeout_seconds", cfg.generator.timeout_seconds);
      cfg.generator_temperature =
          g.value("temperature", cfg.generator_temperature);
      if (g.contains("api_key")) {
        throw Error(ErrorKind::InvalidConfig,
                    "generator credentials are read from the environment "
                    "variable named by api_key_env, not from the config");
      }
    }
    if (j.contains("synthesis")) {
      const auto& s = j.at("synthesis");
      cfg.synthesis.quota = s.value("quota", cfg.synthesis.quota);
      cfg.synthesis.max_attempts =
          s.value("max_attempts", cfg.synthesis.max_attempts);
      cfg.synthesis.concurrency =
          s.value("concurrency", cfg.synthesis.concurrency);
      cfg.synthesis.seed = s.value("seed", cfg.synthesis.seed);
      cfg.synthesis.output = resolve(base_dir, s.value("output", ""));
    }
    if (j.contains("service")) {
      const auto& s = j.at("service");
      cfg.service.host = s.value("host", cfg.service.host);
      cfg.service.port = s.value("port", cfg.service.port);
      cfg.service.batch_limit = s.value("batch_limit", cfg.service.batch_limit);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig,
                std::string("malformed config: ") + e.what());
  }
  if (cfg.synthesis.max_attempts < 1 || cfg.synthesis.concurrency < 1) {
    throw Error(ErrorKind::InvalidConfig,
                "synthesis max_attempts and concurrency must be positive");
  }
  if (cfg.service.port < 0 || cfg.service.port > 65535 ||
      cfg.service.batch_limit < 1) {
    throw Error(ErrorKind::InvalidConfig, "bad service port or batch limit");
  }
  return cfg;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig,
                path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json EngineConfig::to_json() const {
  nlohmann::json styles_json = nlohmann::json::object();
  for (const auto& [style, sc] : styles) {
    nlohmann::json corpora_json = nlohmann::json::array();
    for (const auto& c : sc.corpora) corpora_json.push_back(c.string());
    nlohmann::json judge{{"kind", to_string(sc.judge)}};
    if (!sc.judge_path.empty()) judge["path"] = sc.judge_path.string();
    styles_json[to_string(style)] = {{"scale", sc.scale},
                                     {"corpora", std::move(corpora_json)},
                                     {"pivots", sc.pivots.string()},
                                     {"judge", std::move(judge)}};
  }
  return {{"embeddings",
           {{"path", embeddings.string()},
            {"oov_policy", to_string(oov.policy)},
            {"seed", oov.seed},
            {"buckets", oov.buckets}}},
          {"reward", reward.to_json()},
          {"styles", std::move(styles_json)},
          {"generator",
           {{"base_url", generator.base_url},
            {"path", generator.path},
            {"model", generator.model},
            {"api_key_env", generator.api_key_env},
            {"timeout_seconds", generator.timeout_seconds},
            {"temperature", generator_temperature}}},
          {"synthesis",
           {{"quota", synthesis.quota},
            {"max_attempts", synthesis.max_attempts},
            {"concurrency", synthesis.concurrency},
            {"seed", synthesis.seed},
            {"output", synthesis.output.string()}}},
          {"service",
           {{"host", service.host},
            {"port", service.port},
            {"batch_limit", service.batch_limit}}}};
}

const StyleConfig& EngineConfig::style(Style s) const {
  const auto it = styles.find(s);
  if (it == styles.end()) {
    throw Error(ErrorKind::UnknownStyle,
                std::string("style '") + to_string(s) + "' is not configured");
  }
  return it->second;
}

IntensityScale resolve_scale(const std::string& name) {
  if (name == "readability") return IntensityScale::readability();
  if (name == "sentiment") return IntensityScale::sentiment();
  return IntensityScale::load(name);
}

RewardConfig reward_config_for(const EngineConfig& cfg, Style style) {
  RewardConfig r = cfg.reward;
  r.mode = cfg.style(style).judge == JudgeKind::Fre ? JudgeMode::Regression
                                                    : JudgeMode::Classification;
  return r;
}

std::shared_ptr<const Judge> load_judge(const StyleConfig& sc,
                                        const IntensityScale& scale) {
  if (sc.judge == JudgeKind::Fre) {
    return std::make_shared<RegressionJudge>(scale);
  }
  if (sc.judge_path.empty()) {
    throw Error(ErrorKind::InvalidConfig, "naive_bayes judge needs a path");
  }
  auto clf = std::make_shared<const NaiveBayesClassifier>(
      NaiveBayesClassifier::load(sc.judge_path));
  if (clf->levels() != scale.size()) {
    throw Error(ErrorKind::InvalidConfig,
                "classifier has " + std::to_string(clf->levels()) +
                    " levels but the scale has " +
                    std::to_string(scale.size()));
  }
  return std::make_shared<ClassifierJudge>(std::move(clf));
}

StyleModels load_style(const EngineConfig& cfg, Style style,
                       std::shared_ptr<const EmbeddingTable> embeddings) {
  const StyleConfig& sc = cfg.style(style);
  StyleModels m;
  m.style = style;
  m.scale = resolve_scale(sc.scale);
  if (sc.pivots.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                std::string("no pivot model configured for ") +
                    to_string(style));
  }
  auto pivots =
      std::make_shared<const PivotModel>(PivotModel::load(sc.pivots));
  if (pivots->levels() != m.scale.size()) {
    throw Error(ErrorKind::InvalidConfig,
                "pivot model level count does not match the scale");
  }
  m.pivots = std::move(pivots);
  m.judge = load_judge(sc, m.scale);
  m.embeddings = std::move(embeddings);
  m.reward = reward_config_for(cfg, style);
  return m;
}

std::vector<Corpus> load_corpora(const StyleConfig& sc) {
  std::vector<Corpus> out;
  for (std::size_t i = 0; i < sc.corpora.size(); ++i) {
    out.push_back(load_corpus(sc.corpora[i], static_cast<int>(i) + 1));
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_file(path));
}

}  // namespace stylereward
