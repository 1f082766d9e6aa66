// stylereward: command-line front end for the reward engine.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stylereward/config.hpp"
#include "stylereward/corpus_model.hpp"
#include "stylereward/datagen.hpp"
#include "stylereward/error.hpp"
#include "stylereward/metrics.hpp"
#include "stylereward/search.hpp"
#include "stylereward/service.hpp"

namespace sr = stylereward;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string style = "readability";
  std::string format = "table";

  std::vector<std::string> corpora;
  std::string pivots;
  std::string embeddings;
  std::string judge_model;
  std::string output;

  std::optional<double> sigma;
  std::optional<double> temperature;
  std::string weights;

  std::string text;
  std::string input;
  std::string source;
  std::string generated;
  int target = 0;
  std::string predictions;
  std::string confusion;
  int budget = 10;
  std::size_t proposals = 1;

  std::optional<std::size_t> quota;
  std::optional<int> max_attempts;
  std::optional<std::size_t> concurrency;
  std::optional<std::uint64_t> seed;

  std::optional<std::string> host;
  std::optional<int> port;
};

std::vector<double> parse_weights(const std::string& s) {
  std::vector<double> w;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    w.push_back(std::stod(part, &used));
    if (used != part.size()) throw std::invalid_argument(part);
  }
  return w;
}

sr::EngineConfig effective_config(const Options& o, sr::Style style) {
  sr::EngineConfig cfg =
      o.config.empty() ? sr::EngineConfig{} : sr::EngineConfig::load(o.config);
  if (!cfg.styles.contains(style)) {
    sr::StyleConfig fresh;
    fresh.scale = sr::to_string(style);
    if (style == sr::Style::Sentiment) fresh.judge = sr::JudgeKind::NaiveBayes;
    cfg.styles[style] = fresh;
  }
  auto& sc = cfg.styles[style];
  if (!o.corpora.empty()) {
    sc.corpora.assign(o.corpora.begin(), o.corpora.end());
  }
  if (!o.pivots.empty()) sc.pivots = o.pivots;
  if (!o.judge_model.empty()) {
    sc.judge = sr::JudgeKind::NaiveBayes;
    sc.judge_path = o.judge_model;
  }
  if (!o.embeddings.empty()) cfg.embeddings = o.embeddings;
  if (o.sigma) cfg.reward.sigma = *o.sigma;
  if (o.temperature) cfg.reward.temperature = *o.temperature;
  if (!o.weights.empty()) {
    const auto w = parse_weights(o.weights);
    cfg.reward.lambda_sent = w[0];
    cfg.reward.lambda_lex = w[1];
    cfg.reward.lambda_cons = w[2];
  }
  cfg.reward.validate();
  if (o.quota) cfg.synthesis.quota = *o.quota;
  if (o.max_attempts) cfg.synthesis.max_attempts = *o.max_attempts;
  if (o.concurrency) cfg.synthesis.concurrency = *o.concurrency;
  if (o.seed) cfg.synthesis.seed = *o.seed;
  if (o.host) cfg.service.host = *o.host;
  if (o.port) cfg.service.port = *o.port;
  return cfg;
}

sr::StyleModels models(const sr::EngineConfig& cfg, sr::Style style,
                       bool need_embeddings) {
  std::shared_ptr<const sr::EmbeddingTable> emb;
  if (!cfg.embeddings.empty()) {
    emb = std::make_shared<const sr::EmbeddingTable>(
        sr::EmbeddingTable::load(cfg.embeddings, cfg.oov));
  } else if (need_embeddings) {
    throw sr::Error(sr::ErrorKind::InvalidConfig,
                    "an embedding table is required (--embeddings or config)");
  }
  return sr::load_style(cfg, style, std::move(emb));
}

std::vector<sr::Corpus> corpora_for(const sr::EngineConfig& cfg,
                                    sr::Style style) {
  const auto& sc = cfg.style(style);
  if (sc.corpora.empty()) {
    throw sr::Error(sr::ErrorKind::InvalidConfig,
                    "no corpora given (--corpus, one per level, or config)");
  }
  return sr::load_corpora(sc);
}

void emit(const std::string& s) {
  std::fwrite(s.data(), 1, s.size(), stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  std::istream* in = &std::cin;
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw sr::Error(sr::ErrorKind::Io, "cannot open " + path);
    in = &file;
  }
  std::string line;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

int cmd_fit_pivots(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto scale = sr::resolve_scale(cfg.style(style).scale);
  const auto corpora = corpora_for(cfg, style);
  const auto model = sr::PivotModel::fit(corpora, scale);
  const std::filesystem::path out =
      o.output.empty() ? cfg.style(style).pivots : std::filesystem::path(o.output);
  if (out.empty()) {
    throw sr::Error(sr::ErrorKind::InvalidConfig, "no --output path");
  }
  model.save(out);
  json summary{{"output", out.string()},
               {"levels", model.levels()},
               {"documents", model.document_count()},
               {"vocabulary", model.dimension()}};
  if (o.format == "table") {
    emit("wrote " + out.string() + ": " + std::to_string(model.levels()) +
         " levels, " + std::to_string(model.document_count()) +
         " documents, " + std::to_string(model.dimension()) + " terms\n");
    for (int l = 1; l <= model.levels(); ++l) {
      const auto& sv = model.style_vocab(l);
      std::string line = scale.level(l).label + ":";
      for (std::size_t i = 0; i < sv.size() && i < 10; ++i) line += " " + sv[i];
      emit(line + "\n");
    }
  } else {
    emit(summary.dump() + "\n");
  }
  return 0;
}

int cmd_train_judge(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto corpora = corpora_for(cfg, style);
  const auto clf = sr::train_classifier(corpora);
  const std::filesystem::path out =
      o.output.empty() ? cfg.style(style).judge_path : std::filesystem::path(o.output);
  if (out.empty()) {
    throw sr::Error(sr::ErrorKind::InvalidConfig, "no --output path");
  }
  clf.save(out);
  if (o.format == "table") {
    emit("wrote " + out.string() + ": " + std::to_string(clf.levels()) +
         " levels, " + std::to_string(clf.vocabulary().size()) + " terms\n");
  } else {
    emit(json{{"output", out.string()},
              {"levels", clf.levels()},
              {"vocabulary", clf.vocabulary().size()}}
             .dump() +
         "\n");
  }
  return 0;
}

int cmd_score(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto& sc = cfg.style(style);
  const auto scale = sr::resolve_scale(sc.scale);
  const auto judge = sr::load_judge(sc, scale);
  std::vector<std::string> texts;
  if (!o.text.empty()) texts.push_back(o.text);
  if (!o.input.empty()) {
    auto more = read_lines(o.input);
    texts.insert(texts.end(), more.begin(), more.end());
  }
  if (texts.empty()) {
    throw sr::Error(sr::ErrorKind::EmptyDocument, "nothing to score");
  }
  for (const auto& t : texts) {
    const auto doc = sr::tokenize(t);
    const auto v = judge->judge(doc);
    if (o.format == "table") {
      std::string line;
      if (v.mode == sr::JudgeMode::Regression) {
        line = scale.metric() + " " + fmt("%.2f", v.score) + "  ";
      }
      line += std::to_string(v.predicted_level) + " " +
              scale.level(v.predicted_level).label;
      if (v.mode == sr::JudgeMode::Classification) {
        line += "  p=" + fmt("%.4f", v.distribution[static_cast<std::size_t>(
                                         v.predicted_level - 1)]);
      }
      emit(line + "\n");
    } else {
      auto j = v.to_json();
      j["label"] = scale.level(v.predicted_level).label;
      emit(j.dump() + "\n");
    }
  }
  return 0;
}

int cmd_reward(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto m = models(cfg, style, true);
  const auto src = sr::tokenize(o.source);
  const auto gen = sr::tokenize(o.generated);
  const auto r = sr::total_reward(src, gen, o.target, m.context(), m.reward);
  if (o.format == "table") {
    emit("r_sent " + fmt("%.6f", r.sentence) + "\n");
    emit("r_lex  " + fmt("%.6f", r.lexicon) + "\n");
    emit("r_cons " + fmt("%.6f", r.consistency) + "\n");
    emit("total  " + fmt("%.6f", r.total) + "\n");
    emit("h_re   " + fmt("%.6f", sr::h_re(r.sentence, r.lexicon)) + "\n");
  } else {
    auto j = r.to_json();
    j["h_re"] = sr::h_re(r.sentence, r.lexicon);
    emit(j.dump() + "\n");
  }
  return 0;
}

int cmd_synthesize(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto& sc = cfg.style(style);
  const auto scale = sr::resolve_scale(sc.scale);
  const auto judge = sr::load_judge(sc, scale);
  const auto corpora = corpora_for(cfg, style);
  sr::ChatCompletionsGenerator generator(cfg.generator);

  sr::SynthesisOptions so;
  so.style = style;
  so.dataset_path = o.output.empty() ? cfg.synthesis.output : std::filesystem::path(o.output);
  if (so.dataset_path.empty()) {
    throw sr::Error(sr::ErrorKind::InvalidConfig, "no --output dataset path");
  }
  so.quota_per_level = cfg.synthesis.quota;
  so.seed = cfg.synthesis.seed;
  so.max_attempts = cfg.synthesis.max_attempts;
  so.concurrency = cfg.synthesis.concurrency;
  so.temperature = cfg.generator_temperature;
  const auto stats =
      sr::synthesize_dataset(corpora, scale, generator, *judge, so);
  if (o.format == "table") {
    emit("tasks " + std::to_string(stats.tasks_done) + "/" +
         std::to_string(stats.tasks_total) + ", accepted " +
         std::to_string(stats.total_accepted()) + ", discarded " +
         std::to_string(stats.total_discarded()) + "\n");
  } else {
    emit(stats.to_json().dump() + "\n");
  }
  return 0;
}

int cmd_evaluate(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto m = models(cfg, style, false);
  const auto pairs = sr::read_predictions(o.predictions);
  const auto report = sr::evaluate(pairs, m.context(), m.reward);
  if (!o.confusion.empty()) {
    sr::write_file_atomic(o.confusion, report.confusion_csv());
  }
  if (o.format == "table") {
    emit(report.format_table(m.scale));
  } else if (o.format == "json") {
    emit(report.to_json().dump(2) + "\n");
  } else {
    const auto j = report.to_json();
    for (const auto& row : j.at("per_level")) emit(row.dump() + "\n");
    json avg = j.at("average");
    avg["level"] = "average";
    emit(avg.dump() + "\n");
  }
  return 0;
}

int cmd_transfer(const Options& o, sr::Style style) {
  const auto cfg = effective_config(o, style);
  const auto m = models(cfg, style, true);
  sr::HillClimbOptions hc;
  hc.budget = o.budget;
  hc.proposals_per_position = o.proposals;
  const auto result =
      sr::hill_climb(sr::tokenize(o.source), o.target, m.context(), m.reward, hc);
  if (o.format == "table") {
    emit(result.text + "\n");
    std::cerr << "total " << fmt("%.6f", result.trace.initial.total) << " -> "
              << fmt("%.6f", result.trace.final_reward.total) << ", level "
              << result.trace.initial_level << " -> "
              << result.trace.final_level << ", "
              << result.trace.steps.size() << " edits\n";
    for (const auto& s : result.trace.steps) {
      std::cerr << "  " << s.describe() << "  total "
                << fmt("%.6f", s.reward.total) << "\n";
    }
  } else if (o.format == "json") {
    emit(json{{"text", result.text}, {"trace", result.trace.to_json()}}
             .dump(2) +
         "\n");
  } else {
    const auto trace = result.trace.to_json();
    for (const auto& s : trace.at("steps")) {
      json rec = s;
      rec["type"] = "step";
      emit(rec.dump() + "\n");
    }
    emit(json{{"type", "result"},
              {"text", result.text},
              {"initial", trace.at("initial")},
              {"final", trace.at("final")},
              {"initial_level", result.trace.initial_level},
              {"final_level", result.trace.final_level}}
             .dump() +
         "\n");
  }
  return 0;
}

int cmd_serve(const Options& o) {
  if (o.config.empty()) {
    throw sr::Error(sr::ErrorKind::InvalidConfig, "serve needs --config");
  }
  sr::EngineConfig cfg = sr::EngineConfig::load(o.config);
  if (o.host) cfg.service.host = *o.host;
  if (o.port) cfg.service.port = *o.port;
  if (o.sigma) cfg.reward.sigma = *o.sigma;
  if (o.temperature) cfg.reward.temperature = *o.temperature;
  if (!o.weights.empty()) {
    const auto w = parse_weights(o.weights);
    cfg.reward.lambda_sent = w[0];
    cfg.reward.lambda_lex = w[1];
    cfg.reward.lambda_cons = w[2];
  }
  cfg.reward.validate();
  auto service = std::make_shared<const sr::RewardService>(cfg);
  const auto health = service->health();
  std::cerr << "listening on " << cfg.service.host << ":" << cfg.service.port
            << " (" << health.body.at("status").get<std::string>() << ")\n";
  sr::serve(service, cfg.service.host, cfg.service.port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style-intensity rewards, metrics and data synthesis"};
  app.require_subcommand(1);
  Options o;

  const auto weights_check = CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const auto w = parse_weights(s);
          if (w.size() != 3) return "expected three comma-separated numbers";
        } catch (const std::exception&) {
          return "expected three comma-separated numbers";
        }
        return {};
      },
      "l1,l2,l3");
  const auto formats = CLI::IsMember({"table", "json", "records"});

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Engine config (JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("--style", o.style, "readability or sentiment")
        ->check(CLI::IsMember({"readability", "sentiment"}));
    sub->add_option("--format", o.format, "table, json or records")
        ->check(formats);
  };
  auto model_paths = [&](CLI::App* sub) {
    sub->add_option("--pivots", o.pivots, "Pivot model file");
    sub->add_option("--embeddings", o.embeddings, "Embedding table");
    sub->add_option("--judge-model", o.judge_model, "Naive Bayes model file");
  };
  auto reward_flags = [&](CLI::App* sub) {
    sub->add_option("--sigma", o.sigma, "Gaussian width of the regression reward")
        ->check(CLI::PositiveNumber);
    sub->add_option("--temperature", o.temperature,
                    "Softmax temperature of the lexicon reward")
        ->check(CLI::PositiveNumber);
    sub->add_option("--weights", o.weights, "Reward weights l1,l2,l3")
        ->check(weights_check);
  };

  auto* fit = app.add_subcommand("fit-pivots", "Fit TF-IDF pivot vectors");
  common(fit);
  fit->add_option("--corpus", o.corpora, "One corpus file per level, in order");
  fit->add_option("--output,-o", o.output, "Pivot model output");

  auto* train = app.add_subcommand("train-judge", "Train the Naive Bayes judge");
  common(train);
  train->add_option("--corpus", o.corpora, "One corpus file per level, in order");
  train->add_option("--output,-o", o.output, "Model output");

  auto* score = app.add_subcommand("score", "Judge text intensity");
  common(score);
  score->add_option("--judge-model", o.judge_model, "Naive Bayes model file");
  score->add_option("--text", o.text, "Text to score");
  score->add_option("--input", o.input, "File with one text per line ('-' for stdin)");

  auto* reward = app.add_subcommand("reward", "Compute the total reward");
  common(reward);
  model_paths(reward);
  reward_flags(reward);
  reward->add_option("--source", o.source, "Source text")->required();
  reward->add_option("--generated", o.generated, "Generated text")->required();
  reward->add_option("--target", o.target, "Target level")->required();

  auto* synth = app.add_subcommand("synthesize", "Build a pseudo-parallel dataset");
  common(synth);
  synth->add_option("--corpus", o.corpora, "One corpus file per level, in order");
  synth->add_option("--judge-model", o.judge_model, "Naive Bayes model file");
  synth->add_option("--output,-o", o.output, "Dataset (JSONL) output");
  synth->add_option("--quota", o.quota, "Sources sampled per level (0 = all)");
  synth->add_option("--max-attempts", o.max_attempts, "Generations per pair")
      ->check(CLI::PositiveNumber);
  synth->add_option("--concurrency", o.concurrency, "Tasks in flight")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Sampling seed");

  auto* eval = app.add_subcommand("evaluate", "Report metrics for predictions");
  common(eval);
  model_paths(eval);
  reward_flags(eval);
  eval->add_option("--predictions", o.predictions, "JSONL predictions")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--confusion", o.confusion, "Write the confusion matrix CSV");

  auto* transfer = app.add_subcommand("transfer", "Reward-guided rewriting");
  common(transfer);
  model_paths(transfer);
  reward_flags(transfer);
  transfer->add_option("--source", o.source, "Source text")->required();
  transfer->add_option("--target", o.target, "Target level")->required();
  transfer->add_option("--budget", o.budget, "Max accepted edits")
      ->check(CLI::PositiveNumber);
  transfer->add_option("--proposals", o.proposals,
                       "Substitutes tried per position")
      ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP reward service");
  serve->add_option("--config", o.config, "Engine config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Bind port")->check(CLI::Range(0, 65535));
  reward_flags(serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    const sr::Style style = sr::parse_style(o.style);
    if (*fit) return cmd_fit_pivots(o, style);
    if (*train) return cmd_train_judge(o, style);
    if (*score) return cmd_score(o, style);
    if (*reward) return cmd_reward(o, style);
    if (*synth) return cmd_synthesize(o, style);
    if (*eval) return cmd_evaluate(o, style);
    if (*transfer) return cmd_transfer(o, style);
    if (*serve) return cmd_serve(o);
  } catch (const sr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
