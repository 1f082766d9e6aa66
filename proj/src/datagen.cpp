#include "stylereward/datagen.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <future>
#include <random>

#include "stylereward/error.hpp"

namespace stylereward {
namespace {

constexpr int kCursorVersion = 1;

struct Task {
  const Document* source = nullptr;
  int source_level = 0;
  int target_level = 0;
};

// Unbiased draw in [0, n) from a raw 64-bit engine. Kept explicit so the
// sample does not depend on the standard library's distribution code.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t quota,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const std::size_t take = quota == 0 ? n : std::min(quota, n);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + bounded(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string task_fingerprint(const std::vector<Task>& tasks) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& t : tasks) {
    h = fnv1a(h, t.source->raw);
    h = fnv1a(h, std::to_string(t.source_level) + ">" +
                     std::to_string(t.target_level) + ";");
  }
  return hex64(h);
}

void check_level(const IntensityScale& scale, int level, const char* what) {
  if (!scale.contains_level(level)) {
    throw Error(ErrorKind::UnknownLevel, std::string(what) + " level " +
                                             std::to_string(level) +
                                             " is not on scale '" +
                                             scale.name() + "'");
  }
}

std::uintmax_t size_or_zero(const std::filesystem::path& p) {
  std::error_code ec;
  const auto n = std::filesystem::file_size(p, ec);
  return ec ? 0 : n;
}

void truncate_to(const std::filesystem::path& p, std::uintmax_t bytes) {
  if (!std::filesystem::exists(p)) {
    if (bytes != 0) {
      throw Error(ErrorKind::Io, p.string() + " vanished since the last run");
    }
    std::ofstream create(p, std::ios::binary);
    if (!create) throw Error(ErrorKind::Io, "cannot create " + p.string());
    return;
  }
  if (size_or_zero(p) < bytes) {
    throw Error(ErrorKind::Io, p.string() + " is shorter than the cursor says");
  }
  std::filesystem::resize_file(p, bytes);
}

void append_line(const std::filesystem::path& p, const std::string& line) {
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::Io, "cannot append to " + p.string());
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "short write to " + p.string());
}

std::string discard_record(const Discarded& d) {
  nlohmann::json j{{"source", d.source},
                   {"source_level", d.source_level},
                   {"target_level", d.target_level},
                   {"attempts", d.attempts},
                   {"transcripts", d.transcripts}};
  return j.dump();
}

}  // namespace

Style parse_style(std::string_view name) {
  if (name == "readability") return Style::Readability;
  if (name == "sentiment") return Style::Sentiment;
  throw Error(ErrorKind::UnknownStyle,
              "unknown style '" + std::string(name) + "'");
}

const char* to_string(Style style) {
  return style == Style::Readability ? "readability" : "sentiment";
}

std::string render_prompt(std::string_view source, int source_level,
                          int target_level, const IntensityScale& scale,
                          Style style) {
  check_level(scale, target_level, "target");
  const auto& target = scale.level(target_level);
  std::string p;
  if (style == Style::Readability) {
    if (!target.band) {
      throw Error(ErrorKind::InvalidConfig,
                  "readability prompts need a score band for the target");
    }
    p += "Rewrite the following text to match the " + target.prompt_name +
         " readability level\n";
    p += "(Flesch Reading Ease score " + target.band->render(scale.metric()) +
         ").\n";
    p += "Adjust vocabulary, sentence length, and complexity to strongly "
         "reflect the target readability level.\n";
    p += "For Elementary, use very simple words and short sentences.\n";
    p += "For Middle School, use moderately simple words and slightly longer "
         "sentences.\n";
    p += "For High School, use more complex words and varied sentence "
         "structures.\n";
    p += "For College, use advanced vocabulary and complex sentence "
         "structures.\n";
    p += "Keep the core meaning and content consistent, but adapt the style "
         "to be natural and concise.\n";
  } else {
    check_level(scale, source_level, "source");
    if (source_level == target_level) {
      throw Error(ErrorKind::InvalidConfig,
                  "sentiment prompts need different source and target levels");
    }
    p += "Rewrite the following " + scale.level(source_level).prompt_name +
         " Yelp review into an " + target.prompt_name + " review.\n";
    p += "Transform the tone and wording to reflect the target rating’s "
         "sentiment strongly.\n";
    p += "For 5 Stars, use highly positive words like \"amazing\" or "
         "\"outstanding\";\n";
    p += "for 1 Star, use strongly negative words like \"terrible\" or "
         "\"awful\".\n";
    p += "Keep core aspects (food, service, atmosphere) consistent, but "
         "adjust their descriptions to match the target rating.\n";
    p += "Ensure the output is natural, realistic, concise (similar length to "
         "the input), and avoids vague terms like \"okay\" or \"fine\".\n";
  }
  p += "Input: ";
  p += source;
  p += "\nOutput:";
  return p;
}

SynthesisOutcome synthesize_pair(std::string_view source, int source_level,
                                 int target_level, const IntensityScale& scale,
                                 Style style, Generator& generator,
                                 const Judge& judge, int max_attempts,
                                 double temperature) {
  check_level(scale, source_level, "source");
  check_level(scale, target_level, "target");
  if (source_level == target_level) {
    throw Error(ErrorKind::InvalidConfig,
                "target level must differ from the source level");
  }
  if (max_attempts < 1) {
    throw Error(ErrorKind::InvalidConfig, "max_attempts must be at least 1");
  }
  GeneratorRequest req;
  req.prompt = render_prompt(source, source_level, target_level, scale, style);
  req.temperature = temperature;

  Discarded failed{std::string(source), source_level, target_level, 0, {}};
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    req.attempt = attempt;
    req.max_attempts_remaining = max_attempts - attempt + 1;
    std::string text = generator.generate(req);
    const Document doc = tokenize(text);
    if (!doc.empty()) {
      JudgeVerdict verdict;
      try {
        verdict = judge.judge(doc);
      } catch (const Error& e) {
        throw Error(ErrorKind::JudgeError, e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorKind::JudgeError, e.what());
      }
      if (verdict.predicted_level == target_level) {
        return ParallelTriple{std::string(source), source_level, target_level,
                              std::move(text), attempt, std::move(verdict)};
      }
    }
    failed.attempts = attempt;
    failed.transcripts.push_back(std::move(text));
  }
  return failed;
}

std::size_t SynthesisStats::total_accepted() const {
  std::size_t n = 0;
  for (const auto& row : accepted) {
    for (auto c : row) n += c;
  }
  return n;
}

std::size_t SynthesisStats::total_discarded() const {
  std::size_t n = 0;
  for (const auto& row : discarded) {
    for (auto c : row) n += c;
  }
  return n;
}

nlohmann::json SynthesisStats::to_json() const {
  return {{"levels", levels},
          {"max_attempts", max_attempts},
          {"tasks_total", tasks_total},
          {"tasks_done", tasks_done},
          {"resumed_from", resumed_from},
          {"accepted", accepted},
          {"discarded", discarded},
          {"attempts_histogram", attempts_histogram}};
}

SynthesisStats SynthesisStats::from_json(const nlohmann::json& j) {
  SynthesisStats s;
  s.levels = j.at("levels").get<int>();
  s.max_attempts = j.at("max_attempts").get<int>();
  s.tasks_total = j.at("tasks_total").get<std::size_t>();
  s.tasks_done = j.at("tasks_done").get<std::size_t>();
  s.resumed_from = j.value("resumed_from", std::size_t{0});
  s.accepted = j.at("accepted").get<std::vector<std::vector<std::size_t>>>();
  s.discarded = j.at("discarded").get<std::vector<std::vector<std::size_t>>>();
  s.attempts_histogram =
      j.at("attempts_histogram").get<std::vector<std::size_t>>();
  return s;
}

SynthesisStats synthesize_dataset(std::span<const Corpus> corpora,
                                  const IntensityScale& scale,
                                  Generator& generator, const Judge& judge,
                                  const SynthesisOptions& options) {
  if (corpora.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no corpora to synthesize from");
  }
  if (options.dataset_path.empty()) {
    throw Error(ErrorKind::InvalidConfig, "dataset path is required");
  }
  if (options.max_attempts < 1) {
    throw Error(ErrorKind::InvalidConfig, "max_attempts must be at least 1");
  }
  const int k = scale.size();
  std::vector<const Corpus*> by_level(static_cast<std::size_t>(k), nullptr);
  for (const auto& c : corpora) {
    check_level(scale, c.level, "corpus");
    if (by_level[static_cast<std::size_t>(c.level - 1)]) {
      throw Error(ErrorKind::InvalidConfig,
                  "duplicate corpus for level " + std::to_string(c.level));
    }
    by_level[static_cast<std::size_t>(c.level - 1)] = &c;
  }

  std::mt19937_64 rng(options.seed);
  std::vector<Task> tasks;
  for (int l = 1; l <= k; ++l) {
    const Corpus* c = by_level[static_cast<std::size_t>(l - 1)];
    if (!c) continue;
    for (std::size_t i :
         sample_indices(c->documents.size(), options.quota_per_level, rng)) {
      const Document& doc = c->documents[i];
      if (doc.empty()) continue;
      for (int t = 1; t <= k; ++t) {
        if (t != l) tasks.push_back({&doc, l, t});
      }
    }
  }
  const std::string fingerprint = task_fingerprint(tasks);

  auto cursor_path = options.cursor_path;
  if (cursor_path.empty()) {
    cursor_path = options.dataset_path;
    cursor_path += ".cursor";
  }
  auto discard_path = options.discard_log_path;
  if (discard_path.empty()) {
    discard_path = options.dataset_path;
    discard_path += ".discarded.jsonl";
  }

  SynthesisStats stats;
  stats.levels = k;
  stats.max_attempts = options.max_attempts;
  stats.tasks_total = tasks.size();
  stats.accepted.assign(static_cast<std::size_t>(k),
                        std::vector<std::size_t>(static_cast<std::size_t>(k)));
  stats.discarded = stats.accepted;
  stats.attempts_histogram.assign(
      static_cast<std::size_t>(options.max_attempts) + 1, 0);
  std::uintmax_t dataset_bytes = 0;
  std::uintmax_t discard_bytes = 0;

  if (std::filesystem::exists(cursor_path)) {
    nlohmann::json cur;
    try {
      cur = nlohmann::json::parse(read_file(cursor_path));
      if (cur.at("version").get<int>() != kCursorVersion) {
        throw Error(ErrorKind::VersionMismatch, "unsupported cursor version");
      }
      if (cur.at("fingerprint").get<std::string>() != fingerprint ||
          cur.at("max_attempts").get<int>() != options.max_attempts) {
        throw Error(ErrorKind::InvalidConfig,
                    "cursor " + cursor_path.string() +
                        " belongs to a different run; remove it to start over");
      }
      stats = SynthesisStats::from_json(cur.at("stats"));
      dataset_bytes = cur.at("dataset_bytes").get<std::uintmax_t>();
      discard_bytes = cur.at("discard_bytes").get<std::uintmax_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptPayload,
                  std::string("unreadable cursor: ") + e.what());
    }
    stats.resumed_from = stats.tasks_done;
  }
  // Drop anything appended after the last committed cursor.
  truncate_to(options.dataset_path, dataset_bytes);
  truncate_to(discard_path, discard_bytes);

  auto commit = [&](const SynthesisOutcome& outcome) {
    if (const auto* t = std::get_if<ParallelTriple>(&outcome)) {
      append_line(options.dataset_path, to_record(*t));
      ++stats.accepted[static_cast<std::size_t>(t->source_level - 1)]
                      [static_cast<std::size_t>(t->target_level - 1)];
      ++stats.attempts_histogram[static_cast<std::size_t>(t->attempts)];
    } else {
      const auto& d = std::get<Discarded>(outcome);
      append_line(discard_path, discard_record(d));
      ++stats.discarded[static_cast<std::size_t>(d.source_level - 1)]
                       [static_cast<std::size_t>(d.target_level - 1)];
    }
    ++stats.tasks_done;
    nlohmann::json cur{{"version", kCursorVersion},
                       {"fingerprint", fingerprint},
                       {"max_attempts", options.max_attempts},
                       {"next_task", stats.tasks_done},
                       {"dataset_bytes", size_or_zero(options.dataset_path)},
                       {"discard_bytes", size_or_zero(discard_path)},
                       {"stats", stats.to_json()}};
    write_file_atomic(cursor_path, cur.dump() + "\n");
  };

  auto run = [&](const Task& task) {
    return synthesize_pair(task.source->raw, task.source_level,
                           task.target_level, scale, options.style, generator,
                           judge, options.max_attempts, options.temperature);
  };

  const std::size_t window = std::max<std::size_t>(1, options.concurrency);
  std::size_t next = stats.tasks_done;
  while (next < tasks.size()) {
    const std::size_t end = std::min(tasks.size(), next + window);
    if (window == 1) {
      commit(run(tasks[next]));
      next = end;
      continue;
    }
    std::vector<std::future<SynthesisOutcome>> inflight;
    for (std::size_t i = next; i < end; ++i) {
      inflight.push_back(std::async(std::launch::async, run, tasks[i]));
    }
    // Commit in task order; on the first failure keep what came before it.
    std::exception_ptr failure;
    for (auto& f : inflight) {
      try {
        auto outcome = f.get();
        if (!failure) commit(outcome);
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    next = end;
  }
  return stats;
}

std::string to_record(const ParallelTriple& t) {
  nlohmann::json j{{"source", t.source},
                   {"source_level", t.source_level},
                   {"target_level", t.target_level},
                   {"generated", t.generated},
                   {"attempts", t.attempts}};
  if (t.verdict) j["verdict"] = t.verdict->to_json();
  return j.dump();
}

ParallelTriple parse_record(std::string_view line, std::size_t line_no) {
  try {
    const auto j = nlohmann::json::parse(line);
    ParallelTriple t;
    t.source = j.at("source").get<std::string>();
    t.source_level = j.at("source_level").get<int>();
    t.target_level = j.at("target_level").get<int>();
    t.generated = j.at("generated").get<std::string>();
    t.attempts = j.at("attempts").get<int>();
    if (j.contains("verdict")) t.verdict = JudgeVerdict::from_json(j["verdict"]);
    if (t.source_level < 1 || t.target_level < 1 || t.attempts < 1 ||
        t.source_level == t.target_level) {
      throw Error(ErrorKind::MalformedRecord, "field out of range", line_no);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, e.what(), line_no);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedRecord) throw;
    throw Error(ErrorKind::MalformedRecord, e.what(), line_no);
  }
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const ParallelTriple> triples) {
  std::string out;
  for (const auto& t : triples) {
    out += to_record(t);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<ParallelTriple> read_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<ParallelTriple> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    out.push_back(parse_record(line, line_no));
  }
  return out;
}

}  // namespace stylereward
