#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stylereward/config.hpp"
#include "stylereward/corpus_model.hpp"
#include "stylereward/error.hpp"
#include "stylereward/judges.hpp"
#include "stylereward/metrics.hpp"
#include "stylereward/readability.hpp"
#include "stylereward/rewards.hpp"
#include "stylereward/search.hpp"
#include "stylereward/text.hpp"

namespace py = pybind11;
namespace sr = stylereward;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<sr::Corpus> to_corpora(
    const std::vector<std::vector<std::string>>& levels) {
  std::vector<sr::Corpus> out;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    sr::Corpus c;
    c.level = static_cast<int>(l) + 1;
    for (const auto& d : levels[l]) c.documents.push_back(sr::tokenize(d));
    out.push_back(std::move(c));
  }
  return out;
}

// One style's loaded models plus the reward settings from the config.
class Engine {
 public:
  Engine(const std::filesystem::path& config, const std::string& style) {
    const auto cfg = sr::EngineConfig::load(config);
    auto emb = std::make_shared<const sr::EmbeddingTable>(
        sr::EmbeddingTable::load(cfg.embeddings, cfg.oov));
    models_ = sr::load_style(cfg, sr::parse_style(style), std::move(emb));
  }

  py::object reward(const std::string& source, const std::string& generated,
                    int target) const {
    const auto r = sr::total_reward(sr::tokenize(source),
                                    sr::tokenize(generated), target,
                                    models_.context(), models_.reward);
    auto j = r.to_json();
    j["h_re"] = sr::h_re(r.sentence, r.lexicon);
    return to_python(j);
  }

  py::object judge(const std::string& text) const {
    return to_python(models_.judge->judge(sr::tokenize(text)).to_json());
  }

  py::object transfer(const std::string& source, int target, int budget,
                      std::size_t proposals) const {
    const auto r = sr::hill_climb(sr::tokenize(source), target,
                                  models_.context(), models_.reward,
                                  {budget, proposals});
    return to_python({{"text", r.text}, {"trace", r.trace.to_json()}});
  }

  py::object rerank(const std::vector<std::string>& candidates,
                    const std::string& source, int target) const {
    const auto ranked = sr::rerank(candidates, sr::tokenize(source), target,
                                   models_.context(), models_.reward);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : ranked) {
      out.push_back({{"index", c.input_index},
                     {"text", c.text},
                     {"reward", c.reward.to_json()}});
    }
    return to_python(out);
  }

  py::object evaluate(const std::filesystem::path& predictions) const {
    const auto pairs = sr::read_predictions(predictions);
    return to_python(
        sr::evaluate(pairs, models_.context(), models_.reward).to_json());
  }

  int levels() const { return models_.scale.size(); }

 private:
  sr::StyleModels models_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "stylereward C++ core";

  // Kept alive for the life of the interpreter.
  static py::handle error =
      py::exception<sr::Error>(m, "StyleRewardError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sr::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("kind") = sr::to_string(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("tokenize", [](const std::string& s) { return sr::tokenize(s).tokens; });
  m.def("count_syllables", &sr::count_syllables);
  m.def("fre_score",
        [](const std::string& s) { return sr::fre_score(sr::tokenize(s)); });
  m.def(
      "fre_delta",
      [](double score, int target) {
        return sr::fre_delta(score, target, sr::IntensityScale::readability());
      },
      py::arg("score"), py::arg("target"));
  m.def("rouge_l", [](const std::string& source, const std::string& generated) {
    return sr::rouge_l(sr::tokenize(source), sr::tokenize(generated));
  });
  m.def("lcs_length", [](const std::vector<std::string>& a,
                         const std::vector<std::string>& b) {
    return sr::lcs_length(a, b);
  });
  m.def("sha256_hex", [](const std::string& s) { return sr::sha256_hex(s); });

  py::class_<sr::PivotModel>(m, "PivotModel")
      .def_static(
          "fit",
          [](const std::vector<std::vector<std::string>>& levels,
             const std::string& scale) {
            return sr::PivotModel::fit(to_corpora(levels),
                                       sr::resolve_scale(scale));
          },
          py::arg("levels"), py::arg("scale") = "readability")
      .def_static("load", &sr::PivotModel::load)
      .def("save", &sr::PivotModel::save)
      .def_property_readonly("levels", &sr::PivotModel::levels)
      .def_property_readonly("vocabulary", &sr::PivotModel::vocabulary)
      .def("style_vocab", &sr::PivotModel::style_vocab)
      .def("similarities",
           [](const sr::PivotModel& p, const std::string& text) {
             return p.similarities(p.doc_vector(sr::tokenize(text)));
           })
      .def(
          "lexicon_reward",
          [](const sr::PivotModel& p, const std::string& text, int target,
             double temperature) {
            return sr::lexicon_reward(sr::tokenize(text), target, p,
                                      temperature);
          },
          py::arg("text"), py::arg("target"), py::arg("temperature") = 0.01);

  py::class_<sr::NaiveBayesClassifier>(m, "NaiveBayes")
      .def_static("train",
                  [](const std::vector<std::vector<std::string>>& levels) {
                    return sr::train_classifier(to_corpora(levels));
                  })
      .def_static("load", &sr::NaiveBayesClassifier::load)
      .def("save", &sr::NaiveBayesClassifier::save)
      .def_property_readonly("levels", &sr::NaiveBayesClassifier::levels)
      .def("posterior",
           [](const sr::NaiveBayesClassifier& c, const std::string& text) {
             return c.posterior(sr::tokenize(text));
           })
      .def("predict",
           [](const sr::NaiveBayesClassifier& c, const std::string& text) {
             return sr::classify(sr::tokenize(text), c).predicted_level;
           });

  py::class_<sr::EmbeddingTable>(m, "EmbeddingTable")
      .def_static("load", [](const std::filesystem::path& p) {
        return sr::EmbeddingTable::load(p);
      })
      .def_static("parse", [](const std::string& text) {
        return sr::EmbeddingTable::parse(text);
      })
      .def_property_readonly("dim", &sr::EmbeddingTable::dim)
      .def("__len__", &sr::EmbeddingTable::size)
      .def("lookup", &sr::EmbeddingTable::lookup);

  m.def("consistency_reward", [](const std::string& source,
                                 const std::string& generated,
                                 const sr::EmbeddingTable& table) {
    return sr::consistency_reward(sr::tokenize(source), sr::tokenize(generated),
                                  table);
  });

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::filesystem::path&, const std::string&>(),
           py::arg("config"), py::arg("style"))
      .def_property_readonly("levels", &Engine::levels)
      .def("reward", &Engine::reward, py::arg("source"), py::arg("generated"),
           py::arg("target"))
      .def("judge", &Engine::judge)
      .def("transfer", &Engine::transfer, py::arg("source"), py::arg("target"),
           py::arg("budget") = 10, py::arg("proposals") = 1)
      .def("rerank", &Engine::rerank, py::arg("candidates"), py::arg("source"),
           py::arg("target"))
      .def("evaluate", &Engine::evaluate);
}
