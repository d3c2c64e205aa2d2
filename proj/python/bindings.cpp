#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "gld/corpus.hpp"
#include "gld/errors.hpp"
#include "gld/evaluation.hpp"
#include "gld/manifest.hpp"
#include "gld/metrics.hpp"
#include "gld/ngram_stats.hpp"
#include "gld/policy.hpp"
#include "gld/rewards.hpp"
#include "gld/toy_world.hpp"
#include "gld/training.hpp"

namespace py = pybind11;

namespace {

gld::Caption cap(const std::string& text) { return gld::make_caption(text); }

std::vector<gld::Caption> caps(const std::vector<std::string>& texts) {
  std::vector<gld::Caption> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cap(t));
  return out;
}

gld::WordRewardMode parse_mode(const std::string& mode) {
  if (mode == "uniform") return gld::WordRewardMode::kUniform;
  if (mode == "local") return gld::WordRewardMode::kLocal;
  if (mode == "local_diff") return gld::WordRewardMode::kLocalDiff;
  throw gld::ParseError("unknown word reward mode: " + mode);
}

py::dict summary_dict(const gld::EvalSummary& s) {
  py::dict out;
  out["cider"] = s.cider;
  out["bleu"] = std::vector<double>(s.bleu.begin(), s.bleu.end());
  out["rouge_l"] = s.rouge_l;
  out["unicap"] = s.unicap;
  out["avglen"] = s.avglen;
  py::dict recall;
  for (const auto& [k, v] : s.recall_at) recall[py::int_(k)] = v;
  out["recall_at"] = recall;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fine-grained caption rewards and toy training";
  m.attr("__version__") = gld::kToolVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gld::Error& e) {
      PyErr_SetString(PyExc_ValueError,
                      (e.kind() + ": " + std::string(e.what())).c_str());
    }
  });

  m.def(
      "tokenize", [](const std::string& text) { return gld::tokenize(text); },
      py::arg("text"));

  py::class_<gld::Corpus>(m, "Corpus")
      .def_static(
          "load",
          [](const std::string& path) { return gld::load_dataset(path); },
          py::arg("path"))
      .def_static("from_json", &gld::parse_dataset_json, py::arg("text"))
      .def_property_readonly(
          "n_images",
          [](const gld::Corpus& c) { return c.images.size(); })
      .def("vocab",
           [](const gld::Corpus& c) {
             std::vector<std::string> words;
             words.reserve(c.vocab.size());
             for (const auto& [w, id] : c.vocab) words.push_back(w);
             std::sort(words.begin(), words.end());
             return words;
           })
      .def(
          "image_ids",
          [](const gld::Corpus& c, const std::string& split) {
            std::vector<std::string> out;
            if (split == "all") {
              for (const auto& img : c.images) out.push_back(img.id);
            } else {
              for (const auto* rec :
                   c.split_images(gld::split_from_string(split)))
                out.push_back(rec->id);
            }
            return out;
          },
          py::arg("split") = "all")
      .def(
          "references",
          [](const gld::Corpus& c, const std::string& id) {
            const auto* rec = c.find(id);
            if (!rec) throw gld::ParseError("unknown image id: " + id);
            std::vector<std::string> out;
            for (const auto& r : rec->references)
              out.push_back(gld::join_tokens(r.tokens));
            return out;
          },
          py::arg("image_id"));

  py::class_<gld::NGramWeightTable>(m, "WeightTable")
      .def_property_readonly("total_images",
                             &gld::NGramWeightTable::total_images)
      .def("doc_count", &gld::NGramWeightTable::document_count,
           py::arg("ngram"), py::arg("n"))
      .def("idf", &gld::NGramWeightTable::idf, py::arg("ngram"), py::arg("n"))
      .def("to_csv", &gld::NGramWeightTable::to_csv);

  m.def(
      "build_weight_table",
      [](const gld::Corpus& corpus, double log_base) {
        return gld::build_weight_table(corpus, log_base);
      },
      py::arg("corpus"), py::arg("log_base") = gld::kEulerBase);

  m.def(
      "tfidf",
      [](const std::string& caption, const std::string& ngram, int n,
         const gld::NGramWeightTable& table) {
        return gld::tfidf(cap(caption), ngram, n, table);
      },
      py::arg("caption"), py::arg("ngram"), py::arg("n"), py::arg("table"));

  m.def(
      "select_fine_grained",
      [](const std::string& caption, const gld::NGramWeightTable& table,
         double lam, double eta) {
        gld::LdConfig cfg;
        cfg.lambda = lam;
        cfg.eta = eta;
        return gld::select_fine_grained(cap(caption), table, cfg);
      },
      py::arg("caption"), py::arg("table"), py::arg("lam"), py::arg("eta"));

  m.def(
      "cider",
      [](const std::string& candidate, const std::vector<std::string>& refs,
         const gld::NGramWeightTable& table, bool plain, double sigma,
         double scale) {
        gld::CiderConfig cfg;
        cfg.variant =
            plain ? gld::CiderVariant::kPlain : gld::CiderVariant::kCiderD;
        cfg.sigma = sigma;
        cfg.scale = scale;
        return gld::cider(cap(candidate), caps(refs), table, cfg);
      },
      py::arg("candidate"), py::arg("refs"), py::arg("table"),
      py::arg("plain") = false, py::arg("sigma") = 6.0,
      py::arg("scale") = 10.0);

  m.def(
      "bleu",
      [](const std::string& candidate, const std::vector<std::string>& refs) {
        const auto b = gld::bleu(cap(candidate), caps(refs));
        return std::vector<double>(b.begin(), b.end());
      },
      py::arg("candidate"), py::arg("refs"));

  m.def(
      "rouge_l",
      [](const std::string& candidate, const std::vector<std::string>& refs) {
        return gld::rouge_l(cap(candidate), caps(refs));
      },
      py::arg("candidate"), py::arg("refs"));

  m.def(
      "word_increments",
      [](const std::string& caption, const std::vector<std::string>& refs,
         const gld::NGramWeightTable& table, double lam, double eta) {
        gld::LdConfig cfg;
        cfg.lambda = lam;
        cfg.eta = eta;
        return gld::ld_increments(cap(caption), caps(refs), table, cfg);
      },
      py::arg("caption"), py::arg("refs"), py::arg("table"), py::arg("lam"),
      py::arg("eta"));

  m.def(
      "word_rewards",
      [](const std::string& caption, const std::vector<std::string>& refs,
         const gld::NGramWeightTable& table, double lam, double eta) {
        gld::LdConfig cfg;
        cfg.lambda = lam;
        cfg.eta = eta;
        return gld::reward_ld(cap(caption), caps(refs), table, cfg);
      },
      py::arg("caption"), py::arg("refs"), py::arg("table"), py::arg("lam"),
      py::arg("eta"));

  py::class_<gld::ToyWorld>(m, "ToyWorld")
      .def(py::init([](uint64_t seed, int n_train, int n_val, int n_test,
                       double rare_fraction, int min_refs, int max_refs,
                       double scene_prob) {
             gld::ToyWorldConfig cfg;
             cfg.seed = seed;
             cfg.n_train = n_train;
             cfg.n_val = n_val;
             cfg.n_test = n_test;
             cfg.rare_fraction = rare_fraction;
             cfg.min_refs = min_refs;
             cfg.max_refs = max_refs;
             cfg.scene_prob = scene_prob;
             return gld::ToyWorld(cfg);
           }),
           py::arg("seed") = 7, py::arg("n_train") = 200,
           py::arg("n_val") = 50, py::arg("n_test") = 200,
           py::arg("rare_fraction") = 0.10, py::arg("min_refs") = 2,
           py::arg("max_refs") = 5, py::arg("scene_prob") = 0.3)
      .def_property_readonly("attr_dim", &gld::ToyWorld::attr_dim)
      .def("vocab", &gld::ToyWorld::policy_vocab)
      .def(
          "image_ids",
          [](const gld::ToyWorld& w, const std::string& split) {
            std::vector<std::string> out;
            for (const auto* rec :
                 w.corpus().split_images(gld::split_from_string(split)))
              out.push_back(rec->id);
            return out;
          },
          py::arg("split"))
      .def(
          "references",
          [](const gld::ToyWorld& w, const std::string& id) {
            const auto* rec = w.corpus().find(id);
            if (!rec) throw gld::ParseError("unknown image id: " + id);
            std::vector<std::string> out;
            for (const auto& r : rec->references)
              out.push_back(gld::join_tokens(r.tokens));
            return out;
          },
          py::arg("image_id"))
      .def("attributes", &gld::ToyWorld::attributes, py::arg("image_id"))
      .def("weights", &gld::ToyWorld::weights,
           py::return_value_policy::reference_internal);

  py::class_<gld::ToyPolicy>(m, "Policy")
      .def_property_readonly("n_params", &gld::ToyPolicy::n_params)
      .def_property_readonly("max_len", &gld::ToyPolicy::max_len)
      .def_property_readonly("vocab", &gld::ToyPolicy::vocab)
      .def_property(
          "theta",
          [](const gld::ToyPolicy& p) { return p.theta(); },
          [](gld::ToyPolicy& p, const std::vector<double>& v) {
            if (v.size() != p.theta().size())
              throw gld::ParseError("theta size mismatch");
            p.theta() = v;
          })
      .def(
          "greedy_caption",
          [](const gld::ToyPolicy& p, const std::vector<double>& attrs) {
            return gld::join_tokens(p.to_caption(p.greedy_decode(attrs)).tokens);
          },
          py::arg("attrs"))
      .def(
          "log_prob",
          [](const gld::ToyPolicy& p, const std::vector<double>& attrs,
             const std::vector<std::string>& words) {
            std::vector<int> ids;
            ids.reserve(words.size());
            for (const auto& w : words) ids.push_back(p.token_id(w));
            return p.log_prob(attrs, ids);
          },
          py::arg("attrs"), py::arg("words"));

  m.def(
      "train_toy",
      [](const gld::ToyWorld& world, const std::string& objective,
         uint64_t seed, int epochs, int mle_epochs, int batch_size, double lr,
         int samples, double lam, double eta, double epsilon,
         bool use_baseline) {
        gld::TrainConfig cfg;
        cfg.objective = gld::parse_objective(objective);
        cfg.seed = seed;
        cfg.total_epochs = epochs;
        cfg.mle_epochs = mle_epochs;
        cfg.batch_size = batch_size;
        cfg.lr = lr;
        cfg.samples_per_image = samples;
        cfg.ld.lambda = lam;
        cfg.ld.eta = eta;
        cfg.gd.epsilon = epsilon;
        cfg.use_baseline = use_baseline;
        auto result = gld::train(world, cfg);
        py::list log;
        for (const auto& row : result.log) {
          py::dict d;
          d["epoch"] = row.epoch;
          d["phase"] = row.phase;
          d["objective_value"] = row.objective_value;
          d["heldout_cider"] = row.heldout_cider;
          d["unicap"] = row.unicap;
          d["avglen"] = row.avglen;
          log.append(d);
        }
        return py::make_tuple(std::move(result.policy), log);
      },
      py::arg("world"), py::arg("objective") = "gld", py::arg("seed") = 1,
      py::arg("epochs") = 40, py::arg("mle_epochs") = 10,
      py::arg("batch_size") = 16, py::arg("lr") = 5e-4, py::arg("samples") = 1,
      py::arg("lam") = 1.0, py::arg("eta") = 0.3, py::arg("epsilon") = 0.2,
      py::arg("use_baseline") = true);

  m.def(
      "evaluate",
      [](const gld::ToyPolicy& policy, const gld::ToyWorld& world,
         const std::string& split, const std::vector<int>& ks) {
        return summary_dict(gld::evaluate_policy(
            policy, world, gld::split_from_string(split), ks));
      },
      py::arg("policy"), py::arg("world"), py::arg("split") = "test",
      py::arg("ks") = std::vector<int>{1, 5, 10});

  // Per-word reward trace for a train image; the neighbor term is defined
  // against the train pool, so other splits are rejected upstream.
  m.def(
      "reward_trace",
      [](const gld::ToyWorld& world, const std::string& image_id,
         const std::string& caption, const std::string& mode, bool use_gd,
         double lam, double eta, double epsilon) {
        const auto* rec = world.corpus().find(image_id);
        if (!rec) throw gld::ParseError("unknown image id: " + image_id);
        gld::TraceSpec spec;
        spec.word_mode = parse_mode(mode);
        spec.use_gd = use_gd;
        spec.gd.epsilon = epsilon;
        spec.gd.use_minibatch = false;  // single caption, no batch to mine
        spec.ld.lambda = lam;
        spec.ld.eta = eta;
        const auto trace = gld::assemble(
            spec, image_id, cap(caption), rec->references, world.weights(),
            use_gd ? &world.store() : nullptr,
            use_gd ? &world.neighbors() : nullptr, nullptr);
        py::list steps;
        for (const auto& s : trace.steps) {
          py::dict d;
          d["word"] = s.word;
          d["r_c"] = s.r_c;
          d["ld_increment"] = s.ld_increment;
          d["r_gd"] = s.r_gd;
          d["total"] = s.total;
          steps.append(d);
        }
        py::dict out;
        out["steps"] = steps;
        out["r_c"] = trace.r_c;
        out["r_h"] = trace.r_h;
        out["r_b"] = trace.r_b;
        out["r_gd"] = trace.r_gd;
        out["total"] = trace.total_sum();
        return out;
      },
      py::arg("world"), py::arg("image_id"), py::arg("caption"),
      py::arg("mode") = "local", py::arg("use_gd") = true,
      py::arg("lam") = 1.0, py::arg("eta") = 0.3, py::arg("epsilon") = 0.2);
}
