#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "gsdmm/corpus.hpp"
#include "gsdmm/error.hpp"
#include "gsdmm/eval.hpp"
#include "gsdmm/merge.hpp"
#include "gsdmm/model.hpp"
#include "gsdmm/sampler.hpp"
#include "gsdmm/synth.hpp"

namespace py = pybind11;
using namespace gsdmm;

namespace {

// RunResult plus the vocabulary needed to name words afterwards.
struct PyRunResult {
    RunResult result;
    Vocabulary vocab;
};

RawDocument to_raw(const py::handle& item) {
    RawDocument doc;
    if (py::isinstance<py::dict>(item)) {
        auto d = item.cast<py::dict>();
        doc.doc_id = py::str(d["id"]);
        doc.text = d["text"].cast<std::string>();
        if (d.contains("label") && !d["label"].is_none()) doc.label = py::str(d["label"]);
        return doc;
    }
    auto t = item.cast<py::sequence>();
    if (t.size() < 2 || t.size() > 3) throw py::value_error("expected (id, text) or (id, text, label)");
    doc.doc_id = py::str(t[0]);
    doc.text = t[1].cast<std::string>();
    if (t.size() == 3 && !t[2].is_none()) doc.label = py::str(t[2]);
    return doc;
}

py::dict raw_to_dict(const RawDocument& r) {
    py::dict d;
    d["id"] = r.doc_id;
    d["text"] = r.text;
    d["label"] = r.label ? py::cast(*r.label) : py::none();
    return d;
}

// Cluster ids in first-appearance order so the state has no empty clusters.
ModelState state_from(const Corpus& corpus, const std::vector<std::uint32_t>& assignments, double alpha) {
    const auto dense = densify(std::span<const std::uint32_t>(assignments));
    const std::size_t k = dense.empty() ? 0 : *std::max_element(dense.begin(), dense.end()) + 1;
    const std::vector<ClusterId> z(dense.begin(), dense.end());
    return ModelState::from_assignments(corpus, z, k, alpha);
}

}  // namespace

PYBIND11_MODULE(_gsdmm, m) {
    m.doc() = "GSDMM / GSDMM+ short-text clustering";

    py::register_exception<Error>(m, "GsdmmError");

    py::class_<TokenRules>(m, "TokenRules")
        .def(py::init<>())
        .def_readwrite("lowercase", &TokenRules::lowercase)
        .def_readwrite("strip_non_latin", &TokenRules::strip_non_latin)
        .def_readwrite("stopwords", &TokenRules::stopwords)
        .def_readwrite("stemming", &TokenRules::stemming)
        .def_readwrite("min_word_len", &TokenRules::min_word_len)
        .def_readwrite("max_word_len", &TokenRules::max_word_len)
        .def_readwrite("min_df", &TokenRules::min_df);

    m.def("default_stopwords", &default_stopwords, py::return_value_policy::copy);
    m.def("light_stem", &light_stem, py::arg("word"));
    m.def("tokenize", &tokenize, py::arg("text"), py::arg("rules") = TokenRules{});

    py::class_<Corpus>(m, "Corpus")
        .def("__len__", &Corpus::size)
        .def_property_readonly("vocab_size", &Corpus::vocab_size)
        .def_property_readonly("words", [](const Corpus& c) { return c.vocabulary().words(); })
        .def_property_readonly("doc_ids",
                               [](const Corpus& c) {
                                   std::vector<std::string> ids;
                                   for (const auto& d : c.documents()) ids.push_back(d.doc_id);
                                   return ids;
                               })
        .def_property_readonly("labels",
                               [](const Corpus& c) {
                                   py::list out;
                                   for (const auto& d : c.documents())
                                       out.append(d.gold_label ? py::cast(*d.gold_label) : py::none());
                                   return out;
                               })
        .def("document",
             [](const Corpus& c, std::size_t d) {
                 if (d >= c.size()) throw py::index_error();
                 std::vector<std::pair<std::string, std::uint32_t>> out;
                 for (const auto& wc : c[d].counts) out.emplace_back(c.vocabulary().word(wc.word), wc.count);
                 return out;
             })
        .def_property_readonly("stats", [](const Corpus& c) {
            py::dict s;
            s["num_docs"] = c.stats().num_docs;
            s["vocab_size"] = c.stats().vocab_size;
            s["mean_len"] = c.stats().mean_len;
            s["max_len"] = c.stats().max_len;
            return s;
        });

    m.def(
        "build_corpus",
        [](const py::iterable& records, const TokenRules& rules) {
            std::vector<RawDocument> raw;
            for (const auto& item : records) raw.push_back(to_raw(item));
            auto built = build_corpus(raw, rules);
            return py::make_tuple(std::move(built.corpus), built.dropped_doc_ids);
        },
        py::arg("records"), py::arg("rules") = TokenRules{},
        "Returns (corpus, dropped_ids). Records are dicts with id/text[/label] or tuples.");

    m.def(
        "read_dataset",
        [](const std::string& path, const std::string& format) {
            DatasetFormat f;
            if (format == "jsonl") f = DatasetFormat::Jsonl;
            else if (format == "tsv") f = DatasetFormat::Tsv;
            else throw py::value_error("format must be 'jsonl' or 'tsv'");
            py::list out;
            for (const auto& r : read_dataset(path, f)) out.append(raw_to_dict(r));
            return out;
        },
        py::arg("path"), py::arg("format") = "jsonl");

    py::class_<GenSpec>(m, "GenSpec")
        .def(py::init<>())
        .def_readwrite("k", &GenSpec::k)
        .def_readwrite("v", &GenSpec::v)
        .def_readwrite("d", &GenSpec::d)
        .def_readwrite("doc_len", &GenSpec::doc_len)
        .def_readwrite("mean_len", &GenSpec::mean_len)
        .def_readwrite("alpha_gen", &GenSpec::alpha_gen)
        .def_readwrite("beta_gen", &GenSpec::beta_gen)
        .def_readwrite("seed", &GenSpec::seed);

    py::class_<GeneratedCorpus>(m, "GeneratedCorpus")
        .def_readonly("corpus", &GeneratedCorpus::corpus)
        .def_readonly("labels", &GeneratedCorpus::labels)
        .def_readonly("theta", &GeneratedCorpus::theta)
        .def_readonly("phi", &GeneratedCorpus::phi)
        .def_property_readonly("records", [](const GeneratedCorpus& g) {
            py::list out;
            for (const auto& r : g.raw) out.append(raw_to_dict(r));
            return out;
        });

    m.def("generate_corpus", &generate_corpus, py::arg("spec"), py::call_guard<py::gil_scoped_release>());

    py::enum_<Algorithm>(m, "Algorithm")
        .value("GSDMM", Algorithm::Gsdmm)
        .value("GSDMM_PLUS", Algorithm::GsdmmPlus);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_static("defaults", &RunConfig::defaults, py::arg("algorithm"))
        .def_readwrite("algorithm", &RunConfig::algorithm)
        .def_readwrite("k_max", &RunConfig::k_max)
        .def_readwrite("k_real", &RunConfig::k_real)
        .def_readwrite("alpha", &RunConfig::alpha)
        .def_readwrite("beta", &RunConfig::beta)
        .def_readwrite("iterations", &RunConfig::iterations)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("entropy_refreshes_per_sweep", &RunConfig::entropy_refreshes_per_sweep)
        .def_readwrite("entropy_epsilon", &RunConfig::entropy_epsilon)
        .def_readwrite("entropy_normalized", &RunConfig::entropy_normalized)
        .def_readwrite("shuffle", &RunConfig::shuffle);

    py::class_<SweepRecord>(m, "SweepRecord")
        .def_readonly("iteration", &SweepRecord::iteration)
        .def_readonly("active_clusters", &SweepRecord::active_clusters)
        .def_readonly("moved_docs", &SweepRecord::moved_docs);

    py::class_<MergeStep>(m, "MergeStep")
        .def_readonly("a", &MergeStep::a)
        .def_readonly("b", &MergeStep::b)
        .def_readonly("similarity", &MergeStep::similarity)
        .def("__repr__", [](const MergeStep& s) {
            return "MergeStep(a=" + std::to_string(s.a) + ", b=" + std::to_string(s.b) +
                   ", similarity=" + std::to_string(s.similarity) + ")";
        });

    py::class_<PyRunResult>(m, "RunResult")
        .def_property_readonly("assignments", [](const PyRunResult& r) { return r.result.assignments; })
        .def_property_readonly("trace", [](const PyRunResult& r) { return r.result.trace; })
        .def_property_readonly("merges", [](const PyRunResult& r) { return r.result.merges; })
        .def_property_readonly("merge_skipped", [](const PyRunResult& r) { return r.result.merge_skipped; })
        .def_property_readonly("num_clusters", [](const PyRunResult& r) { return r.result.state.active_clusters(); })
        .def_property_readonly("cluster_sizes",
                               [](const PyRunResult& r) {
                                   std::vector<std::uint32_t> sizes;
                                   for (const auto& c : r.result.state.clusters()) sizes.push_back(c.m);
                                   return sizes;
                               })
        .def(
            "top_words",
            [](const PyRunResult& r, ClusterId z, std::size_t n, double beta) {
                return top_words(r.result.state, z, n, beta, r.vocab);
            },
            py::arg("cluster"), py::arg("n") = 10, py::arg("beta") = 0.1);

    m.def(
        "run",
        [](const Corpus& corpus, const RunConfig& cfg) {
            auto result = run(corpus, cfg);
            return PyRunResult{std::move(result), corpus.vocabulary()};
        },
        py::arg("corpus"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("acc", &EvalReport::acc)
        .def_readonly("nmi", &EvalReport::nmi)
        .def_readonly("k_pred", &EvalReport::k_pred)
        .def_readonly("k_gold", &EvalReport::k_gold)
        .def_readonly("confusion", &EvalReport::confusion);

    // Integer labels are tried first; any other hashable labels go through str().
    auto dense = [](const py::sequence& labels) {
        std::vector<std::string> s;
        for (const auto& x : labels) s.push_back(py::str(x));
        return densify(std::span<const std::string>(s));
    };
    m.def("evaluate", [](const std::vector<std::uint32_t>& pred, const std::vector<std::uint32_t>& gold) {
        return evaluate(densify(std::span<const std::uint32_t>(pred)), densify(std::span<const std::uint32_t>(gold)));
    }, py::arg("pred"), py::arg("gold"));
    m.def("evaluate", [dense](const py::sequence& pred, const py::sequence& gold) {
        return evaluate(dense(pred), dense(gold));
    }, py::arg("pred"), py::arg("gold"));
    m.def("accuracy", [dense](const py::sequence& pred, const py::sequence& gold) {
        return accuracy(dense(pred), dense(gold));
    }, py::arg("pred"), py::arg("gold"));
    m.def("nmi", [dense](const py::sequence& pred, const py::sequence& gold) {
        return nmi(dense(pred), dense(gold));
    }, py::arg("pred"), py::arg("gold"));

    m.def(
        "word_entropy",
        [](const Corpus& corpus, const std::vector<std::uint32_t>& assignments, double epsilon, bool normalized) {
            return word_entropy(state_from(corpus, assignments, 0.1), epsilon, normalized).h;
        },
        py::arg("corpus"), py::arg("assignments"), py::arg("epsilon") = 1e-9, py::arg("normalized") = true,
        "Per-word entropy across the clusters of `assignments`, indexed like Corpus.words.");

    m.def(
        "merge_to_k",
        [](const Corpus& corpus, const std::vector<std::uint32_t>& assignments, std::size_t k_real) {
            auto state = state_from(corpus, assignments, 0.1);
            auto log = merge_to_k(state, k_real);
            return py::make_tuple(state.assignments(), log);
        },
        py::arg("corpus"), py::arg("assignments"), py::arg("k_real"),
        "Greedy TF-ICF merging. Returns (assignments, merges); input ids are renumbered in first-appearance order.");
}
