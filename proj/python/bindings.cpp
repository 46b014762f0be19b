// Python bindings for the core operations: canonicalization, the cluster and
// quantization formulas, the stub embedder, the store index with the text
// disambiguation cascade, and response grading.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "adam/benchgen.hpp"
#include "adam/domain.hpp"
#include "adam/embed.hpp"
#include "adam/evalharness.hpp"
#include "adam/index.hpp"
#include "adam/retrieval.hpp"
#include "adam/sampler.hpp"

namespace py = pybind11;
using namespace adam;

namespace {

// Owns the index together with the embedder that produced its vectors, so
// queries and stored rows always share one embedding space.
class Store {
public:
    Store(const std::vector<PersonRecord>& records, std::size_t dim, std::uint64_t seed)
        : embedder_(dim, seed) {
        std::map<std::string, EmbeddingVector> bio;
        for (const auto& rec : records) bio.emplace(rec.qid, embedder_.embed(rec.biography));
        index_ = std::make_unique<StoreIndex>(StoreIndex::build(records, bio));
    }

    std::size_t size() const { return index_->size(); }

    std::set<std::string> exact_lookup(const std::string& name) const {
        return index_->exact_lookup(name);
    }

    std::vector<std::pair<std::string, double>> knn(const std::string& text,
                                                    std::size_t k) const {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& hit : index_->knn(Channel::Biography, embedder_.embed(text), k))
            out.push_back({hit.qid, hit.score});
        return out;
    }

    std::vector<py::dict> disambiguate(const std::string& name,
                                       const std::optional<std::string>& context,
                                       const std::optional<std::string>& nationality,
                                       const std::optional<int>& birth_year) const {
        RetrievalQuery query;
        query.name = name;
        query.context = context;
        query.nationality = nationality;
        query.birth_year = birth_year;
        std::vector<py::dict> out;
        for (const auto& cand : disambiguate_text(query, *index_, embedder_, RagConfig{})) {
            py::dict d;
            d["qid"] = cand.qid;
            d["score"] = cand.score;
            std::vector<std::string> stages;
            for (Stage stage : cand.provenance) stages.push_back(to_string(stage));
            d["provenance"] = stages;
            out.push_back(std::move(d));
        }
        return out;
    }

    std::optional<PersonRecord> find(const std::string& qid) const {
        const PersonRecord* rec = index_->find(qid);
        if (!rec) return std::nullopt;
        return *rec;
    }

private:
    StubEmbedder embedder_;
    std::unique_ptr<StoreIndex> index_;
};

py::tuple grade_response(const std::string& response, int answer_index) {
    BenchmarkItem item;
    item.options = {"a", "b", "c", "d"};
    item.answer_index = answer_index;
    auto outcome = grade(response, item, EvalCondition{});
    return py::make_tuple(outcome.choice, outcome.correct);
}

}  // namespace

PYBIND11_MODULE(_adambio, m) {
    m.doc() = "Biographical knowledge store, retrieval, and benchmark toolkit";

    py::class_<PersonRecord>(m, "PersonRecord")
        .def(py::init([](std::string qid, std::map<std::string, std::string> names,
                         std::string biography, int birth_year, std::string birthplace,
                         std::string nationality, std::int64_t popularity,
                         std::vector<std::string> image_urls) {
                 PersonRecord rec;
                 rec.qid = std::move(qid);
                 rec.names = std::move(names);
                 rec.biography = std::move(biography);
                 rec.birth_date = {birth_year, std::nullopt, std::nullopt};
                 rec.birthplace = std::move(birthplace);
                 rec.nationality = std::move(nationality);
                 rec.popularity = popularity;
                 rec.image_urls = std::move(image_urls);
                 return rec;
             }),
             py::arg("qid"), py::arg("names"), py::arg("biography"), py::arg("birth_year"),
             py::arg("birthplace"), py::arg("nationality"), py::arg("popularity") = 1,
             py::arg("image_urls") = std::vector<std::string>{})
        .def_readonly("qid", &PersonRecord::qid)
        .def_readonly("names", &PersonRecord::names)
        .def_readonly("biography", &PersonRecord::biography)
        .def_property_readonly("birth_year",
                               [](const PersonRecord& r) { return r.birth_date.year; })
        .def_readonly("birthplace", &PersonRecord::birthplace)
        .def_readonly("nationality", &PersonRecord::nationality)
        .def_readonly("popularity", &PersonRecord::popularity)
        .def_readonly("image_urls", &PersonRecord::image_urls)
        .def("__repr__", [](const PersonRecord& r) { return "<PersonRecord " + r.qid + ">"; });

    py::class_<Store>(m, "Store")
        .def(py::init<const std::vector<PersonRecord>&, std::size_t, std::uint64_t>(),
             py::arg("records"), py::arg("dim") = 64, py::arg("seed") = 0)
        .def("__len__", &Store::size)
        .def("exact_lookup", &Store::exact_lookup, py::arg("name"))
        .def("knn", &Store::knn, py::arg("text"), py::arg("k"))
        .def("disambiguate", &Store::disambiguate, py::arg("name"),
             py::arg("context") = std::nullopt, py::arg("nationality") = std::nullopt,
             py::arg("birth_year") = std::nullopt)
        .def("find", &Store::find, py::arg("qid"));

    m.def("canonical_name", &canonical_name, py::arg("name"));
    m.def("cluster_count", &cluster_count, py::arg("population_proportion"));
    m.def("quantize_year", &quantize_year, py::arg("year"));
    m.def("mask_biography", &mask_biography, py::arg("biography"));
    m.def(
        "stub_embed",
        [](const std::string& text, std::size_t dim, std::uint64_t seed) {
            return stub_embed(text, dim, seed).values();
        },
        py::arg("text"), py::arg("dim") = 64, py::arg("seed") = 0);
    m.def("grade_response", &grade_response, py::arg("response"), py::arg("answer_index"));

    py::register_exception<RetrievalError>(m, "RetrievalError");
}
