/**
 * Copyright (c) 2026 the kgembed authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>
#include <sstream>

#include "kgembed/evaluator.hpp"
#include "kgembed/kg.hpp"
#include "kgembed/models.hpp"
#include "kgembed/param_store.hpp"
#include "kgembed/trainer.hpp"

namespace py = pybind11;
using namespace kgembed;

namespace {

py::array_t<double> table_array(const ParamStore& store, ParamStore::Table t) {
    if (!store.has_table(t)) throw std::invalid_argument("table not allocated for this model");
    const std::vector<double>& tbl = store.table(t);
    const std::size_t cols = ParamStore::row_length(t, store.entity_dim(), store.relation_dim());
    const std::size_t rows = tbl.size() / cols;
    py::array_t<double> out({rows, cols});
    std::copy(tbl.begin(), tbl.end(), out.mutable_data());
    return out;
}

/// Seedable RNG handle so corruption is reproducible from python.
struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    std::mt19937_64 engine;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "parallel knowledge graph embedding core";

    py::enum_<ModelKind>(m, "ModelKind")
        .value("TransE", ModelKind::TransE)
        .value("TransH", ModelKind::TransH)
        .value("TransR", ModelKind::TransR)
        .value("TransD", ModelKind::TransD)
        .value("SphereE", ModelKind::SphereE);

    py::enum_<Norm>(m, "Norm").value("L1", Norm::L1).value("L2", Norm::L2);
    py::enum_<Split>(m, "Split")
        .value("Train", Split::Train)
        .value("Valid", Split::Valid)
        .value("Test", Split::Test);
    py::enum_<Side>(m, "Side").value("Head", Side::Head).value("Tail", Side::Tail);
    py::enum_<CorruptionMode>(m, "CorruptionMode")
        .value("Uniform", CorruptionMode::Uniform)
        .value("Bernoulli", CorruptionMode::Bernoulli);
    py::enum_<ProjInit>(m, "ProjInit")
        .value("Identity", ProjInit::Identity)
        .value("Random", ProjInit::Random);

    py::class_<Triple>(m, "Triple")
        .def(py::init<>())
        .def(py::init([](std::int32_t h, std::int32_t r, std::int32_t t) {
                 return Triple{h, r, t};
             }),
             py::arg("head"), py::arg("relation"), py::arg("tail"))
        .def_readwrite("head", &Triple::head)
        .def_readwrite("relation", &Triple::relation)
        .def_readwrite("tail", &Triple::tail)
        .def("__eq__", [](const Triple& a, const Triple& b) { return a == b; })
        .def("__hash__", [](const Triple& t) { return TripleHash{}(t); })
        .def("__repr__", [](const Triple& t) {
            std::ostringstream os;
            os << "Triple(" << t.head << ", " << t.relation << ", " << t.tail << ")";
            return os.str();
        });

    py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
        .def_static("load", &KnowledgeGraph::load, py::arg("dir"))
        .def_static("from_triples", &KnowledgeGraph::from_triples, py::arg("entity_count"),
                    py::arg("relation_count"), py::arg("train"), py::arg("valid") = std::vector<Triple>{},
                    py::arg("test") = std::vector<Triple>{})
        .def("save", &KnowledgeGraph::save, py::arg("dir"))
        .def_property_readonly("entity_count", &KnowledgeGraph::entity_count)
        .def_property_readonly("relation_count", &KnowledgeGraph::relation_count)
        .def("triples", &KnowledgeGraph::triples, py::arg("split"))
        .def("contains", &KnowledgeGraph::contains, py::arg("triple"))
        .def_property_readonly("golden_size", &KnowledgeGraph::golden_size)
        .def_property_readonly("entity_names", &KnowledgeGraph::entity_names)
        .def_property_readonly("relation_names", &KnowledgeGraph::relation_names);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init<>())
        .def(py::init([](ModelKind kind, int k, int d, Norm norm, double epsilon,
                         bool train_radius) {
                 ModelSpec s;
                 s.kind = kind;
                 s.k = k;
                 s.d = d > 0 ? d : k;
                 s.norm = norm;
                 s.epsilon = epsilon;
                 s.train_radius = train_radius;
                 return s;
             }),
             py::arg("kind"), py::arg("k") = 50, py::arg("d") = 0, py::arg("norm") = Norm::L1,
             py::arg("epsilon") = 0.1, py::arg("train_radius") = true)
        .def_readwrite("kind", &ModelSpec::kind)
        .def_readwrite("k", &ModelSpec::k)
        .def_readwrite("d", &ModelSpec::d)
        .def_readwrite("norm", &ModelSpec::norm)
        .def_readwrite("epsilon", &ModelSpec::epsilon)
        .def_readwrite("train_radius", &ModelSpec::train_radius);

    py::enum_<ParamStore::Table>(m, "Table")
        .value("EntityVecs", ParamStore::Table::EntityVecs)
        .value("RelationVecs", ParamStore::Table::RelationVecs)
        .value("NormalVecs", ParamStore::Table::NormalVecs)
        .value("ProjMatrices", ParamStore::Table::ProjMatrices)
        .value("EntityProjVecs", ParamStore::Table::EntityProjVecs)
        .value("RelationProjVecs", ParamStore::Table::RelationProjVecs)
        .value("SphereRadii", ParamStore::Table::SphereRadii);

    py::class_<ParamStore>(m, "ParamStore")
        .def_static("init", &ParamStore::init, py::arg("spec"), py::arg("entity_count"),
                    py::arg("relation_count"), py::arg("seed"),
                    py::arg("proj_init") = ProjInit::Identity)
        .def_property_readonly("entity_count", &ParamStore::entity_count)
        .def_property_readonly("relation_count", &ParamStore::relation_count)
        .def_property_readonly("entity_dim", &ParamStore::entity_dim)
        .def_property_readonly("relation_dim", &ParamStore::relation_dim)
        .def("has_table", &ParamStore::has_table)
        .def("table", &table_array, py::arg("table"), "copy of a parameter table as an array")
        .def("save", &ParamStore::save, py::arg("spec"), py::arg("dir"))
        .def_static("load", &ParamStore::load, py::arg("dir"));

    py::class_<ScoreBreakdown>(m, "ScoreBreakdown")
        .def_readonly("value", &ScoreBreakdown::value)
        .def_readonly("residual", &ScoreBreakdown::residual)
        .def_readonly("head_proj", &ScoreBreakdown::head_proj)
        .def_readonly("tail_proj", &ScoreBreakdown::tail_proj)
        .def_readonly("inner_norm", &ScoreBreakdown::inner_norm);

    m.def("score", &score, py::arg("spec"), py::arg("store"), py::arg("triple"));
    m.def("score_value", &score_value, py::arg("spec"), py::arg("store"), py::arg("triple"));
    m.def("gradient_step", &gradient_step, py::arg("spec"), py::arg("store"), py::arg("golden"),
          py::arg("corrupted"), py::arg("learning_rate"));

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

    py::class_<Corruptor>(m, "Corruptor")
        .def(py::init<const KnowledgeGraph&, CorruptionMode>(), py::arg("kg"), py::arg("mode"),
             py::keep_alive<1, 2>())
        .def("head_replace_prob", &Corruptor::head_replace_prob, py::arg("relation"))
        .def(
            "__call__",
            [](const Corruptor& c, const Triple& golden, Rng& rng) { return c(golden, rng.engine); },
            py::arg("golden"), py::arg("rng"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("spec", &TrainConfig::spec)
        .def_readwrite("num_epochs", &TrainConfig::num_epochs)
        .def_readwrite("num_threads", &TrainConfig::num_threads)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("margin", &TrainConfig::margin)
        .def_readwrite("samples_per_epoch", &TrainConfig::samples_per_epoch)
        .def_readwrite("corruption", &TrainConfig::corruption)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("proj_init", &TrainConfig::proj_init);

    py::class_<EpochLog>(m, "EpochLog")
        .def_readonly("epoch", &EpochLog::epoch)
        .def_readonly("loss", &EpochLog::loss)
        .def_readonly("seconds", &EpochLog::seconds)
        .def_readonly("active_pairs", &EpochLog::active_pairs)
        .def("__repr__", [](const EpochLog& e) {
            std::ostringstream os;
            os << "EpochLog(epoch=" << e.epoch << ", loss=" << e.loss
               << ", active_pairs=" << e.active_pairs << ")";
            return os.str();
        });

    m.def(
        "train",
        [](const KnowledgeGraph& kg, const TrainConfig& cfg) {
            TrainResult r = train(kg, cfg);
            // plain pair: converted to a python tuple after the GIL guard releases
            return std::pair<ParamStore, std::vector<EpochLog>>(std::move(r.store),
                                                                std::move(r.log));
        },
        py::arg("kg"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

    py::class_<MetricSet>(m, "MetricSet")
        .def_readonly("mr", &MetricSet::mr)
        .def_readonly("mrr", &MetricSet::mrr)
        .def_readonly("hits1", &MetricSet::hits1)
        .def_readonly("hits10", &MetricSet::hits10)
        .def("__repr__", [](const MetricSet& s) {
            std::ostringstream os;
            os << "MetricSet(mr=" << s.mr << ", mrr=" << s.mrr << ", hits1=" << s.hits1
               << ", hits10=" << s.hits10 << ")";
            return os.str();
        });

    py::class_<RankReport>(m, "RankReport")
        .def_readonly("raw", &RankReport::raw)
        .def_readonly("filter", &RankReport::filter)
        .def_readonly("seconds", &RankReport::seconds)
        .def_property_readonly("per_triple_ranks", [](const RankReport& r) {
            py::array_t<std::int32_t> out({r.per_triple_ranks.size(), std::size_t{4}});
            auto* p = out.mutable_data();
            for (const TripleRanks& tr : r.per_triple_ranks) {
                *p++ = tr.raw_head;
                *p++ = tr.filter_head;
                *p++ = tr.raw_tail;
                *p++ = tr.filter_tail;
            }
            return out;
        });

    m.def("rank", &rank, py::arg("spec"), py::arg("store"), py::arg("kg"), py::arg("triple"),
          py::arg("side"), py::arg("filtered"));
    m.def("evaluate", &evaluate, py::arg("spec"), py::arg("store"), py::arg("kg"), py::arg("split"),
          py::arg("num_threads") = 1, py::call_guard<py::gil_scoped_release>());
}
