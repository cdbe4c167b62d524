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

#ifndef KGEMBED_TESTS_TEST_UTIL_HPP
#define KGEMBED_TESTS_TEST_UTIL_HPP

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgembed/kg.hpp"
#include "kgembed/model_spec.hpp"
#include "kgembed/param_store.hpp"

namespace kgembed::testutil {

/// Unique temp directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("kgembed_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Random graph with distinct triples split across train/valid/test. Keeps
/// the golden set sparse relative to E*E*R so corruption resampling succeeds.
inline KnowledgeGraph random_kg(std::mt19937_64& rng, std::int32_t entities,
                                std::int32_t relations, std::size_t n_train,
                                std::size_t n_valid = 0, std::size_t n_test = 0) {
    const std::size_t total = n_train + n_valid + n_test;
    std::set<std::tuple<std::int32_t, std::int32_t, std::int32_t>> seen;
    std::vector<Triple> all;
    std::uniform_int_distribution<std::int32_t> pick_e(0, entities - 1);
    std::uniform_int_distribution<std::int32_t> pick_r(0, relations - 1);
    while (all.size() < total) {
        Triple t{pick_e(rng), pick_r(rng), pick_e(rng)};
        if (seen.emplace(t.head, t.relation, t.tail).second) all.push_back(t);
    }
    std::vector<Triple> train(all.begin(), all.begin() + n_train);
    std::vector<Triple> valid(all.begin() + n_train, all.begin() + n_train + n_valid);
    std::vector<Triple> test(all.begin() + n_train + n_valid, all.end());
    return KnowledgeGraph::from_triples(entities, relations, std::move(train), std::move(valid),
                                        std::move(test));
}

/// Fills every allocated table with generic random values (no constraints),
/// for gradient checks away from special points.
inline void randomize_store(ParamStore& store, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.6, 1.6);
    for (int ti = 0; ti < ParamStore::kTableCount; ++ti) {
        const auto t = static_cast<ParamStore::Table>(ti);
        if (!store.has_table(t)) continue;
        for (double& x : store.table(t))
            x = t == ParamStore::Table::SphereRadii ? radius(rng) : unif(rng);
    }
}

inline double l2_norm(const double* v, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<ModelSpec> all_model_specs(int k, int d) {
    std::vector<ModelSpec> specs;
    for (ModelKind kind : {ModelKind::TransE, ModelKind::TransH, ModelKind::TransR,
                           ModelKind::TransD, ModelKind::SphereE}) {
        for (Norm norm : {Norm::L1, Norm::L2}) {
            ModelSpec s;
            s.kind = kind;
            s.k = k;
            s.d = uses_rel_dim(kind) ? d : k;
            s.norm = norm;
            specs.push_back(s);
        }
    }
    return specs;
}

}  // namespace kgembed::testutil

#endif
