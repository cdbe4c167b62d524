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

#include <cmath>
#include <set>

#include "doctest.h"
#include "kgembed/models.hpp"
#include "test_util.hpp"

using namespace kgembed;

namespace {

constexpr std::int32_t kEntities = 7;
constexpr std::int32_t kRelations = 3;

/// One scalar parameter, addressed by table and flat index.
struct ParamRef {
    ParamStore::Table table;
    std::size_t index;
    auto operator<=>(const ParamRef&) const = default;
};

std::vector<ParamRef> touched_params(const ModelSpec& spec, const ParamStore& store,
                                     const Triple& golden, const Triple& corrupted) {
    std::set<ParamRef> refs;
    const int k = store.entity_dim();
    const int d = store.relation_dim();
    auto add_row = [&refs](ParamStore::Table t, std::size_t row, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) refs.insert({t, row * len + i});
    };
    for (std::int32_t e : {golden.head, golden.tail, corrupted.head, corrupted.tail}) {
        add_row(ParamStore::Table::EntityVecs, static_cast<std::size_t>(e), k);
        if (spec.kind == ModelKind::TransD)
            add_row(ParamStore::Table::EntityProjVecs, static_cast<std::size_t>(e), k);
    }
    const auto r = static_cast<std::size_t>(golden.relation);
    add_row(ParamStore::Table::RelationVecs, r, d);
    switch (spec.kind) {
        case ModelKind::TransH: add_row(ParamStore::Table::NormalVecs, r, k); break;
        case ModelKind::TransR:
            add_row(ParamStore::Table::ProjMatrices, r, static_cast<std::size_t>(k) * d);
            break;
        case ModelKind::TransD: add_row(ParamStore::Table::RelationProjVecs, r, d); break;
        case ModelKind::SphereE: add_row(ParamStore::Table::SphereRadii, r, 1); break;
        default: break;
    }
    return {refs.begin(), refs.end()};
}

double hinge_objective(const ModelSpec& spec, const ParamStore& store, const Triple& golden,
                       const Triple& corrupted) {
    return score_value(spec, store, golden) - score_value(spec, store, corrupted);
}

/// Random parameter point that stays clear of the non-differentiable sets
/// (L1 kinks, zero L2 residuals, the sphere surface).
bool differentiable_point(const ModelSpec& spec, const ParamStore& store, const Triple& t) {
    const ScoreBreakdown b = score(spec, store, t);
    if (spec.norm == Norm::L1) {
        for (double u : b.residual)
            if (std::abs(u) < 5e-3) return false;
    } else {
        double n2 = 0.0;
        for (double u : b.residual) n2 += u * u;
        if (std::sqrt(n2) < 5e-3) return false;
    }
    if (spec.kind == ModelKind::SphereE && b.value < 5e-3) return false;
    return true;
}

struct RandomPair {
    Triple golden, corrupted;
};

RandomPair random_pair(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int32_t> pick_e(0, kEntities - 1);
    std::uniform_int_distribution<std::int32_t> pick_r(0, kRelations - 1);
    Triple golden{pick_e(rng), pick_r(rng), pick_e(rng)};
    Triple corrupted = golden;
    if (rng() & 1)
        corrupted.head = pick_e(rng);
    else
        corrupted.tail = pick_e(rng);
    return {golden, corrupted};
}

/// Max relative disagreement between gradient_step's analytic gradient and a
/// central finite difference of s(golden) - s(corrupted), over every touched
/// parameter.
double fd_worst_error(const ModelSpec& spec, std::mt19937_64& rng) {
    ParamStore store = ParamStore::init(spec, kEntities, kRelations, rng());
    RandomPair pair{};
    do {
        testutil::randomize_store(store, rng);
        pair = random_pair(rng);
    } while (!differentiable_point(spec, store, pair.golden) ||
             !differentiable_point(spec, store, pair.corrupted));

    // the update is linear in the learning rate, so (before - after) / lr
    // recovers the analytic gradient exactly
    const double lr = 1.0;
    ParamStore stepped = store;
    gradient_step(spec, stepped, pair.golden, pair.corrupted, lr);

    const double h = 1e-5;
    double worst = 0.0;
    for (const ParamRef& ref : touched_params(spec, store, pair.golden, pair.corrupted)) {
        const double analytic =
            (store.table(ref.table)[ref.index] - stepped.table(ref.table)[ref.index]) / lr;

        ParamStore probe = store;
        double& theta = probe.table(ref.table)[ref.index];
        const double saved = theta;
        theta = saved + h;
        const double up = hinge_objective(spec, probe, pair.golden, pair.corrupted);
        theta = saved - h;
        const double down = hinge_objective(spec, probe, pair.golden, pair.corrupted);
        const double fd = (up - down) / (2.0 * h);

        worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
    }
    return worst;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("score matches the hand-computed cases") {
    SUBCASE("TransE zero residual and L1 norm") {
        ModelSpec spec;
        spec.kind = ModelKind::TransE;
        spec.k = 2;
        spec.norm = Norm::L2;
        ParamStore store = ParamStore::init(spec, 2, 1, 1);
        double* h = store.entity_vec(0);
        double* t = store.entity_vec(1);
        double* r = store.relation_vec(0);
        h[0] = 1; h[1] = 0;
        r[0] = 0; r[1] = 1;
        t[0] = 1; t[1] = 1;
        CHECK(score_value(spec, store, {0, 0, 1}) == 0.0);

        spec.norm = Norm::L1;
        h[0] = 0.6; h[1] = 0.8;
        r[0] = 0; r[1] = 0;
        t[0] = 0; t[1] = 0;
        CHECK(score_value(spec, store, {0, 0, 1}) == doctest::Approx(1.4).epsilon(1e-12));
    }

    SUBCASE("TransH projects onto the hyperplane") {
        ModelSpec spec;
        spec.kind = ModelKind::TransH;
        spec.k = 2;
        spec.norm = Norm::L2;
        ParamStore store = ParamStore::init(spec, 2, 1, 1);
        double* h = store.entity_vec(0);
        double* t = store.entity_vec(1);
        double* w = store.normal_vec(0);
        double* d = store.relation_vec(0);
        h[0] = 1; h[1] = 0;
        t[0] = 0; t[1] = 1;
        w[0] = 0; w[1] = 1;
        d[0] = -1; d[1] = 0;
        // projections give (1,0) and (0,0); (1,0) + (-1,0) - (0,0) = 0
        CHECK(score_value(spec, store, {0, 0, 1}) == 0.0);
    }

    SUBCASE("SphereE on-sphere case") {
        ModelSpec spec;
        spec.kind = ModelKind::SphereE;
        spec.k = 2;
        spec.norm = Norm::L2;
        ParamStore store = ParamStore::init(spec, 2, 1, 1);
        double* h = store.entity_vec(0);
        double* t = store.entity_vec(1);
        double* r = store.relation_vec(0);
        h[0] = 1; h[1] = 0;
        r[0] = 0; r[1] = 0;
        t[0] = 0; t[1] = 0;
        store.sphere_radius(0) = 1.0;
        CHECK(score_value(spec, store, {0, 0, 1}) == 0.0);
        const ScoreBreakdown b = score(spec, store, {0, 0, 1});
        CHECK(b.inner_norm == doctest::Approx(1.0));
    }
}

TEST_CASE("TransR with identity matrices and TransD with zero projections reduce to TransE") {
    std::mt19937_64 rng(31);
    ModelSpec te;
    te.kind = ModelKind::TransE;
    te.k = 6;
    ParamStore te_store = ParamStore::init(te, kEntities, kRelations, 4);

    for (Norm norm : {Norm::L1, Norm::L2}) {
        te.norm = norm;

        ModelSpec tr;
        tr.kind = ModelKind::TransR;
        tr.k = 6;
        tr.d = 6;
        tr.norm = norm;
        ParamStore tr_store = ParamStore::init(tr, kEntities, kRelations, 4);
        tr_store.table(ParamStore::Table::EntityVecs) = te_store.table(ParamStore::Table::EntityVecs);
        tr_store.table(ParamStore::Table::RelationVecs) =
            te_store.table(ParamStore::Table::RelationVecs);

        ModelSpec td;
        td.kind = ModelKind::TransD;
        td.k = 6;
        td.d = 6;
        td.norm = norm;
        ParamStore td_store = ParamStore::init(td, kEntities, kRelations, 4);
        td_store.table(ParamStore::Table::EntityVecs) = te_store.table(ParamStore::Table::EntityVecs);
        td_store.table(ParamStore::Table::RelationVecs) =
            te_store.table(ParamStore::Table::RelationVecs);

        std::uniform_int_distribution<std::int32_t> pick_e(0, kEntities - 1);
        std::uniform_int_distribution<std::int32_t> pick_r(0, kRelations - 1);
        for (int i = 0; i < 50; ++i) {
            const Triple t{pick_e(rng), pick_r(rng), pick_e(rng)};
            const double base = score_value(te, te_store, t);
            CHECK(std::abs(score_value(tr, tr_store, t) - base) <= 1e-12);
            CHECK(std::abs(score_value(td, td_store, t) - base) <= 1e-12);
        }
    }
}

TEST_CASE("TransE score is invariant to translating head and tail together") {
    ModelSpec spec;
    spec.kind = ModelKind::TransE;
    spec.k = 5;
    std::mt19937_64 rng(17);
    for (Norm norm : {Norm::L1, Norm::L2}) {
        spec.norm = norm;
        ParamStore store = ParamStore::init(spec, 2, 1, 9);
        testutil::randomize_store(store, rng);
        const double before = score_value(spec, store, {0, 0, 1});

        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        double shift[5];
        for (double& c : shift) c = unif(rng);
        for (int i = 0; i < 5; ++i) {
            store.entity_vec(0)[i] += shift[i];
            store.entity_vec(1)[i] += shift[i];
        }
        CHECK(std::abs(score_value(spec, store, {0, 0, 1}) - before) <= 1e-12);
    }
}

TEST_CASE("scores are non-negative everywhere") {
    std::mt19937_64 rng(23);
    for (const ModelSpec& spec : testutil::all_model_specs(5, 3)) {
        ParamStore store = ParamStore::init(spec, kEntities, kRelations, rng());
        testutil::randomize_store(store, rng);
        std::uniform_int_distribution<std::int32_t> pick_e(0, kEntities - 1);
        std::uniform_int_distribution<std::int32_t> pick_r(0, kRelations - 1);
        for (int i = 0; i < 40; ++i) {
            const double s = score_value(spec, store, {pick_e(rng), pick_r(rng), pick_e(rng)});
            CHECK(s >= 0.0);
        }
    }
}

TEST_CASE("analytic gradients agree with central finite differences") {
    // the oracle recomputes scores at perturbed parameters; 20 random points
    // per model/norm here, the acceptance suite runs the full 100
    std::mt19937_64 rng(101);
    for (const ModelSpec& spec : testutil::all_model_specs(5, 4)) {
        CAPTURE(to_string(spec.kind));
        CAPTURE(to_string(spec.norm));
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) worst = std::max(worst, fd_worst_error(spec, rng));
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("TransD gradients stay correct when d > k") {
    std::mt19937_64 rng(7);
    ModelSpec spec;
    spec.kind = ModelKind::TransD;
    spec.k = 3;
    spec.d = 6;
    for (Norm norm : {Norm::L1, Norm::L2}) {
        spec.norm = norm;
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) worst = std::max(worst, fd_worst_error(spec, rng));
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("zero learning rate leaves the store bitwise unchanged") {
    std::mt19937_64 rng(3);
    for (const ModelSpec& spec : testutil::all_model_specs(4, 3)) {
        ParamStore store = ParamStore::init(spec, kEntities, kRelations, 12);
        testutil::randomize_store(store, rng);
        const ParamStore before = store;
        gradient_step(spec, store, {0, 1, 2}, {3, 1, 2}, 0.0);
        for (int ti = 0; ti < ParamStore::kTableCount; ++ti) {
            const auto t = static_cast<ParamStore::Table>(ti);
            if (store.has_table(t)) CHECK(store.table(t) == before.table(t));
        }
    }
}

TEST_CASE("zero golden residual contributes no golden-side gradient") {
    ModelSpec spec;
    spec.kind = ModelKind::TransE;
    spec.k = 3;
    spec.norm = Norm::L2;
    ParamStore store = ParamStore::init(spec, 6, 2, 5);
    // force t = h + r on the golden triple (0, 0, 1)
    for (int i = 0; i < 3; ++i)
        store.entity_vec(1)[i] = store.entity_vec(0)[i] + store.relation_vec(0)[i];

    const std::vector<double> h_before(store.entity_vec(0), store.entity_vec(0) + 3);
    const std::vector<double> t_before(store.entity_vec(1), store.entity_vec(1) + 3);
    // corrupted triple on disjoint entity rows; only r is shared
    gradient_step(spec, store, {0, 0, 1}, {4, 0, 5}, 0.05);

    for (int i = 0; i < 3; ++i) {
        CHECK(store.entity_vec(0)[i] == h_before[i]);
        CHECK(store.entity_vec(1)[i] == t_before[i]);
    }
}

TEST_CASE("rows untouched by either triple never move") {
    std::mt19937_64 rng(41);
    for (const ModelSpec& spec : testutil::all_model_specs(4, 3)) {
        ParamStore store = ParamStore::init(spec, kEntities, kRelations, 15);
        testutil::randomize_store(store, rng);
        const ParamStore before = store;
        gradient_step(spec, store, {0, 0, 1}, {2, 0, 1}, 0.1);

        // entity 5 and relation 2 are spectators
        for (int i = 0; i < spec.k; ++i)
            CHECK(store.entity_vec(5)[i] == before.entity_vec(5)[i]);
        for (int i = 0; i < spec.relation_dim(); ++i)
            CHECK(store.relation_vec(2)[i] == before.relation_vec(2)[i]);
    }
}

TEST_CASE("a small step on an active pair decreases the hinge term") {
    std::mt19937_64 rng(59);
    const double margin = 1.0;
    for (const ModelSpec& spec : testutil::all_model_specs(5, 4)) {
        CAPTURE(to_string(spec.kind));
        int checked = 0;
        while (checked < 10) {
            ParamStore store = ParamStore::init(spec, kEntities, kRelations, rng());
            testutil::randomize_store(store, rng);
            const RandomPair pair = random_pair(rng);
            if (pair.corrupted == pair.golden) continue;  // degenerate pair, zero objective
            if (!differentiable_point(spec, store, pair.golden) ||
                !differentiable_point(spec, store, pair.corrupted))
                continue;
            const double before =
                score_value(spec, store, pair.golden) + margin - score_value(spec, store, pair.corrupted);
            if (before <= 0.0) continue;  // hinge gate: caller would skip
            gradient_step(spec, store, pair.golden, pair.corrupted, 1e-4);
            const double after =
                score_value(spec, store, pair.golden) + margin - score_value(spec, store, pair.corrupted);
            CHECK(after < before);
            ++checked;
        }
    }
}

TEST_CASE("SphereE radius can be frozen") {
    ModelSpec spec;
    spec.kind = ModelKind::SphereE;
    spec.k = 4;
    spec.train_radius = false;
    std::mt19937_64 rng(19);
    ParamStore store = ParamStore::init(spec, kEntities, kRelations, 2);
    testutil::randomize_store(store, rng);
    const double radius_before = store.sphere_radius(1);
    gradient_step(spec, store, {0, 1, 2}, {3, 1, 2}, 0.1);
    CHECK(store.sphere_radius(1) == radius_before);

    spec.train_radius = true;
    ParamStore store2 = ParamStore::init(spec, kEntities, kRelations, 2);
    testutil::randomize_store(store2, rng);
    const double radius2_before = store2.sphere_radius(1);
    gradient_step(spec, store2, {0, 1, 2}, {3, 1, 2}, 0.1);
    CHECK(store2.sphere_radius(1) != radius2_before);
}

}  // TEST_SUITE
