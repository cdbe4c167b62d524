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

#include "kgembed/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "kgembed/models.hpp"

namespace kgembed {

namespace {

/// Per-relation projection of the full entity table for TransR so candidate
/// sweeps cost O(d) instead of a matrix-vector product per candidate. The
/// projection routine is the one score() uses, so values stay bit-identical.
struct TransrProjectionCache {
    std::int32_t relation = -1;
    std::vector<double> projected;  // |E| x d

    const double* row(std::int32_t e, int d) const {
        return projected.data() + static_cast<std::size_t>(e) * d;
    }

    void ensure(const ParamStore& store, std::int32_t r) {
        if (relation == r) return;
        const int k = store.entity_dim();
        const int d = store.relation_dim();
        projected.resize(static_cast<std::size_t>(store.entity_count()) * d);
        const double* m = store.proj_matrix(r);
        for (std::int32_t e = 0; e < store.entity_count(); ++e)
            detail::project_transr(store.entity_vec(e), m, k, d, projected.data() +
                                                                     static_cast<std::size_t>(e) * d);
        relation = r;
    }
};

struct RankPair {
    std::int32_t raw = 0;
    std::int32_t filtered = 0;
};

/// Raw and filtered rank of the triple's true entity on one side, sharing a
/// single sweep over the candidate entities.
RankPair rank_both(const ModelSpec& spec, const ParamStore& store, const KnowledgeGraph& kg,
                   const Triple& triple, Side side, TransrProjectionCache* cache) {
    const int k = store.entity_dim();
    const int d = store.relation_dim();
    const std::int32_t entity_count = store.entity_count();
    const std::int32_t true_entity = side == Side::Head ? triple.head : triple.tail;
    const double* rel = store.relation_vec(triple.relation);

    thread_local std::vector<double> fixed_buf, cand_buf;
    fixed_buf.resize(static_cast<std::size_t>(std::max(k, d)));
    cand_buf.resize(static_cast<std::size_t>(std::max(k, d)));

    // project the fixed-side entity once; candidates are projected per entity
    // with the same routines score() uses
    const double* fixed = nullptr;
    switch (spec.kind) {
        case ModelKind::TransE:
        case ModelKind::SphereE:
            fixed = store.entity_vec(side == Side::Head ? triple.tail : triple.head);
            break;
        case ModelKind::TransH:
            detail::project_transh(store.entity_vec(side == Side::Head ? triple.tail : triple.head),
                                   store.normal_vec(triple.relation), k, fixed_buf.data());
            fixed = fixed_buf.data();
            break;
        case ModelKind::TransR:
            cache->ensure(store, triple.relation);
            fixed = cache->row(side == Side::Head ? triple.tail : triple.head, d);
            break;
        case ModelKind::TransD:
            detail::project_transd(store.entity_vec(side == Side::Head ? triple.tail : triple.head),
                                   store.entity_proj_vec(side == Side::Head ? triple.tail
                                                                            : triple.head),
                                   store.relation_proj_vec(triple.relation), k, d,
                                   fixed_buf.data());
            fixed = fixed_buf.data();
            break;
    }

    const int m = spec.relation_dim();
    const double radius = spec.kind == ModelKind::SphereE ? store.sphere_radius(triple.relation) : 0.0;

    auto candidate_score = [&](std::int32_t e) -> double {
        const double* cand = nullptr;
        switch (spec.kind) {
            case ModelKind::TransE:
            case ModelKind::SphereE:
                cand = store.entity_vec(e);
                break;
            case ModelKind::TransH:
                detail::project_transh(store.entity_vec(e), store.normal_vec(triple.relation), k,
                                       cand_buf.data());
                cand = cand_buf.data();
                break;
            case ModelKind::TransR:
                cand = cache->row(e, d);
                break;
            case ModelKind::TransD:
                detail::project_transd(store.entity_vec(e), store.entity_proj_vec(e),
                                       store.relation_proj_vec(triple.relation), k, d,
                                       cand_buf.data());
                cand = cand_buf.data();
                break;
        }
        const double* hp = side == Side::Head ? cand : fixed;
        const double* tp = side == Side::Head ? fixed : cand;
        const double value = detail::translational_score(hp, rel, tp, m, spec.norm);
        if (spec.kind == ModelKind::SphereE) return std::abs(value - radius * radius);
        return value;
    };

    const double true_score = candidate_score(true_entity);

    std::int32_t raw_below = 0, filtered_below = 0;
    Triple candidate = triple;
    for (std::int32_t e = 0; e < entity_count; ++e) {
        if (e == true_entity) continue;
        if (candidate_score(e) < true_score) {
            ++raw_below;
            (side == Side::Head ? candidate.head : candidate.tail) = e;
            if (!kg.contains(candidate)) ++filtered_below;
        }
    }
    return {raw_below + 1, filtered_below + 1};
}

}  // namespace

std::int32_t rank(const ModelSpec& spec, const ParamStore& store, const KnowledgeGraph& kg,
                  const Triple& triple, Side side, bool filtered) {
    TransrProjectionCache cache;
    const RankPair pair = rank_both(spec, store, kg, triple, side, &cache);
    return filtered ? pair.filtered : pair.raw;
}

MetricSet aggregate_ranks(std::span<const std::int32_t> ranks) {
    if (ranks.empty()) throw std::invalid_argument("no ranks to aggregate");
    double sum_rank = 0.0, sum_reciprocal = 0.0;
    std::int64_t hits1 = 0, hits10 = 0;
    for (std::int32_t r : ranks) {
        sum_rank += r;
        sum_reciprocal += 1.0 / r;
        if (r <= 1) ++hits1;
        if (r <= 10) ++hits10;
    }
    const double n = static_cast<double>(ranks.size());
    return {sum_rank / n, sum_reciprocal / n, hits1 / n, hits10 / n};
}

RankReport evaluate(const ModelSpec& spec, const ParamStore& store, const KnowledgeGraph& kg,
                    Split split, int num_threads) {
    const std::vector<Triple>& triples = kg.triples(split);
    if (triples.empty()) throw std::invalid_argument(std::string("empty split: ") + to_string(split));
    if (num_threads < 1) throw std::invalid_argument("num_threads must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = triples.size();

    // group triples by relation so the TransR projection cache is reused;
    // ranks land at their original index, so the output is order-independent
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (spec.kind == ModelKind::TransR)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return triples[a].relation < triples[b].relation;
        });

    std::vector<TripleRanks> ranks(n);
    const int p = std::min<int>(num_threads, static_cast<int>(n));
    auto run_chunk = [&](std::size_t begin, std::size_t end) {
        TransrProjectionCache cache;
        for (std::size_t i = begin; i < end; ++i) {
            const Triple& t = triples[order[i]];
            const RankPair head = rank_both(spec, store, kg, t, Side::Head, &cache);
            const RankPair tail = rank_both(spec, store, kg, t, Side::Tail, &cache);
            ranks[order[i]] = {head.raw, head.filtered, tail.raw, tail.filtered};
        }
    };
    if (p == 1) {
        run_chunk(0, n);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(p));
        for (int w = 0; w < p; ++w) {
            const std::size_t begin = n * w / p;
            const std::size_t end = n * (w + 1) / p;
            threads.emplace_back(run_chunk, begin, end);
        }
        for (std::thread& t : threads) t.join();
    }

    // serial aggregation in triple order keeps the report independent of the
    // worker count
    std::vector<std::int32_t> raw_pool, filter_pool;
    raw_pool.reserve(2 * n);
    filter_pool.reserve(2 * n);
    for (const TripleRanks& r : ranks) {
        raw_pool.push_back(r.raw_head);
        raw_pool.push_back(r.raw_tail);
        filter_pool.push_back(r.filter_head);
        filter_pool.push_back(r.filter_tail);
    }

    RankReport report;
    report.raw = aggregate_ranks(raw_pool);
    report.filter = aggregate_ranks(filter_pool);
    report.per_triple_ranks = std::move(ranks);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace kgembed
