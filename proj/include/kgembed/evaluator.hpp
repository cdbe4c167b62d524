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

#ifndef KGEMBED_EVALUATOR_HPP
#define KGEMBED_EVALUATOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "kgembed/kg.hpp"
#include "kgembed/model_spec.hpp"
#include "kgembed/param_store.hpp"

namespace kgembed {

enum class Side { Head, Tail };

struct MetricSet {
    double mr = 0.0;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits10 = 0.0;
};

struct TripleRanks {
    std::int32_t raw_head = 0;
    std::int32_t filter_head = 0;
    std::int32_t raw_tail = 0;
    std::int32_t filter_tail = 0;
};

struct RankReport {
    MetricSet raw;
    MetricSet filter;
    std::vector<TripleRanks> per_triple_ranks;  // aligned with the split's triple order
    double seconds = 0.0;
};

/// Rank of the true entity on the given side: 1 + the number of candidate
/// entities scoring strictly lower (ties rank the true entity best among
/// equals). Filtered ranking skips candidates that form a golden triple other
/// than the ranked triple itself.
std::int32_t rank(const ModelSpec& spec, const ParamStore& store, const KnowledgeGraph& kg,
                  const Triple& triple, Side side, bool filtered);

/// Link-prediction metrics over the split: head- and tail-side ranks of every
/// triple, raw and filtered, pooled into 2 * |split| observations. Read-only
/// over store and kg; the report is identical for any thread count.
RankReport evaluate(const ModelSpec& spec, const ParamStore& store, const KnowledgeGraph& kg,
                    Split split, int num_threads);

/// mr / mrr / hits@k over a pooled list of ranks.
MetricSet aggregate_ranks(std::span<const std::int32_t> ranks);

}  // namespace kgembed

#endif
