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

#include "kgembed/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "kgembed/models.hpp"

namespace kgembed {

void TrainConfig::validate(const KnowledgeGraph& kg) const {
    spec.validate();
    if (num_epochs < 1) throw std::invalid_argument("num_epochs must be >= 1");
    if (num_threads < 1) throw std::invalid_argument("num_threads must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be > 0");
    if (samples_per_epoch < 0) throw std::invalid_argument("samples_per_epoch must be >= 0");
    if (kg.train().empty()) throw std::invalid_argument("training split is empty");
}

Corruptor::Corruptor(const KnowledgeGraph& kg, CorruptionMode mode) : kg_(&kg), mode_(mode) {
    if (mode_ != CorruptionMode::Bernoulli) return;
    // tph/(tph+hpt) per relation, from the training split
    const std::int32_t nrel = kg.relation_count();
    std::vector<std::unordered_set<std::int64_t>> head_pairs(nrel), tail_pairs(nrel);
    std::vector<std::int64_t> triples_per_rel(nrel, 0);
    for (const Triple& t : kg.train()) {
        ++triples_per_rel[t.relation];
        head_pairs[t.relation].insert(t.head);
        tail_pairs[t.relation].insert(t.tail);
    }
    head_prob_.assign(nrel, 0.5);
    for (std::int32_t r = 0; r < nrel; ++r) {
        if (triples_per_rel[r] == 0) continue;  // relation unseen in train: fall back to 50/50
        const double tph = static_cast<double>(triples_per_rel[r]) / head_pairs[r].size();
        const double hpt = static_cast<double>(triples_per_rel[r]) / tail_pairs[r].size();
        head_prob_[r] = tph / (tph + hpt);
    }
}

double Corruptor::head_replace_prob(std::int32_t relation) const {
    return mode_ == CorruptionMode::Bernoulli ? head_prob_[relation] : 0.5;
}

Triple Corruptor::operator()(const Triple& golden, std::mt19937_64& rng) const {
    const std::int32_t entity_count = kg_->entity_count();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const bool replace_head = coin(rng) < head_replace_prob(golden.relation);

    std::uniform_int_distribution<std::int32_t> pick(0, entity_count - 1);
    Triple corrupted = golden;
    for (std::int32_t attempt = 0; attempt < entity_count; ++attempt) {
        (replace_head ? corrupted.head : corrupted.tail) = pick(rng);
        if (!kg_->contains(corrupted)) return corrupted;
    }
    throw std::runtime_error(
        "corrupt: no non-golden candidate found for (" + std::to_string(golden.head) + ", " +
        std::to_string(golden.relation) + ", " + std::to_string(golden.tail) + ") after " +
        std::to_string(entity_count) + " resamples");
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config) {
    config.validate(kg);
    ParamStore store = ParamStore::init(config.spec, kg.entity_count(), kg.relation_count(),
                                        config.seed, config.proj_init);
    return train_from(kg, config, std::move(store));
}

TrainResult train_from(const KnowledgeGraph& kg, const TrainConfig& config, ParamStore store) {
    config.validate(kg);
    if (store.entity_count() != kg.entity_count() || store.relation_count() != kg.relation_count())
        throw std::invalid_argument("store shape does not match the graph");

    const std::vector<Triple>& train_triples = kg.train();
    const std::int64_t samples = config.samples_per_epoch > 0
                                     ? config.samples_per_epoch
                                     : static_cast<std::int64_t>(train_triples.size());
    const int p = config.num_threads;
    const std::int64_t iters_per_worker = (samples + p - 1) / p;

    const Corruptor corrupt(kg, config.corruption);

    // one RNG stream per worker, persisting across epochs
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(static_cast<std::size_t>(p));
    for (int w = 0; w < p; ++w) rngs.emplace_back(config.seed + static_cast<std::uint64_t>(w));

    std::atomic<bool> abort_flag{false};
    std::mutex error_mutex;
    std::string error_message;

    std::vector<double> worker_loss(static_cast<std::size_t>(p));
    std::vector<std::int64_t> worker_active(static_cast<std::size_t>(p));

    auto worker = [&](int w, int epoch) {
        std::mt19937_64& rng = rngs[static_cast<std::size_t>(w)];
        std::uniform_int_distribution<std::size_t> pick(0, train_triples.size() - 1);
        double loss = 0.0;
        std::int64_t active = 0;
        for (std::int64_t it = 0; it < iters_per_worker; ++it) {
            if (abort_flag.load(std::memory_order_relaxed)) break;
            const Triple golden = train_triples[pick(rng)];
            const Triple corrupted = corrupt(golden, rng);
            const double s_golden = score_value(config.spec, store, golden);
            const double s_corrupted = score_value(config.spec, store, corrupted);
            if (!std::isfinite(s_golden) || !std::isfinite(s_corrupted)) {
                const Triple& bad = std::isfinite(s_golden) ? corrupted : golden;
                std::lock_guard<std::mutex> lock(error_mutex);
                if (error_message.empty())
                    error_message = "non-finite score at epoch " + std::to_string(epoch) +
                                    " for triple (" + std::to_string(bad.head) + ", " +
                                    std::to_string(bad.relation) + ", " + std::to_string(bad.tail) +
                                    ")";
                abort_flag.store(true, std::memory_order_relaxed);
                break;
            }
            const double hinge = s_golden + config.margin - s_corrupted;
            if (hinge > 0.0) {
                gradient_step(config.spec, store, golden, corrupted, config.learning_rate);
                const std::int32_t entities[4] = {golden.head, golden.tail, corrupted.head,
                                                  corrupted.tail};
                const std::int32_t relations[1] = {golden.relation};
                store.renormalize(config.spec, entities, relations);
                loss += hinge;
                ++active;
            }
        }
        worker_loss[static_cast<std::size_t>(w)] = loss;
        worker_active[static_cast<std::size_t>(w)] = active;
    };

    std::vector<EpochLog> log;
    log.reserve(static_cast<std::size_t>(config.num_epochs));
    for (int epoch = 0; epoch < config.num_epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        if (p == 1) {
            worker(0, epoch);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(p));
            for (int w = 0; w < p; ++w) threads.emplace_back(worker, w, epoch);
            for (std::thread& t : threads) t.join();  // epoch barrier
        }
        if (abort_flag.load()) {
            std::lock_guard<std::mutex> lock(error_mutex);
            throw std::runtime_error(error_message);
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        EpochLog entry;
        entry.epoch = epoch;
        for (int w = 0; w < p; ++w) {
            entry.loss += worker_loss[static_cast<std::size_t>(w)];
            entry.active_pairs += worker_active[static_cast<std::size_t>(w)];
        }
        entry.seconds = seconds;
        log.push_back(entry);
    }

    return {std::move(store), std::move(log)};
}

void write_epoch_log_csv(const std::vector<EpochLog>& log, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "epoch,loss,seconds,active_pairs\n";
    out.precision(10);
    for (const EpochLog& e : log)
        out << e.epoch << ',' << e.loss << ',' << e.seconds << ',' << e.active_pairs << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

const char* to_string(CorruptionMode mode) {
    return mode == CorruptionMode::Uniform ? "uniform" : "bern";
}

CorruptionMode parse_corruption_mode(const std::string& s) {
    if (s == "uniform") return CorruptionMode::Uniform;
    if (s == "bern" || s == "bernoulli") return CorruptionMode::Bernoulli;
    throw std::invalid_argument("unknown corruption mode: " + s + " (expected uniform or bern)");
}

}  // namespace kgembed
