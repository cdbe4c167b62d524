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

#ifndef KGEMBED_TRAINER_HPP
#define KGEMBED_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "kgembed/kg.hpp"
#include "kgembed/model_spec.hpp"
#include "kgembed/param_store.hpp"

namespace kgembed {

enum class CorruptionMode { Uniform, Bernoulli };

struct TrainConfig {
    ModelSpec spec;
    int num_epochs = 500;
    int num_threads = 1;
    double learning_rate = 0.01;
    double margin = 1.0;
    std::int64_t samples_per_epoch = 0;  // 0 -> |train|
    CorruptionMode corruption = CorruptionMode::Uniform;
    std::uint64_t seed = 1;
    ProjInit proj_init = ProjInit::Identity;

    void validate(const KnowledgeGraph& kg) const;  // throws std::invalid_argument
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;  // sum of active hinge terms
    double seconds = 0.0;
    std::int64_t active_pairs = 0;
};

/// Builds corrupted triples: replaces the head or the tail of a golden triple
/// with an entity drawn uniformly from [0, |E|), resampling until the result
/// is not a golden triple. Bernoulli mode picks the replaced side with the
/// relation-frequency weighting tph/(tph+hpt); Uniform is 50/50.
class Corruptor {
public:
    Corruptor(const KnowledgeGraph& kg, CorruptionMode mode);

    Triple operator()(const Triple& golden, std::mt19937_64& rng) const;

    /// Probability of replacing the head for this relation.
    double head_replace_prob(std::int32_t relation) const;

private:
    const KnowledgeGraph* kg_;
    CorruptionMode mode_;
    std::vector<double> head_prob_;  // per relation; Bernoulli mode only
};

struct TrainResult {
    ParamStore store;
    std::vector<EpochLog> log;
};

/// Runs the whole training loop: each epoch, each of num_threads workers
/// performs ceil(samples_per_epoch / num_threads) iterations of sample ->
/// corrupt -> hinge gate -> gradient step -> renormalize, racing on the
/// shared store without locks. Workers synchronize only at the epoch barrier.
/// Single-thread runs are bitwise reproducible for a fixed seed.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config);

/// As train(), but continues from an existing store (which must match kg and
/// config.spec in shape).
TrainResult train_from(const KnowledgeGraph& kg, const TrainConfig& config, ParamStore store);

/// Writes "epoch,loss,seconds,active_pairs" CSV, one line per epoch.
void write_epoch_log_csv(const std::vector<EpochLog>& log, const std::filesystem::path& file);

const char* to_string(CorruptionMode mode);
CorruptionMode parse_corruption_mode(const std::string& s);

}  // namespace kgembed

#endif
