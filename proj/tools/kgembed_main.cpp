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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kgembed/evaluator.hpp"
#include "kgembed/kg.hpp"
#include "kgembed/models.hpp"
#include "kgembed/param_store.hpp"
#include "kgembed/trainer.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "kgembed 0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// shared option plumbing

struct TrainOptions {
    std::string data;
    std::string out = "kgembed_out";
    std::string log;     // default: <out>/train_log.csv
    std::string config;  // optional key=value file
    std::string model = "transe";
    int dim = 50;
    int rel_dim = 0;  // 0 -> same as --dim
    int epochs = 500;
    int threads = 1;
    double lr = 0.01;
    double margin = 1.0;
    double epsilon = 0.1;
    std::string norm;  // empty -> per-model default (l1; l2 for spheree)
    std::string corruption = "uniform";
    std::string proj_init = "identity";
    long long samples_per_epoch = 0;
    unsigned long long seed = 1;
    bool freeze_radius = false;
};

void add_train_flags(CLI::App* cmd, TrainOptions& o, bool with_threads = true) {
    cmd->add_option("--data", o.data, "dataset directory (entity2id.txt etc.)")->required();
    cmd->add_option("--model", o.model, "transe|transh|transr|transd|spheree");
    cmd->add_option("--epochs", o.epochs, "number of training epochs");
    if (with_threads) cmd->add_option("--threads", o.threads, "number of lock-free workers");
    cmd->add_option("--lr", o.lr, "SGD learning rate");
    cmd->add_option("--margin", o.margin, "hinge margin");
    cmd->add_option("--dim", o.dim, "entity embedding dimension k");
    cmd->add_option("--rel-dim", o.rel_dim, "relation-space dimension d (TransR/TransD only)");
    cmd->add_option("--norm", o.norm, "l1|l2 (default l1; l2 for spheree)");
    cmd->add_option("--corruption", o.corruption, "uniform|bern negative sampling");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--epsilon", o.epsilon, "TransH orthogonality tolerance");
    cmd->add_option("--samples-per-epoch", o.samples_per_epoch,
                    "samples per epoch (default: |train|)");
    cmd->add_option("--proj-init", o.proj_init, "identity|random TransR matrix init");
    cmd->add_flag("--freeze-radius", o.freeze_radius, "do not train the SphereE radius");
    cmd->add_option("--config", o.config, "key=value config file (flags override it)");
}

/// Precedence: built-in defaults < config file < explicit CLI flags.
void apply_config_file(const CLI::App* cmd, TrainOptions& o) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw std::runtime_error("cannot open config file: " + o.config);

    auto passed = [cmd](const std::string& flag) { return cmd->count(flag) > 0; };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw UsageError(o.config + ":" + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "model") { if (!passed("--model")) o.model = value; }
            else if (key == "epochs") { if (!passed("--epochs")) o.epochs = std::stoi(value); }
            else if (key == "threads") { if (!passed("--threads")) o.threads = std::stoi(value); }
            else if (key == "lr") { if (!passed("--lr")) o.lr = std::stod(value); }
            else if (key == "margin") { if (!passed("--margin")) o.margin = std::stod(value); }
            else if (key == "dim") { if (!passed("--dim")) o.dim = std::stoi(value); }
            else if (key == "rel-dim") { if (!passed("--rel-dim")) o.rel_dim = std::stoi(value); }
            else if (key == "norm") { if (!passed("--norm")) o.norm = value; }
            else if (key == "corruption") { if (!passed("--corruption")) o.corruption = value; }
            else if (key == "seed") { if (!passed("--seed")) o.seed = std::stoull(value); }
            else if (key == "epsilon") { if (!passed("--epsilon")) o.epsilon = std::stod(value); }
            else if (key == "samples-per-epoch") { if (!passed("--samples-per-epoch")) o.samples_per_epoch = std::stoll(value); }
            else if (key == "proj-init") { if (!passed("--proj-init")) o.proj_init = value; }
            else if (key == "freeze-radius") { if (!passed("--freeze-radius")) o.freeze_radius = value == "1" || value == "true"; }
            else throw UsageError(o.config + ":" + std::to_string(line_no) + ": unknown key \"" + key + "\"");
        } catch (const std::invalid_argument&) {
            throw UsageError(o.config + ":" + std::to_string(line_no) + ": bad value for " + key);
        }
    }
}

kgembed::TrainConfig build_train_config(const CLI::App* cmd, const TrainOptions& o) {
    kgembed::TrainConfig cfg;
    cfg.spec.kind = kgembed::parse_model_kind(o.model);

    const bool rel_dim_given = cmd->count("--rel-dim") > 0 || o.rel_dim > 0;
    if (rel_dim_given && !kgembed::uses_rel_dim(cfg.spec.kind))
        throw UsageError("--rel-dim only applies to transr/transd");

    cfg.spec.k = o.dim;
    cfg.spec.d = o.rel_dim > 0 ? o.rel_dim : o.dim;
    cfg.spec.norm = o.norm.empty()
                        ? (cfg.spec.kind == kgembed::ModelKind::SphereE ? kgembed::Norm::L2
                                                                        : kgembed::Norm::L1)
                        : kgembed::parse_norm(o.norm);
    cfg.spec.epsilon = o.epsilon;
    cfg.spec.train_radius = !o.freeze_radius;
    cfg.num_epochs = o.epochs;
    cfg.num_threads = o.threads;
    cfg.learning_rate = o.lr;
    cfg.margin = o.margin;
    cfg.samples_per_epoch = o.samples_per_epoch;
    cfg.corruption = kgembed::parse_corruption_mode(o.corruption);
    cfg.seed = o.seed;
    if (o.proj_init == "identity") cfg.proj_init = kgembed::ProjInit::Identity;
    else if (o.proj_init == "random") cfg.proj_init = kgembed::ProjInit::Random;
    else throw UsageError("--proj-init must be identity or random");
    return cfg;
}

json spec_to_json(const kgembed::ModelSpec& spec) {
    return {{"model", kgembed::to_string(spec.kind)},
            {"k", spec.k},
            {"d", spec.d},
            {"norm", kgembed::to_string(spec.norm)},
            {"epsilon", spec.epsilon},
            {"train_radius", spec.train_radius}};
}

json train_config_to_json(const kgembed::TrainConfig& cfg, std::int64_t resolved_samples) {
    json j = spec_to_json(cfg.spec);
    j["epochs"] = cfg.num_epochs;
    j["threads"] = cfg.num_threads;
    j["learning_rate"] = cfg.learning_rate;
    j["margin"] = cfg.margin;
    j["samples_per_epoch"] = resolved_samples;
    j["corruption"] = kgembed::to_string(cfg.corruption);
    j["seed"] = cfg.seed;
    j["proj_init"] = cfg.proj_init == kgembed::ProjInit::Identity ? "identity" : "random";
    return j;
}

std::string make_run_id(const std::string& payload) {
    // FNV-1a over the payload plus the wall clock, rendered as 16 hex chars
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const char* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 1099511628211ULL;
        }
    };
    mix(payload.data(), payload.size());
    const auto now = std::chrono::system_clock::now().time_since_epoch().count();
    mix(reinterpret_cast<const char*>(&now), sizeof now);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json dataset_to_json(const kgembed::KnowledgeGraph& kg, const std::string& dir) {
    return {{"path", dir},
            {"entities", kg.entity_count()},
            {"relations", kg.relation_count()},
            {"train", kg.train().size()},
            {"valid", kg.valid().size()},
            {"test", kg.test().size()}};
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const CLI::App* cmd, TrainOptions& o) {
    apply_config_file(cmd, o);
    kgembed::TrainConfig cfg = build_train_config(cmd, o);

    const auto t0 = std::chrono::steady_clock::now();
    const kgembed::KnowledgeGraph kg = kgembed::KnowledgeGraph::load(o.data);
    const double load_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "loaded " << o.data << ": " << kg.entity_count() << " entities, "
              << kg.relation_count() << " relations, " << kg.train().size() << "/"
              << kg.valid().size() << "/" << kg.test().size() << " train/valid/test triples\n";

    cfg.validate(kg);
    const std::int64_t resolved_samples = cfg.samples_per_epoch > 0
                                              ? cfg.samples_per_epoch
                                              : static_cast<std::int64_t>(kg.train().size());

    std::cout << "training " << kgembed::to_string(cfg.spec.kind) << " (k=" << cfg.spec.k;
    if (kgembed::uses_rel_dim(cfg.spec.kind)) std::cout << ", d=" << cfg.spec.d;
    std::cout << ", norm=" << kgembed::to_string(cfg.spec.norm) << ", margin=" << cfg.margin
              << ", lr=" << cfg.learning_rate << ", threads=" << cfg.num_threads << ")\n";

    const auto t1 = std::chrono::steady_clock::now();
    kgembed::TrainResult result = kgembed::train(kg, cfg);
    const double train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

    for (const kgembed::EpochLog& e : result.log)
        if (result.log.size() <= 50 || e.epoch % 10 == 0 ||
            e.epoch + 1 == static_cast<int>(result.log.size()))
            std::cout << "epoch " << e.epoch << ": loss=" << e.loss << " active=" << e.active_pairs
                      << " (" << e.seconds << " s)\n";

    std::filesystem::create_directories(o.out);
    result.store.save(cfg.spec, o.out);
    const std::string log_path = o.log.empty() ? (std::filesystem::path(o.out) / "train_log.csv").string() : o.log;
    kgembed::write_epoch_log_csv(result.log, log_path);

    json manifest;
    manifest["run_id"] = make_run_id(train_config_to_json(cfg, resolved_samples).dump());
    manifest["command"] = "train";
    manifest["dataset"] = dataset_to_json(kg, o.data);
    manifest["config"] = train_config_to_json(cfg, resolved_samples);
    manifest["config_file"] = o.config;
    manifest["out"] = o.out;
    manifest["epoch_log"] = log_path;
    manifest["timings"] = {{"load_seconds", load_seconds}, {"train_seconds", train_seconds}};
    manifest["final_loss"] = result.log.empty() ? 0.0 : result.log.back().loss;
    {
        std::ofstream mf(std::filesystem::path(o.out) / "manifest.json");
        mf << manifest.dump(2) << '\n';
        if (!mf) throw std::runtime_error("cannot write manifest.json");
    }

    std::cout << "trained in " << train_seconds << " s; embeddings in " << o.out
              << ", epoch log in " << log_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& data, const std::string& embeddings, int threads,
             const std::string& split_name, const std::string& json_out) {
    const kgembed::KnowledgeGraph kg = kgembed::KnowledgeGraph::load(data);
    auto [store, spec] = kgembed::ParamStore::load(embeddings);
    if (store.entity_count() != kg.entity_count() || store.relation_count() != kg.relation_count())
        throw std::runtime_error(
            "embeddings do not match the dataset: store has " + std::to_string(store.entity_count()) +
            " entities / " + std::to_string(store.relation_count()) + " relations, dataset has " +
            std::to_string(kg.entity_count()) + " / " + std::to_string(kg.relation_count()));

    const kgembed::Split split = kgembed::parse_split(split_name);
    const kgembed::RankReport report = kgembed::evaluate(spec, store, kg, split, threads);

    std::printf("%-10s %12s %12s\n", "metric", "raw", "filter");
    std::printf("%-10s %12.2f %12.2f\n", "mr", report.raw.mr, report.filter.mr);
    std::printf("%-10s %12.4f %12.4f\n", "mrr", report.raw.mrr, report.filter.mrr);
    std::printf("%-10s %12.4f %12.4f\n", "hits@1", report.raw.hits1, report.filter.hits1);
    std::printf("%-10s %12.4f %12.4f\n", "hits@10", report.raw.hits10, report.filter.hits10);
    std::printf("wall time: %.2f s (%d threads)\n", report.seconds, threads);

    if (!json_out.empty()) {
        auto metrics = [](const kgembed::MetricSet& m) {
            return json{{"mr", m.mr}, {"mrr", m.mrr}, {"hits1", m.hits1}, {"hits10", m.hits10}};
        };
        json j = {{"split", split_name},
                  {"model", kgembed::to_string(spec.kind)},
                  {"raw", metrics(report.raw)},
                  {"filter", metrics(report.filter)},
                  {"seconds", report.seconds}};
        std::ofstream out(json_out);
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + json_out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench

std::vector<int> parse_thread_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            const int v = std::stoi(tok);
            if (v < 1) throw std::invalid_argument("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("bad --threads list entry: \"" + tok + "\"");
        }
    }
    if (out.empty()) throw UsageError("--threads list is empty");
    return out;
}

int cmd_bench(const CLI::App* cmd, TrainOptions& o, const std::string& thread_list, int repeats,
              const std::string& out_csv, const std::string& loss_csv) {
    apply_config_file(cmd, o);
    if (repeats < 1) throw UsageError("--repeats must be >= 1");
    const std::vector<int> thread_counts = parse_thread_list(thread_list);

    kgembed::TrainConfig base = build_train_config(cmd, o);
    const kgembed::KnowledgeGraph kg = kgembed::KnowledgeGraph::load(o.data);
    base.validate(kg);

    struct Row {
        int threads;
        double seconds;
        double final_loss;
        std::vector<double> epoch_losses;
    };
    std::vector<Row> rows;

    for (int p : thread_counts) {
        kgembed::TrainConfig cfg = base;
        cfg.num_threads = p;
        std::vector<double> times;
        Row row{p, 0.0, 0.0, {}};
        for (int rep = 0; rep < repeats; ++rep) {
            kgembed::TrainResult result = kgembed::train(kg, cfg);
            double total = 0.0;
            for (const kgembed::EpochLog& e : result.log) total += e.seconds;
            times.push_back(total);
            if (rep == 0) {
                for (const kgembed::EpochLog& e : result.log) row.epoch_losses.push_back(e.loss);
                row.final_loss = result.log.back().loss;
            }
        }
        std::sort(times.begin(), times.end());
        row.seconds = times[times.size() / 2];  // median damps scheduler noise
        rows.push_back(std::move(row));
        std::cerr << "threads=" << p << " median " << rows.back().seconds << " s over " << repeats
                  << " run(s)\n";
    }

    std::ostringstream csv;
    csv << "threads,seconds,speedup,final_loss\n";
    csv.precision(10);
    for (const Row& r : rows)
        csv << r.threads << ',' << r.seconds << ',' << rows.front().seconds / r.seconds << ','
            << r.final_loss << '\n';
    std::cout << csv.str();
    if (!out_csv.empty()) {
        std::ofstream f(out_csv);
        f << csv.str();
        if (!f) throw std::runtime_error("cannot write " + out_csv);
    }

    if (!loss_csv.empty()) {
        std::ofstream f(loss_csv);
        f.precision(10);
        f << "epoch";
        for (const Row& r : rows) f << ",loss_t" << r.threads;
        f << '\n';
        for (std::size_t e = 0; e < rows.front().epoch_losses.size(); ++e) {
            f << e;
            for (const Row& r : rows) f << ',' << r.epoch_losses[e];
            f << '\n';
        }
        if (!f) throw std::runtime_error("cannot write " + loss_csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel knowledge graph embedding: train, evaluate, benchmark"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    TrainOptions train_opts;
    CLI::App* train_cmd = app.add_subcommand("train", "train embeddings and save them");
    add_train_flags(train_cmd, train_opts);
    train_cmd->add_option("--out", train_opts.out, "output directory for embeddings + manifest");
    train_cmd->add_option("--log", train_opts.log, "epoch-loss CSV path (default <out>/train_log.csv)");

    std::string eval_data, eval_embeddings, eval_split = "test", eval_json;
    int eval_threads = std::max(1u, std::thread::hardware_concurrency());
    CLI::App* eval_cmd = app.add_subcommand("eval", "link-prediction metrics for saved embeddings");
    eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
    eval_cmd->add_option("--embeddings", eval_embeddings, "directory written by train")->required();
    eval_cmd->add_option("--threads", eval_threads, "evaluation threads");
    eval_cmd->add_option("--split", eval_split, "valid|test (default test)");
    eval_cmd->add_option("--json", eval_json, "also write metrics as JSON");

    TrainOptions bench_opts;
    std::string bench_threads = "1,2,4,8";
    std::string bench_csv, bench_loss_csv;
    int bench_repeats = 3;
    CLI::App* bench_cmd = app.add_subcommand("bench", "thread-scaling benchmark of training");
    add_train_flags(bench_cmd, bench_opts, /*with_threads=*/false);
    bench_cmd->add_option("--threads", bench_threads, "comma-separated worker counts, e.g. 1,2,5,8,10");
    bench_cmd->add_option("--repeats", bench_repeats, "runs per thread count (median reported)");
    bench_cmd->add_option("--csv", bench_csv, "write the summary CSV here too");
    bench_cmd->add_option("--loss-csv", bench_loss_csv, "per-epoch loss columns per thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_cmd, train_opts);
        if (eval_cmd->parsed())
            return cmd_eval(eval_data, eval_embeddings, eval_threads, eval_split, eval_json);
        if (bench_cmd->parsed())
            return cmd_bench(bench_cmd, bench_opts, bench_threads, bench_repeats, bench_csv,
                             bench_loss_csv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
