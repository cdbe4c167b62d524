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

#include "kgembed/param_store.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kgembed {

namespace {

constexpr double kUnitBand = 1e-12;     // |n^2 - 1| band treated as already unit
constexpr double kIneqBand = 1e-12;     // slack on squared-norm inequality checks

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void unit_normalize(std::span<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        v[0] = 1.0;
        return;
    }
    if (std::abs(n2 - 1.0) <= kUnitBand) return;  // keeps renormalize idempotent
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
}

std::size_t ParamStore::row_length(Table t, int k, int d) {
    switch (t) {
        case Table::EntityVecs: return static_cast<std::size_t>(k);
        case Table::RelationVecs: return static_cast<std::size_t>(d);
        case Table::NormalVecs: return static_cast<std::size_t>(k);
        case Table::ProjMatrices: return static_cast<std::size_t>(k) * d;
        case Table::EntityProjVecs: return static_cast<std::size_t>(k);
        case Table::RelationProjVecs: return static_cast<std::size_t>(d);
        case Table::SphereRadii: return 1;
    }
    throw std::logic_error("bad table");
}

const char* ParamStore::table_file_name(Table t) {
    switch (t) {
        case Table::EntityVecs: return "entity_vecs.txt";
        case Table::RelationVecs: return "relation_vecs.txt";
        case Table::NormalVecs: return "normal_vecs.txt";
        case Table::ProjMatrices: return "proj_matrices.txt";
        case Table::EntityProjVecs: return "entity_proj_vecs.txt";
        case Table::RelationProjVecs: return "relation_proj_vecs.txt";
        case Table::SphereRadii: return "sphere_radii.txt";
    }
    throw std::logic_error("bad table");
}

std::vector<double>& ParamStore::table(Table t) {
    switch (t) {
        case Table::EntityVecs: return entity_vecs_;
        case Table::RelationVecs: return relation_vecs_;
        case Table::NormalVecs: return normal_vecs_;
        case Table::ProjMatrices: return proj_matrices_;
        case Table::EntityProjVecs: return entity_proj_vecs_;
        case Table::RelationProjVecs: return relation_proj_vecs_;
        case Table::SphereRadii: return sphere_radii_;
    }
    throw std::logic_error("bad table");
}

const std::vector<double>& ParamStore::table(Table t) const {
    return const_cast<ParamStore*>(this)->table(t);
}

void ParamStore::allocate(const ModelSpec& spec, std::int32_t entity_count,
                          std::int32_t relation_count) {
    spec.validate();
    if (entity_count < 1 || relation_count < 1)
        throw std::invalid_argument("entity/relation counts must be >= 1");

    entity_count_ = entity_count;
    relation_count_ = relation_count;
    k_ = spec.k;
    d_ = spec.relation_dim();

    const std::size_t e = static_cast<std::size_t>(entity_count);
    const std::size_t r = static_cast<std::size_t>(relation_count);
    entity_vecs_.assign(e * k_, 0.0);
    relation_vecs_.assign(r * d_, 0.0);
    switch (spec.kind) {
        case ModelKind::TransE: break;
        case ModelKind::TransH: normal_vecs_.assign(r * k_, 0.0); break;
        case ModelKind::TransR: proj_matrices_.assign(r * k_ * d_, 0.0); break;
        case ModelKind::TransD:
            entity_proj_vecs_.assign(e * k_, 0.0);
            relation_proj_vecs_.assign(r * d_, 0.0);
            break;
        case ModelKind::SphereE: sphere_radii_.assign(r, 1.0); break;
    }
}

ParamStore ParamStore::init(const ModelSpec& spec, std::int32_t entity_count,
                            std::int32_t relation_count, std::uint64_t seed, ProjInit proj_init) {
    ParamStore store;
    store.allocate(spec, entity_count, relation_count);

    std::mt19937_64 rng(seed);
    auto fill_unit_rows = [&rng](std::vector<double>& tbl, std::size_t rows, int dim) {
        std::uniform_real_distribution<double> unif(-6.0 / std::sqrt(static_cast<double>(dim)),
                                                    6.0 / std::sqrt(static_cast<double>(dim)));
        for (std::size_t i = 0; i < rows; ++i) {
            std::span<double> row(tbl.data() + i * dim, static_cast<std::size_t>(dim));
            for (double& x : row) x = unif(rng);
            unit_normalize(row);
        }
    };

    fill_unit_rows(store.entity_vecs_, static_cast<std::size_t>(entity_count), store.k_);
    fill_unit_rows(store.relation_vecs_, static_cast<std::size_t>(relation_count), store.d_);
    if (spec.kind == ModelKind::TransH)
        fill_unit_rows(store.normal_vecs_, static_cast<std::size_t>(relation_count), store.k_);

    if (spec.kind == ModelKind::TransR) {
        if (proj_init == ProjInit::Identity) {
            // identity-padded: the model starts exactly as TransE
            for (std::int32_t r = 0; r < relation_count; ++r) {
                double* m = store.proj_matrix(r);
                for (int i = 0; i < std::min(store.k_, store.d_); ++i) m[i * store.d_ + i] = 1.0;
            }
        } else {
            std::uniform_real_distribution<double> unif(
                -6.0 / std::sqrt(static_cast<double>(store.k_)),
                6.0 / std::sqrt(static_cast<double>(store.k_)));
            for (double& x : store.proj_matrices_) x = unif(rng);
        }
    }
    // TransD projection vectors stay zero; SphereE radii stay one.

    // Start feasible: project the inequality constraints everywhere. Identity
    // matrices and zero projection vectors already satisfy them, so only
    // TransH (and random TransR matrices) do real work here.
    if (spec.kind == ModelKind::TransH ||
        (spec.kind == ModelKind::TransR && proj_init == ProjInit::Random)) {
        std::vector<std::int32_t> all_entities(static_cast<std::size_t>(entity_count));
        for (std::int32_t e = 0; e < entity_count; ++e) all_entities[e] = e;
        std::vector<std::int32_t> all_relations(static_cast<std::size_t>(relation_count));
        for (std::int32_t r = 0; r < relation_count; ++r) all_relations[r] = r;
        if (spec.kind == ModelKind::TransH)
            store.renormalize(spec, {}, all_relations);
        else
            store.renormalize(spec, all_entities, all_relations);
    }
    return store;
}

void ParamStore::renormalize(const ModelSpec& spec, std::span<const std::int32_t> entities,
                             std::span<const std::int32_t> relations) {
    const int k = k_;
    const int d = d_;

    for (std::int32_t e : entities) unit_normalize({entity_vec(e), static_cast<std::size_t>(k)});

    for (std::int32_t r : relations) {
        unit_normalize({relation_vec(r), static_cast<std::size_t>(d)});
        if (spec.kind == ModelKind::TransH) {
            double* w = normal_vec(r);
            double* dr = relation_vec(r);
            unit_normalize({w, static_cast<std::size_t>(k)});
            const double wd = dot(w, dr, k);
            if (std::abs(wd) > spec.epsilon) {
                // drop the w-parallel component, then restore unit norm
                for (int i = 0; i < k; ++i) dr[i] -= wd * w[i];
                unit_normalize({dr, static_cast<std::size_t>(k)});
            }
        }
    }

    thread_local std::vector<double> proj;  // scratch; renormalize runs on worker threads
    proj.resize(static_cast<std::size_t>(d));

    switch (spec.kind) {
        case ModelKind::TransR:
            for (std::int32_t r : relations) {
                double* m = proj_matrix(r);
                double max_n2 = 0.0;
                for (std::int32_t e : entities) {
                    const double* ev = entity_vec(e);
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (int i = 0; i < k; ++i) s += ev[i] * m[i * d + j];
                        proj[j] = s;
                    }
                    max_n2 = std::max(max_n2, dot(proj.data(), proj.data(), d));
                }
                // shrinking M_r restores ||M_r e|| <= 1 for every touched
                // entity without disturbing the unit entity rows
                if (max_n2 > 1.0 + kIneqBand) {
                    const double inv = 1.0 / std::sqrt(max_n2);
                    for (int i = 0; i < k * d; ++i) m[i] *= inv;
                }
            }
            break;
        case ModelKind::TransD:
            for (std::int32_t r : relations) {
                const double* rp = relation_proj_vec(r);
                for (std::int32_t e : entities) {
                    const double* ev = entity_vec(e);
                    double* ep = entity_proj_vec(e);
                    const double c = dot(ep, ev, k);
                    double pad_n2 = 0.0, pad_rp = 0.0;
                    for (int j = 0; j < d; ++j) {
                        const double pj = j < k ? ev[j] : 0.0;
                        proj[j] = pj + c * rp[j];
                        pad_n2 += pj * pj;
                        pad_rp += pj * rp[j];
                    }
                    if (dot(proj.data(), proj.data(), d) <= 1.0 + kIneqBand) continue;
                    // scale e_p so ||pad(e) + beta*c*r_p|| == 1; the quadratic
                    // has a root in [0, 1) because pad(e) itself is feasible
                    const double a = c * c * dot(rp, rp, d);
                    if (a <= 0.0) continue;
                    const double b = 2.0 * c * pad_rp;
                    const double c0 = std::min(pad_n2 - 1.0, 0.0);
                    const double beta = (-b + std::sqrt(b * b - 4.0 * a * c0)) / (2.0 * a);
                    for (int i = 0; i < k; ++i) ep[i] *= beta;
                }
            }
            break;
        default: break;
    }
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    out.append(buf, ptr);
}

void write_table_file(const std::filesystem::path& file, const std::vector<double>& tbl,
                      std::size_t rows, std::size_t cols) {
    std::string out;
    out.reserve(tbl.size() * 18 + 32);
    out += std::to_string(rows);
    out += ' ';
    out += std::to_string(cols);
    out += '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j) out += ' ';
            append_double(out, tbl[i * cols + j]);
        }
        out += '\n';
    }
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + file.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + file.string());
}

void read_table_file(const std::filesystem::path& file, std::vector<double>& tbl,
                     std::size_t expect_rows, std::size_t expect_cols) {
    std::ifstream f(file);
    if (!f) throw std::runtime_error("cannot open " + file.string());
    std::size_t rows = 0, cols = 0;
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error(file.string() + ": empty file");
    {
        std::istringstream hs(header);
        if (!(hs >> rows >> cols)) throw std::runtime_error(file.string() + ": bad header");
    }
    if (rows != expect_rows || cols != expect_cols)
        throw std::runtime_error(file.string() + ": dimension mismatch, header says " +
                                 std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                                 std::to_string(expect_rows) + "x" + std::to_string(expect_cols));
    tbl.assign(rows * cols, 0.0);
    std::string line;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(f, line))
            throw std::runtime_error(file.string() + ": expected " + std::to_string(rows) +
                                     " rows, got " + std::to_string(i));
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t j = 0; j < cols; ++j) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            double v;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{})
                throw std::runtime_error(file.string() + ":" + std::to_string(i + 2) +
                                         ": expected " + std::to_string(cols) + " values");
            tbl[i * cols + j] = v;
            p = next;
        }
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (p != end)
            throw std::runtime_error(file.string() + ":" + std::to_string(i + 2) +
                                     ": trailing data beyond " + std::to_string(cols) + " values");
    }
}

constexpr std::array<ParamStore::Table, ParamStore::kTableCount> kAllTables = {
    ParamStore::Table::EntityVecs,      ParamStore::Table::RelationVecs,
    ParamStore::Table::NormalVecs,      ParamStore::Table::ProjMatrices,
    ParamStore::Table::EntityProjVecs,  ParamStore::Table::RelationProjVecs,
    ParamStore::Table::SphereRadii,
};

std::size_t table_rows(ParamStore::Table t, std::int32_t entity_count, std::int32_t relation_count) {
    switch (t) {
        case ParamStore::Table::EntityVecs:
        case ParamStore::Table::EntityProjVecs: return static_cast<std::size_t>(entity_count);
        default: return static_cast<std::size_t>(relation_count);
    }
}

}  // namespace

void ParamStore::save(const ModelSpec& spec, const std::filesystem::path& dir) const {
    if (spec.k != k_ || spec.relation_dim() != d_)
        throw std::invalid_argument("spec dimensions disagree with the store");
    std::filesystem::create_directories(dir);
    {
        std::ofstream meta(dir / "meta.txt");
        if (!meta) throw std::runtime_error("cannot write " + (dir / "meta.txt").string());
        meta << "model " << to_string(spec.kind) << '\n'
             << "k " << spec.k << '\n'
             << "d " << spec.d << '\n'
             << "norm " << to_string(spec.norm) << '\n'
             << "epsilon " << std::setprecision(17) << spec.epsilon << '\n'
             << "train_radius " << (spec.train_radius ? 1 : 0) << '\n'
             << "entity_count " << entity_count_ << '\n'
             << "relation_count " << relation_count_ << '\n';
        if (!meta) throw std::runtime_error("write failed: " + (dir / "meta.txt").string());
    }
    for (Table t : kAllTables) {
        if (!has_table(t)) continue;
        write_table_file(dir / table_file_name(t), table(t),
                         table_rows(t, entity_count_, relation_count_), row_length(t, k_, d_));
    }
}

std::pair<ParamStore, ModelSpec> ParamStore::load(const std::filesystem::path& dir) {
    std::ifstream meta(dir / "meta.txt");
    if (!meta) throw std::runtime_error("cannot open " + (dir / "meta.txt").string());

    std::map<std::string, std::string> kv;
    std::string key, value;
    while (meta >> key >> value) kv[key] = value;
    for (const char* required : {"model", "k", "d", "norm", "entity_count", "relation_count"})
        if (!kv.count(required))
            throw std::runtime_error((dir / "meta.txt").string() + ": missing key " + required);

    ModelSpec spec;
    spec.kind = parse_model_kind(kv.at("model"));
    spec.k = std::stoi(kv.at("k"));
    spec.d = std::stoi(kv.at("d"));
    spec.norm = parse_norm(kv.at("norm"));
    if (kv.count("epsilon")) spec.epsilon = std::stod(kv.at("epsilon"));
    if (kv.count("train_radius")) spec.train_radius = kv.at("train_radius") != "0";
    const std::int32_t entity_count = std::stoi(kv.at("entity_count"));
    const std::int32_t relation_count = std::stoi(kv.at("relation_count"));

    ParamStore store;
    store.allocate(spec, entity_count, relation_count);
    for (Table t : kAllTables) {
        if (!store.has_table(t)) continue;
        read_table_file(dir / table_file_name(t), store.table(t),
                        table_rows(t, entity_count, relation_count),
                        row_length(t, store.k_, store.d_));
    }
    return {std::move(store), spec};
}

}  // namespace kgembed
