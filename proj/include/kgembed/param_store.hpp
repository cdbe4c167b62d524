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

#ifndef KGEMBED_PARAM_STORE_HPP
#define KGEMBED_PARAM_STORE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "kgembed/model_spec.hpp"

namespace kgembed {

enum class ProjInit { Identity, Random };

/// Shared mutable embedding tables.
///
/// Rows are read and written concurrently by training workers without
/// synchronization; torn or lost updates are tolerated (Hogwild contract).
/// init/save/load are single-threaded and must not overlap training.
class ParamStore {
public:
    enum class Table {
        EntityVecs,        // |E| x k
        RelationVecs,      // |R| x d (translation vectors; d_r for TransH, where d == k)
        NormalVecs,        // |R| x k (TransH w_r)
        ProjMatrices,      // |R| x (k*d) (TransR M_r, k rows by d cols, row-major)
        EntityProjVecs,    // |E| x k (TransD h_p, t_p)
        RelationProjVecs,  // |R| x d (TransD r_p)
        SphereRadii,       // |R| (SphereE D_r)
    };
    static constexpr int kTableCount = 7;

    ParamStore() = default;

    /// Allocates exactly the tables the model needs. Unit-constrained rows are
    /// drawn uniform in [-6/sqrt(dim), 6/sqrt(dim)] and normalized; projection
    /// matrices start as identity-padded (or random, feasibility-projected);
    /// projection vectors start at zero; sphere radii at one. Deterministic
    /// for a fixed seed.
    static ParamStore init(const ModelSpec& spec, std::int32_t entity_count,
                           std::int32_t relation_count, std::uint64_t seed,
                           ProjInit proj_init = ProjInit::Identity);

    std::int32_t entity_count() const { return entity_count_; }
    std::int32_t relation_count() const { return relation_count_; }
    int entity_dim() const { return k_; }
    int relation_dim() const { return d_; }

    double* entity_vec(std::int32_t e) { return entity_vecs_.data() + static_cast<std::size_t>(e) * k_; }
    const double* entity_vec(std::int32_t e) const { return entity_vecs_.data() + static_cast<std::size_t>(e) * k_; }
    double* relation_vec(std::int32_t r) { return relation_vecs_.data() + static_cast<std::size_t>(r) * d_; }
    const double* relation_vec(std::int32_t r) const { return relation_vecs_.data() + static_cast<std::size_t>(r) * d_; }
    double* normal_vec(std::int32_t r) { return normal_vecs_.data() + static_cast<std::size_t>(r) * k_; }
    const double* normal_vec(std::int32_t r) const { return normal_vecs_.data() + static_cast<std::size_t>(r) * k_; }
    double* proj_matrix(std::int32_t r) { return proj_matrices_.data() + static_cast<std::size_t>(r) * k_ * d_; }
    const double* proj_matrix(std::int32_t r) const { return proj_matrices_.data() + static_cast<std::size_t>(r) * k_ * d_; }
    double* entity_proj_vec(std::int32_t e) { return entity_proj_vecs_.data() + static_cast<std::size_t>(e) * k_; }
    const double* entity_proj_vec(std::int32_t e) const { return entity_proj_vecs_.data() + static_cast<std::size_t>(e) * k_; }
    double* relation_proj_vec(std::int32_t r) { return relation_proj_vecs_.data() + static_cast<std::size_t>(r) * d_; }
    const double* relation_proj_vec(std::int32_t r) const { return relation_proj_vecs_.data() + static_cast<std::size_t>(r) * d_; }
    double& sphere_radius(std::int32_t r) { return sphere_radii_[static_cast<std::size_t>(r)]; }
    double sphere_radius(std::int32_t r) const { return sphere_radii_[static_cast<std::size_t>(r)]; }

    bool has_table(Table t) const { return !table(t).empty(); }
    std::vector<double>& table(Table t);
    const std::vector<double>& table(Table t) const;
    static std::size_t row_length(Table t, int k, int d);
    static const char* table_file_name(Table t);

    /// Restores the constraints for the touched rows: unit-constrained rows
    /// are rescaled to unit L2 norm (a zero row becomes the first basis
    /// vector); inequality constraints are projected only when violated.
    /// Idempotent; entity/relation pairs are cross-checked for the pairwise
    /// constraints of TransR/TransD.
    void renormalize(const ModelSpec& spec, std::span<const std::int32_t> entities,
                     std::span<const std::int32_t> relations);

    /// Text persistence: meta.txt plus one file per allocated table, one row
    /// per line with 9 significant digits.
    void save(const ModelSpec& spec, const std::filesystem::path& dir) const;
    static std::pair<ParamStore, ModelSpec> load(const std::filesystem::path& dir);

private:
    void allocate(const ModelSpec& spec, std::int32_t entity_count, std::int32_t relation_count);

    std::int32_t entity_count_ = 0;
    std::int32_t relation_count_ = 0;
    int k_ = 0;
    int d_ = 0;
    std::vector<double> entity_vecs_, relation_vecs_, normal_vecs_, proj_matrices_,
        entity_proj_vecs_, relation_proj_vecs_, sphere_radii_;
};

/// Scales v to unit L2 norm in place. Rows already unit (within 1e-12 on the
/// squared norm) are left untouched so the operation is idempotent; a zero
/// vector becomes e1.
void unit_normalize(std::span<double> v);

}  // namespace kgembed

#endif
