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

#ifndef KGEMBED_MODELS_HPP
#define KGEMBED_MODELS_HPP

#include <vector>

#include "kgembed/kg.hpp"
#include "kgembed/model_spec.hpp"
#include "kgembed/param_store.hpp"

namespace kgembed {

/// Score plus the intermediates the gradient pass reuses. Lower score means
/// more plausible; the value is >= 0 for all five models.
struct ScoreBreakdown {
    double value = 0.0;
    std::vector<double> residual;    // translational residual, relation-space dim
    std::vector<double> head_proj;   // projected head (TransH/TransR/TransD)
    std::vector<double> tail_proj;   // projected tail
    double inner_norm = 0.0;         // SphereE: ||h + r - t||
};

ScoreBreakdown score(const ModelSpec& spec, const ParamStore& store, const Triple& t);

/// Score without the allocated breakdown (training/evaluation hot path).
double score_value(const ModelSpec& spec, const ParamStore& store, const Triple& t);

/// One SGD step on the pairwise hinge term s(golden) - s(corrupted): every
/// parameter touched by either triple is decremented by learning_rate times
/// its analytic (sub)gradient, directly in the shared store. The caller
/// checks the hinge gate; L1 norms use sign with sign(0) = 0.
void gradient_step(const ModelSpec& spec, ParamStore& store, const Triple& golden,
                   const Triple& corrupted, double learning_rate);

namespace detail {

/// Residual norm of hp + rel - tp (dim m) under the given norm, shared by
/// score() and the evaluator's candidate sweeps so both produce bit-identical
/// values.
double translational_score(const double* hp, const double* rel, const double* tp,
                           int m, Norm norm);

/// TransH hyperplane projection out = e - (w.e) w (dim k).
void project_transh(const double* e, const double* w, int k, double* out);

/// TransR projection out = M^T e, with M stored k rows by d cols.
void project_transr(const double* e, const double* m, int k, int d, double* out);

/// TransD dynamic projection out = pad_d(e) + (e_p . e) r_p.
void project_transd(const double* e, const double* ep, const double* rp, int k, int d,
                    double* out);

}  // namespace detail

}  // namespace kgembed

#endif
