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

#ifndef KGEMBED_MODEL_SPEC_HPP
#define KGEMBED_MODEL_SPEC_HPP

#include <string>

namespace kgembed {

enum class ModelKind { TransE, TransH, TransR, TransD, SphereE };
enum class Norm { L1, L2 };

/// Which score function is active plus its dimensional/norm configuration.
struct ModelSpec {
    ModelKind kind = ModelKind::TransE;
    int k = 50;              // entity embedding dimension
    int d = 50;              // relation-space dimension; consulted by TransR/TransD only
    Norm norm = Norm::L1;
    double epsilon = 0.1;    // TransH orthogonality tolerance |w_r . d_r| <= epsilon
    bool train_radius = true;  // SphereE: learn the relation radius

    /// Dimension of the translational residual for this model.
    int relation_dim() const {
        return (kind == ModelKind::TransR || kind == ModelKind::TransD) ? d : k;
    }

    void validate() const;  // throws std::invalid_argument
};

/// True for models with a distinct relation-space dimension.
inline bool uses_rel_dim(ModelKind kind) {
    return kind == ModelKind::TransR || kind == ModelKind::TransD;
}

const char* to_string(ModelKind kind);
const char* to_string(Norm norm);
ModelKind parse_model_kind(const std::string& s);  // throws on unknown tag
Norm parse_norm(const std::string& s);

}  // namespace kgembed

#endif
