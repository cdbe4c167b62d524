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

#include "kgembed/model_spec.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace kgembed {

void ModelSpec::validate() const {
    if (k < 1) throw std::invalid_argument("embedding dimension k must be >= 1");
    if (d < 1) throw std::invalid_argument("relation-space dimension d must be >= 1");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::TransE: return "transe";
        case ModelKind::TransH: return "transh";
        case ModelKind::TransR: return "transr";
        case ModelKind::TransD: return "transd";
        case ModelKind::SphereE: return "spheree";
    }
    return "?";
}

const char* to_string(Norm norm) { return norm == Norm::L1 ? "l1" : "l2"; }

namespace {
std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}
}  // namespace

ModelKind parse_model_kind(const std::string& s) {
    const std::string v = lower(s);
    if (v == "transe") return ModelKind::TransE;
    if (v == "transh") return ModelKind::TransH;
    if (v == "transr") return ModelKind::TransR;
    if (v == "transd") return ModelKind::TransD;
    if (v == "spheree" || v == "sphere") return ModelKind::SphereE;
    throw std::invalid_argument("unknown model kind: " + s);
}

Norm parse_norm(const std::string& s) {
    const std::string v = lower(s);
    if (v == "l1") return Norm::L1;
    if (v == "l2") return Norm::L2;
    throw std::invalid_argument("unknown norm: " + s + " (expected l1 or l2)");
}

}  // namespace kgembed
