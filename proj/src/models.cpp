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

#include "kgembed/models.hpp"

#include <cassert>
#include <cmath>

namespace kgembed {

namespace detail {

double translational_score(const double* hp, const double* rel, const double* tp, int m,
                           Norm norm) {
    double s = 0.0;
    if (norm == Norm::L1) {
        for (int i = 0; i < m; ++i) s += std::abs(hp[i] + rel[i] - tp[i]);
        return s;
    }
    for (int i = 0; i < m; ++i) {
        const double x = hp[i] + rel[i] - tp[i];
        s += x * x;
    }
    return std::sqrt(s);
}

void project_transh(const double* e, const double* w, int k, double* out) {
    double we = 0.0;
    for (int i = 0; i < k; ++i) we += w[i] * e[i];
    for (int i = 0; i < k; ++i) out[i] = e[i] - we * w[i];
}

void project_transr(const double* e, const double* m, int k, int d, double* out) {
    for (int j = 0; j < d; ++j) out[j] = 0.0;
    for (int i = 0; i < k; ++i) {
        const double ei = e[i];
        const double* row = m + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) out[j] += ei * row[j];
    }
}

void project_transd(const double* e, const double* ep, const double* rp, int k, int d,
                    double* out) {
    double c = 0.0;
    for (int i = 0; i < k; ++i) c += ep[i] * e[i];
    for (int j = 0; j < d; ++j) out[j] = (j < k ? e[j] : 0.0) + c * rp[j];
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Gradient of the norm at the residual u (length m): sign(u) for L1,
/// u/||u|| for L2 (zero residual gives a zero subgradient).
void norm_gradient(const double* u, int m, Norm norm, double* out) {
    if (norm == Norm::L1) {
        for (int i = 0; i < m; ++i) out[i] = sign(u[i]);
        return;
    }
    double n2 = 0.0;
    for (int i = 0; i < m; ++i) n2 += u[i] * u[i];
    if (n2 == 0.0) {
        for (int i = 0; i < m; ++i) out[i] = 0.0;
        return;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < m; ++i) out[i] = u[i] * inv;
}

struct Scratch {
    std::vector<double> head_proj, tail_proj, residual, norm_grad;
    void resize(int k, int d) {
        head_proj.resize(static_cast<std::size_t>(std::max(k, d)));
        tail_proj.resize(static_cast<std::size_t>(std::max(k, d)));
        residual.resize(static_cast<std::size_t>(d));
        norm_grad.resize(static_cast<std::size_t>(d));
    }
};

Scratch& tls_scratch() {
    thread_local Scratch s;
    return s;
}

/// Fills hp/tp with the model's projected head/tail (pointers may alias the
/// store rows for models without projection) and returns the residual space
/// dimension.
int projected_pair(const ModelSpec& spec, const ParamStore& store, const Triple& t,
                   std::vector<double>& hp_buf, std::vector<double>& tp_buf, const double*& hp,
                   const double*& tp) {
    const int k = store.entity_dim();
    const int d = store.relation_dim();
    const double* h = store.entity_vec(t.head);
    const double* tl = store.entity_vec(t.tail);
    switch (spec.kind) {
        case ModelKind::TransE:
        case ModelKind::SphereE:
            hp = h;
            tp = tl;
            return k;
        case ModelKind::TransH: {
            const double* w = store.normal_vec(t.relation);
            project_transh(h, w, k, hp_buf.data());
            project_transh(tl, w, k, tp_buf.data());
            hp = hp_buf.data();
            tp = tp_buf.data();
            return k;
        }
        case ModelKind::TransR: {
            const double* m = store.proj_matrix(t.relation);
            project_transr(h, m, k, d, hp_buf.data());
            project_transr(tl, m, k, d, tp_buf.data());
            hp = hp_buf.data();
            tp = tp_buf.data();
            return d;
        }
        case ModelKind::TransD: {
            const double* rp = store.relation_proj_vec(t.relation);
            project_transd(h, store.entity_proj_vec(t.head), rp, k, d, hp_buf.data());
            project_transd(tl, store.entity_proj_vec(t.tail), rp, k, d, tp_buf.data());
            hp = hp_buf.data();
            tp = tp_buf.data();
            return d;
        }
    }
    return k;
}

/// Accumulates -lr * sigma * grad s(triple) into the store for one triple of
/// the hinge pair (sigma = +1 golden, -1 corrupted). All loads the gradient
/// needs happen before the first store write, so updates stay additive when
/// the two triples share rows.
struct SideGradient {
    // entity rows
    std::int32_t head, tail, relation;
    std::vector<double> d_head, d_tail;          // k
    std::vector<double> d_relation;              // m
    std::vector<double> d_normal;                // k (TransH)
    std::vector<double> d_proj_matrix;           // k*d (TransR)
    std::vector<double> d_head_proj, d_tail_proj;  // k (TransD)
    std::vector<double> d_relation_proj;         // d (TransD)
    double d_radius = 0.0;                       // SphereE

    void compute(const ModelSpec& spec, const ParamStore& store, const Triple& t) {
        const int k = store.entity_dim();
        const int d = store.relation_dim();
        head = t.head;
        tail = t.tail;
        relation = t.relation;

        Scratch& s = tls_scratch();
        s.resize(k, d);
        const double* hp = nullptr;
        const double* tp = nullptr;
        const int m = projected_pair(spec, store, t, s.head_proj, s.tail_proj, hp, tp);
        const double* rel = store.relation_vec(t.relation);

        for (int i = 0; i < m; ++i) s.residual[i] = hp[i] + rel[i] - tp[i];
        double* g = s.norm_grad.data();
        norm_gradient(s.residual.data(), m, spec.norm, g);

        const double* h = store.entity_vec(t.head);
        const double* tl = store.entity_vec(t.tail);

        d_head.assign(static_cast<std::size_t>(k), 0.0);
        d_tail.assign(static_cast<std::size_t>(k), 0.0);
        d_relation.assign(static_cast<std::size_t>(m), 0.0);

        switch (spec.kind) {
            case ModelKind::TransE: {
                for (int i = 0; i < k; ++i) {
                    d_head[i] = g[i];
                    d_tail[i] = -g[i];
                    d_relation[i] = g[i];
                }
                break;
            }
            case ModelKind::SphereE: {
                // s = |M - D^2| with M = ||h + r - t||
                const double inner = translational_score(hp, rel, tp, m, spec.norm);
                const double radius = store.sphere_radius(t.relation);
                const double outer = sign(inner - radius * radius);
                for (int i = 0; i < k; ++i) {
                    d_head[i] = outer * g[i];
                    d_tail[i] = -outer * g[i];
                    d_relation[i] = outer * g[i];
                }
                if (spec.train_radius) d_radius = outer * (-2.0 * radius);
                break;
            }
            case ModelKind::TransH: {
                const double* w = store.normal_vec(t.relation);
                double wg = 0.0, wh = 0.0, wt = 0.0;
                for (int i = 0; i < k; ++i) {
                    wg += w[i] * g[i];
                    wh += w[i] * h[i];
                    wt += w[i] * tl[i];
                }
                d_normal.assign(static_cast<std::size_t>(k), 0.0);
                for (int i = 0; i < k; ++i) {
                    const double pg = g[i] - wg * w[i];  // (I - w w^T) g
                    d_head[i] = pg;
                    d_tail[i] = -pg;
                    d_relation[i] = g[i];
                    d_normal[i] = wg * (tl[i] - h[i]) + (wt - wh) * g[i];
                }
                break;
            }
            case ModelKind::TransR: {
                const double* pm = store.proj_matrix(t.relation);
                d_proj_matrix.assign(static_cast<std::size_t>(k) * d, 0.0);
                for (int j = 0; j < d; ++j) d_relation[j] = g[j];
                for (int i = 0; i < k; ++i) {
                    const double* row = pm + static_cast<std::size_t>(i) * d;
                    double mg = 0.0;
                    for (int j = 0; j < d; ++j) mg += row[j] * g[j];
                    d_head[i] = mg;
                    d_tail[i] = -mg;
                    const double diff = h[i] - tl[i];
                    double* drow = d_proj_matrix.data() + static_cast<std::size_t>(i) * d;
                    for (int j = 0; j < d; ++j) drow[j] = g[j] * diff;
                }
                break;
            }
            case ModelKind::TransD: {
                const double* rp = store.relation_proj_vec(t.relation);
                const double* hp_vec = store.entity_proj_vec(t.head);
                const double* tp_vec = store.entity_proj_vec(t.tail);
                double grp = 0.0;  // g . r_p
                for (int j = 0; j < d; ++j) grp += g[j] * rp[j];
                double ch = 0.0, ct = 0.0;
                for (int i = 0; i < k; ++i) {
                    ch += hp_vec[i] * h[i];
                    ct += tp_vec[i] * tl[i];
                }
                d_head_proj.assign(static_cast<std::size_t>(k), 0.0);
                d_tail_proj.assign(static_cast<std::size_t>(k), 0.0);
                d_relation_proj.assign(static_cast<std::size_t>(d), 0.0);
                for (int i = 0; i < k; ++i) {
                    const double pad_g = i < d ? g[i] : 0.0;
                    d_head[i] = pad_g + grp * hp_vec[i];
                    d_tail[i] = -(pad_g + grp * tp_vec[i]);
                    d_head_proj[i] = grp * h[i];
                    d_tail_proj[i] = -grp * tl[i];
                }
                for (int j = 0; j < d; ++j) {
                    d_relation[j] = g[j];
                    d_relation_proj[j] = (ch - ct) * g[j];
                }
                break;
            }
        }
    }

    void apply(const ModelSpec& spec, ParamStore& store, double step) const {
        const int k = store.entity_dim();
        const int m = static_cast<int>(d_relation.size());
        double* h = store.entity_vec(head);
        double* tl = store.entity_vec(tail);
        double* rel = store.relation_vec(relation);
        for (int i = 0; i < k; ++i) {
            h[i] -= step * d_head[i];
            tl[i] -= step * d_tail[i];
        }
        for (int i = 0; i < m; ++i) rel[i] -= step * d_relation[i];
        switch (spec.kind) {
            case ModelKind::TransE: break;
            case ModelKind::SphereE: store.sphere_radius(relation) -= step * d_radius; break;
            case ModelKind::TransH: {
                double* w = store.normal_vec(relation);
                for (int i = 0; i < k; ++i) w[i] -= step * d_normal[i];
                break;
            }
            case ModelKind::TransR: {
                double* pm = store.proj_matrix(relation);
                const int n = k * store.relation_dim();
                for (int i = 0; i < n; ++i) pm[i] -= step * d_proj_matrix[i];
                break;
            }
            case ModelKind::TransD: {
                double* hp = store.entity_proj_vec(head);
                double* tp = store.entity_proj_vec(tail);
                double* rp = store.relation_proj_vec(relation);
                const int d = store.relation_dim();
                for (int i = 0; i < k; ++i) {
                    hp[i] -= step * d_head_proj[i];
                    tp[i] -= step * d_tail_proj[i];
                }
                for (int j = 0; j < d; ++j) rp[j] -= step * d_relation_proj[j];
                break;
            }
        }
    }
};

}  // namespace
}  // namespace detail

ScoreBreakdown score(const ModelSpec& spec, const ParamStore& store, const Triple& t) {
    assert(t.head >= 0 && t.head < store.entity_count());
    assert(t.tail >= 0 && t.tail < store.entity_count());
    assert(t.relation >= 0 && t.relation < store.relation_count());

    const int k = store.entity_dim();
    const int d = store.relation_dim();
    ScoreBreakdown out;
    out.head_proj.resize(static_cast<std::size_t>(std::max(k, d)));
    out.tail_proj.resize(static_cast<std::size_t>(std::max(k, d)));

    const double* hp = nullptr;
    const double* tp = nullptr;
    const int m =
        detail::projected_pair(spec, store, t, out.head_proj, out.tail_proj, hp, tp);
    const double* rel = store.relation_vec(t.relation);

    out.residual.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.residual[i] = hp[i] + rel[i] - tp[i];

    const double norm_value = detail::translational_score(hp, rel, tp, m, spec.norm);
    if (spec.kind == ModelKind::SphereE) {
        out.inner_norm = norm_value;
        const double radius = store.sphere_radius(t.relation);
        out.value = std::abs(norm_value - radius * radius);
    } else {
        out.value = norm_value;
    }

    if (hp == store.entity_vec(t.head)) {  // no projection model: expose the raw rows
        out.head_proj.assign(hp, hp + k);
        out.tail_proj.assign(tp, tp + k);
    } else {
        out.head_proj.resize(static_cast<std::size_t>(m));
        out.tail_proj.resize(static_cast<std::size_t>(m));
    }
    return out;
}

double score_value(const ModelSpec& spec, const ParamStore& store, const Triple& t) {
    const int k = store.entity_dim();
    const int d = store.relation_dim();
    detail::Scratch& s = detail::tls_scratch();
    s.resize(k, d);
    const double* hp = nullptr;
    const double* tp = nullptr;
    const int m = detail::projected_pair(spec, store, t, s.head_proj, s.tail_proj, hp, tp);
    const double* rel = store.relation_vec(t.relation);
    const double norm_value = detail::translational_score(hp, rel, tp, m, spec.norm);
    if (spec.kind == ModelKind::SphereE) {
        const double radius = store.sphere_radius(t.relation);
        return std::abs(norm_value - radius * radius);
    }
    return norm_value;
}

void gradient_step(const ModelSpec& spec, ParamStore& store, const Triple& golden,
                   const Triple& corrupted, double learning_rate) {
    // read phase for both triples, then writes; keeps the combined update
    // additive when golden and corrupted share rows
    thread_local detail::SideGradient golden_grad, corrupted_grad;
    golden_grad.compute(spec, store, golden);
    corrupted_grad.compute(spec, store, corrupted);
    golden_grad.apply(spec, store, learning_rate);
    corrupted_grad.apply(spec, store, -learning_rate);
}

}  // namespace kgembed
