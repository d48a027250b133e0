#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stit/measure.hpp"
#include "stit/polytope.hpp"
#include "stit/rng.hpp"
#include "stit/tessellation.hpp"

namespace stit {

namespace enginedetail {

inline void record_valuation_residuals(RunAudit& audit, const Polytope& parent,
                                       const ClipResult& r) {
    for (int j = 0; j <= parent.dim(); ++j) {
        double vj = parent.intrinsic_volume(j);
        double lhs = r.above.intrinsic_volume(j) + r.below.intrinsic_volume(j) - vj;
        double rhs = j <= parent.dim() - 1 ? r.facet.intrinsic_volume(j) : 0.0;
        double res = std::abs(lhs - rhs) / std::max(1.0, std::abs(vj));
        audit.max_valuation_residual[std::size_t(j)] =
            std::max(audit.max_valuation_residual[std::size_t(j)], res);
    }
    audit.euler_all_ok = audit.euler_all_ok && r.above.euler_ok() && r.below.euler_ok();
}

/// Split the cell by a hyperplane drawn from the normalized restriction of
/// the driving measure; boundary-grazing draws are counted and resampled.
inline ClipResult split_cell(const Polytope& cell, int d, const Tolerances& tol, Rng& rng,
                             RunAudit& audit, Hyperplane* used) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Hyperplane H = sample_hitting_hyperplane(cell, d, rng);
        ClipResult r = clip(cell, H, tol);
        if (r.is_split()) {
            if (used) *used = H;
            return r;
        }
        ++audit.miss_resamples;
    }
    throw std::runtime_error("split_cell: persistent hyperplane misses (degenerate cell?)");
}

}  // namespace enginedetail

/// The MNW construction Y(t, W): every cell carries an exponential clock with
/// rate Lambda([cell]); the earliest ringing cell is split by a hyperplane
/// from the normalized restriction of Lambda, and the two sub-cells get fresh
/// clocks (memorylessness makes redrawing at birth distributionally exact).
/// Deterministic given (W, t, seed).
inline Tessellation run_mnw(const Polytope& W, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("run_mnw: t must be > 0");
    const int d = W.dim();
    if (d != 2 && d != 3) throw std::invalid_argument("run_mnw: window dim must be 2 or 3");
    if (W.dim() != W.ambient_dim())
        throw std::invalid_argument("run_mnw: run embedded windows in intrinsic coordinates");
    if (W.volume() <= 0.0) throw std::invalid_argument("run_mnw: degenerate window");

    const Tolerances tol = {1e-9 * W.diameter(), 1e-12 * W.volume()};
    Tessellation tess(W, t, TessKind::stit);

    struct Node {
        Polytope poly;
        bool split = false;
    };
    std::vector<Node> nodes;
    nodes.push_back({W, false});

    struct Event {
        double time;
        int cell;
        bool operator>(const Event& o) const {
            return time > o.time || (time == o.time && cell > o.cell);
        }
    };
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;

    auto arm_clock = [&](int id, double birth) {
        double rate = lambda_hitting(nodes[std::size_t(id)].poly, d);
        double when = birth + rng.exponential(rate);
        if (when <= t) queue.push({when, id});
    };
    arm_clock(0, 0.0);

    while (!queue.empty()) {
        auto [when, id] = queue.top();
        queue.pop();
        Hyperplane H;
        ClipResult r =
            enginedetail::split_cell(nodes[std::size_t(id)].poly, d, tol, rng, tess.audit(), &H);
        enginedetail::record_valuation_residuals(tess.audit(), nodes[std::size_t(id)].poly, r);
        nodes[std::size_t(id)].split = true;
        int up = int(nodes.size());
        nodes.push_back({std::move(r.above), false});
        int down = int(nodes.size());
        nodes.push_back({std::move(r.below), false});
        tess.mutable_facets().push_back({std::move(r.facet), when, H.normal, id, {up, down}});
        arm_clock(up, when);
        arm_clock(down, when);
    }

    for (int i = 0; i < int(nodes.size()); ++i)
        if (!nodes[std::size_t(i)].split)
            tess.mutable_cells().push_back({i, std::move(nodes[std::size_t(i)].poly)});
    return tess;
}

/// Poisson hyperplane tessellation PHT(t, W): N ~ Poisson(t Lambda([W]))
/// i.i.d. hitting hyperplanes split every cell in sequence. The facet list
/// holds the (d-1)-faces of the arrangement, obtained per hyperplane as the
/// (d-1)-dimensional arrangement its peers induce on W n H_i.
inline Tessellation run_pht(const Polytope& W, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("run_pht: t must be > 0");
    const int d = W.dim();
    if (d != 2 && d != 3) throw std::invalid_argument("run_pht: window dim must be 2 or 3");
    if (W.volume() <= 0.0) throw std::invalid_argument("run_pht: degenerate window");

    const Tolerances tol = {1e-9 * W.diameter(), 1e-12 * W.volume()};
    Tessellation tess(W, t, TessKind::pht);

    const std::uint64_t n = rng.poisson(t * lambda_hitting(W, d));
    std::vector<Hyperplane> planes;
    planes.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) planes.push_back(sample_hitting_hyperplane(W, d, rng));

    std::vector<Polytope> cells{W};
    for (const auto& H : planes) {
        std::vector<Polytope> next;
        next.reserve(cells.size() + 4);
        for (auto& c : cells) {
            ClipResult r = clip(c, H, tol);
            if (r.is_split()) {
                enginedetail::record_valuation_residuals(tess.audit(), c, r);
                next.push_back(std::move(r.above));
                next.push_back(std::move(r.below));
            } else {
                next.push_back(std::move(c));
            }
        }
        cells.swap(next);
    }
    for (int i = 0; i < int(cells.size()); ++i)
        tess.mutable_cells().push_back({i, std::move(cells[std::size_t(i)])});

    for (std::size_t i = 0; i < planes.size(); ++i) {
        auto base = cross_section(W, planes[i], tol);
        if (!base) continue;
        std::vector<Polytope> pieces{std::move(*base)};
        for (std::size_t j = 0; j < planes.size(); ++j) {
            if (j == i) continue;
            std::vector<Polytope> next;
            next.reserve(pieces.size() + 2);
            for (auto& p : pieces) {
                ClipResult r = clip(p, planes[j], tol);
                if (r.is_split()) {
                    next.push_back(std::move(r.above));
                    next.push_back(std::move(r.below));
                } else {
                    next.push_back(std::move(p));
                }
            }
            pieces.swap(next);
        }
        for (auto& p : pieces)
            tess.mutable_facets().push_back({std::move(p), 0.0, planes[i].normal, -1, {-1, -1}});
    }
    return tess;
}

/// Iteration Y(t, W) [+] Y(s, .): an independent copy Y(s, c) is nested in
/// every cell c of the primary tessellation (equal in law to continuing the
/// construction, by consistency and the Markov property). Facet births of
/// the nested copies are shifted by the primary horizon.
inline Tessellation iterate(const Tessellation& primary, double s, Rng& rng) {
    if (s < 0.0) throw std::invalid_argument("iterate: s must be >= 0");
    if (primary.kind() != TessKind::stit)
        throw std::invalid_argument("iterate: primary must be a STIT tessellation");
    if (s == 0.0) return primary;

    Tessellation out(primary.window(), primary.horizon() + s, TessKind::iterated);
    out.mutable_facets() = primary.facets();
    out.audit() = primary.audit();

    int next_id = 0;
    for (const auto& c : primary.cells()) next_id = std::max(next_id, c.id + 1);
    for (const auto& f : primary.facets())
        next_id = std::max({next_id, f.child_ids.first + 1, f.child_ids.second + 1});

    for (const auto& c : primary.cells()) {
        Tessellation sub = run_mnw(c.poly, s, rng);
        const int base = next_id;
        auto remap = [&](int local) { return local == 0 ? c.id : base + local - 1; };
        int max_local = 0;
        for (const auto& f : sub.facets()) {
            FacetRecord g = f;
            g.birth_time += primary.horizon();
            g.parent_cell_id = remap(f.parent_cell_id);
            g.child_ids = {remap(f.child_ids.first), remap(f.child_ids.second)};
            max_local = std::max({max_local, f.child_ids.first, f.child_ids.second});
            out.mutable_facets().push_back(std::move(g));
        }
        for (const auto& sc : sub.cells())
            out.mutable_cells().push_back({remap(sc.id), sc.poly});
        next_id = base + max_local;
        for (int j = 0; j <= 3; ++j)
            out.audit().max_valuation_residual[std::size_t(j)] =
                std::max(out.audit().max_valuation_residual[std::size_t(j)],
                         sub.audit().max_valuation_residual[std::size_t(j)]);
        out.audit().euler_all_ok = out.audit().euler_all_ok && sub.audit().euler_all_ok;
        out.audit().miss_resamples += sub.audit().miss_resamples;
    }
    std::stable_sort(out.mutable_facets().begin(), out.mutable_facets().end(),
                     [](const FacetRecord& a, const FacetRecord& b) {
                         return a.birth_time < b.birth_time;
                     });
    return out;
}

/// Planar section Y(t) n E of a spatial tessellation: cells are the nonempty
/// sections of 3-cells, boundary segments the sections of facets, with birth
/// times inherited from the spatial process. Empty when E misses the window.
inline std::optional<Tessellation> section(const Tessellation& tess, const Hyperplane& E) {
    if (tess.process_dim() != 3) throw std::invalid_argument("section: need a spatial tessellation");
    const Tolerances tol = {1e-9 * tess.window().diameter(), 1e-12 * tess.window().volume()};
    auto window2 = cross_section(tess.window(), E, tol);
    if (!window2) return std::nullopt;

    Tessellation out(std::move(*window2), tess.horizon(), TessKind::section);
    for (const auto& c : tess.cells()) {
        auto cap = cross_section(c.poly, E, tol);
        if (cap) out.mutable_cells().push_back({c.id, std::move(*cap)});
    }
    for (const auto& f : tess.facets()) {
        auto seg = cross_section(f.facet, E, tol);
        if (!seg) continue;
        out.mutable_facets().push_back(
            {std::move(*seg), f.birth_time, f.normal, f.parent_cell_id, f.child_ids});
    }
    std::stable_sort(out.mutable_facets().begin(), out.mutable_facets().end(),
                     [](const FacetRecord& a, const FacetRecord& b) {
                         return a.birth_time < b.birth_time;
                     });
    return out;
}

}  // namespace stit
