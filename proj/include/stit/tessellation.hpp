#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stit/polytope.hpp"

namespace stit {

enum class TessKind { stit, pht, iterated, section };

/// One maximal polytope: the (d-1)-dimensional cell separator introduced at a
/// split, chopped by its mother cell.
struct FacetRecord {
    Polytope facet;
    double birth_time = 0.0;
    Vec3 normal;
    int parent_cell_id = -1;
    std::pair<int, int> child_ids{-1, -1};
};

struct CellRecord {
    int id = 0;
    Polytope poly;
};

/// Per-run numerical audit, accumulated while the construction runs.
/// Valuation residuals are relative: |V_j(c+) + V_j(c-) - V_j(c) - V_j(f)|
/// over max(1, |V_j(c)|), taken at every split.
struct RunAudit {
    std::array<double, 4> max_valuation_residual{0, 0, 0, 0};
    bool euler_all_ok = true;
    long miss_resamples = 0;
};

class Tessellation {
public:
    Tessellation() = default;
    Tessellation(Polytope window, double horizon, TessKind kind)
        : window_(std::move(window)), horizon_(horizon), kind_(kind) {}

    const Polytope& window() const { return window_; }
    double horizon() const { return horizon_; }
    TessKind kind() const { return kind_; }
    int process_dim() const { return window_.dim(); }

    const std::vector<FacetRecord>& facets() const { return facets_; }
    const std::vector<CellRecord>& cells() const { return cells_; }
    std::vector<FacetRecord>& mutable_facets() { return facets_; }
    std::vector<CellRecord>& mutable_cells() { return cells_; }
    RunAudit& audit() { return audit_; }
    const RunAudit& audit() const { return audit_; }

    /// Facets born up to time s (the tessellation state Y(s, W)).
    std::span<const FacetRecord> state_at(double s) const {
        if (s < -1e-12 || s > horizon_ * (1 + 1e-12) + 1e-12)
            throw std::invalid_argument("state_at: s outside [0, horizon]");
        auto it = std::upper_bound(facets_.begin(), facets_.end(), s,
                                   [](double v, const FacetRecord& f) { return v < f.birth_time; });
        return {facets_.data(), std::size_t(it - facets_.begin())};
    }

    /// Relative volume-partition residual |sum_cells V_d - V_d(W)| / V_d(W).
    double partition_residual() const {
        double sum = 0.0;
        for (const auto& c : cells_) sum += c.poly.volume();
        return std::abs(sum - window_.volume()) / window_.volume();
    }

    bool cells_match_facets() const { return cells_.size() == facets_.size() + 1; }

    /// FNV-1a over the facet log (births, facet measures, lineage): a
    /// bitwise-stable determinism fingerprint.
    std::uint64_t summary_hash() const {
        std::uint64_t h = 14695981039346656037ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xffULL;
                h *= 1099511628211ULL;
            }
        };
        auto mixd = [&](double x) {
            std::uint64_t bits;
            static_assert(sizeof bits == sizeof x);
            __builtin_memcpy(&bits, &x, sizeof bits);
            mix(bits);
        };
        for (const auto& f : facets_) {
            mixd(f.birth_time);
            mixd(f.facet.volume());
            mix(std::uint64_t(f.parent_cell_id));
        }
        return h;
    }

private:
    Polytope window_;
    double horizon_ = 0.0;
    TessKind kind_ = TessKind::stit;
    std::vector<FacetRecord> facets_;
    std::vector<CellRecord> cells_;
    RunAudit audit_;
};

}  // namespace stit
