#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stit/vec.hpp"
#include "stit/hyperplane.hpp"

namespace stit {

/// Orthonormal frame for polytopes embedded below ambient dimension.
/// Intrinsic coordinates of a point p are ((p-origin).u, (p-origin).v);
/// for dim-1 polytopes only u is meaningful.
struct Frame {
    Vec3 origin;
    Vec3 u{1, 0, 0};
    Vec3 v{0, 1, 0};
    Vec3 normal{0, 0, 1};  // u x v, stored for plane queries
};

/// Classification/degeneracy tolerances. The engine derives them once from
/// the simulation window (1e-9 x diameter, 1e-12 x volume) and passes them to
/// every clip; free-standing geometry calls derive them from the operand.
struct Tolerances {
    double eps_geom = 1e-12;
    double eps_vol = 1e-24;
};

namespace geomdetail {

inline Vec3 newell_normal(const std::vector<Vec3>& pts) {
    Vec3 n{0, 0, 0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3& a = pts[i];
        const Vec3& b = pts[(i + 1) % pts.size()];
        n += cross(a, b);
    }
    return n;
}

inline Vec3 mean_point(const std::vector<Vec3>& pts) {
    Vec3 c{0, 0, 0};
    for (const auto& p : pts) c += p;
    return c / double(pts.size());
}

/// Sort points lying in the plane with normal n into a convex cycle.
inline void sort_cycle_in_plane(std::vector<Vec3>& pts, const Vec3& n) {
    Vec3 c = mean_point(pts);
    Vec3 e1 = any_orthogonal(n);
    Vec3 e2 = cross(normalized(n), e1);
    std::sort(pts.begin(), pts.end(), [&](const Vec3& a, const Vec3& b) {
        double aa = std::atan2(dot(a - c, e2), dot(a - c, e1));
        double ab = std::atan2(dot(b - c, e2), dot(b - c, e1));
        return aa < ab;
    });
}

inline void dedup_ring(std::vector<Vec3>& pts, double tol) {
    std::vector<Vec3> out;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : out)
            if (dist(p, q) <= tol) { dup = true; break; }
        if (!dup) out.push_back(p);
    }
    pts.swap(out);
}

}  // namespace geomdetail

/// Convex polytope of intrinsic dimension 0..3 in ambient dimension 2 or 3.
/// Immutable after construction; all operations are pure. Lower-dimensional
/// polytopes carry an orthonormal frame and do their metric computations in
/// intrinsic coordinates.
class Polytope {
public:
    Polytope() = default;

    // ---- builders ------------------------------------------------------

    static Polytope point_poly(const Vec3& p, int ambient = 3) {
        Polytope P;
        P.dim_ = 0;
        P.ambient_ = ambient;
        P.verts_ = {p};
        P.finalize();
        return P;
    }

    static Polytope segment(const Vec3& a, const Vec3& b, int ambient = 3) {
        Polytope P;
        P.dim_ = 1;
        P.ambient_ = ambient;
        P.verts_ = {a, b};
        P.frame_.origin = a;
        P.frame_.u = normalized(b - a);
        P.finalize();
        return P;
    }

    /// Polygon from a convex vertex ring (any cyclic order, ambient coords).
    static Polytope polygon(std::vector<Vec3> ring, int ambient) {
        Polytope P;
        P.dim_ = 2;
        P.ambient_ = ambient;
        if (ring.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
        Vec3 n = ambient == 2 ? Vec3{0, 0, 1} : normalized(geomdetail::newell_normal(ring));
        if (ambient == 3) {
            geomdetail::sort_cycle_in_plane(ring, n);
        } else if (geomdetail::newell_normal(ring).z < 0.0) {
            std::reverse(ring.begin(), ring.end());
        }
        P.verts_ = std::move(ring);
        P.frame_.origin = geomdetail::mean_point(P.verts_);
        P.frame_.normal = n;
        P.frame_.u = ambient == 2 ? Vec3{1, 0, 0} : any_orthogonal(n);
        P.frame_.v = ambient == 2 ? Vec3{0, 1, 0} : cross(n, P.frame_.u);
        P.finalize();
        return P;
    }

    /// 3-polytope from vertices and facet cycles (cycles in any orientation;
    /// outward orientation is recovered from the geometry).
    static Polytope polyhedron(std::vector<Vec3> verts, std::vector<std::vector<int>> facets) {
        Polytope P;
        P.dim_ = 3;
        P.ambient_ = 3;
        P.verts_ = std::move(verts);
        P.facets_ = std::move(facets);
        P.finalize();
        return P;
    }

    /// Axis-aligned box [0,a1]x...x[0,ad]. A single side length is broadcast.
    static Polytope box(std::vector<double> sides, int d) {
        if (d != 2 && d != 3) throw std::invalid_argument("box: d must be 2 or 3");
        if (sides.size() == 1) sides.assign(std::size_t(d), sides[0]);
        if (int(sides.size()) != d) throw std::invalid_argument("box: need 1 or d side lengths");
        for (double s : sides)
            if (!(s > 0.0)) throw std::invalid_argument("box: side lengths must be > 0");
        if (d == 2) {
            return polygon({{0, 0, 0}, {sides[0], 0, 0}, {sides[0], sides[1], 0}, {0, sides[1], 0}}, 2);
        }
        const double a = sides[0], b = sides[1], c = sides[2];
        std::vector<Vec3> v = {{0, 0, 0}, {a, 0, 0}, {a, b, 0}, {0, b, 0},
                               {0, 0, c}, {a, 0, c}, {a, b, c}, {0, b, c}};
        std::vector<std::vector<int>> f = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                           {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
        return polyhedron(std::move(v), std::move(f));
    }

    /// Unit right simplex conv{0, e1, ..., ed}.
    static Polytope simplex(int d) {
        if (d == 2) return polygon({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, 2);
        if (d != 3) throw std::invalid_argument("simplex: d must be 2 or 3");
        std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        std::vector<std::vector<int>> f = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
        return polyhedron(std::move(v), std::move(f));
    }

    /// Inscribed polytopal approximation of the unit ball: a geodesic
    /// icosphere for d=3 (>= min_facets triangles), a regular n-gon for d=2.
    static Polytope ball_approx(int d, int min_facets) {
        if (d == 2) {
            int n = std::max(3, min_facets);
            std::vector<Vec3> ring;
            for (int i = 0; i < n; ++i) {
                double a = 2.0 * 3.14159265358979323846 * i / n;
                ring.push_back({std::cos(a), std::sin(a), 0});
            }
            return polygon(std::move(ring), 2);
        }
        if (d != 3) throw std::invalid_argument("ball_approx: d must be 2 or 3");
        int freq = 1;
        while (20 * freq * freq < min_facets) ++freq;
        return icosphere(freq);
    }

    // ---- basic accessors -------------------------------------------------

    int dim() const { return dim_; }
    int ambient_dim() const { return ambient_; }
    const std::vector<Vec3>& vertices() const { return verts_; }
    const std::vector<std::vector<int>>& facet_cycles() const { return facets_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const Frame& frame() const { return frame_; }
    const std::vector<Hyperplane>& facet_planes() const { return planes_; }

    std::size_t vertex_count() const { return verts_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t facet_count() const { return facets_.size(); }

    // ---- metric queries ---------------------------------------------------

    /// Intrinsic dim-volume (length / area / volume; 1 for points).
    double volume() const { return volume_; }

    double surface_area() const {
        if (dim_ != 3) throw std::logic_error("surface_area: dim must be 3");
        double s = 0.0;
        for (const auto& a : facet_areas_) s += a;
        return s;
    }

    /// Intrinsic volume V_j, 0 <= j <= dim.
    ///   dim 3: V3 = volume, V2 = surface/2, V1 = edge-angle sum/(2 pi), V0 = 1
    ///   dim 2: V2 = area, V1 = perimeter/2, V0 = 1
    ///   dim 1: V1 = length, V0 = 1
    double intrinsic_volume(int j) const {
        if (j < 0 || j > dim_) throw std::invalid_argument("intrinsic_volume: j out of range");
        if (j == 0) return 1.0;
        if (dim_ == 1) return volume_;
        if (dim_ == 2) {
            if (j == 2) return volume_;
            return 0.5 * perimeter();
        }
        if (j == 3) return volume_;
        if (j == 2) return 0.5 * surface_area();
        return v1_edge_sum();  // j == 1
    }

    double perimeter() const {
        if (dim_ != 2) throw std::logic_error("perimeter: dim must be 2");
        double s = 0.0;
        for (std::size_t i = 0; i < verts_.size(); ++i)
            s += dist(verts_[i], verts_[(i + 1) % verts_.size()]);
        return s;
    }

    double diameter() const { return diameter_; }

    std::pair<double, double> support_interval(const Vec3& u) const {
        if (norm2(u) <= 0.0) throw std::invalid_argument("support_interval: zero direction");
        double lo = dot(u, verts_[0]), hi = lo;
        for (const auto& v : verts_) {
            double s = dot(u, v);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        return {lo, hi};
    }

    double width(const Vec3& u) const {
        auto [lo, hi] = support_interval(u);
        return hi - lo;
    }

    Vec3 vertex_centroid() const { return centroid_; }

    bool contains(const Vec3& p, double tol) const {
        if (dim_ == 3) {
            double r2 = norm2(p);
            if (inradius_ > 0.0 && r2 < inradius_ * inradius_) return true;
            if (r2 > (outradius_ + tol) * (outradius_ + tol)) return false;
            for (const auto& h : planes_)
                if (h.signed_dist(p) > tol) return false;
            return true;
        }
        if (dim_ == 2) {
            if (std::abs(dot(frame_.normal, p - frame_.origin)) > tol) return false;
            auto q = to_plane(p);
            std::size_t n = verts_.size();
            for (std::size_t i = 0; i < n; ++i) {
                auto a = to_plane(verts_[i]);
                auto b = to_plane(verts_[(i + 1) % n]);
                double crossz = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
                if (crossz < -tol * dist(verts_[i], verts_[(i + 1) % n])) return false;
            }
            return true;
        }
        throw std::logic_error("contains: unsupported dim");
    }

    // ---- structure ---------------------------------------------------------

    /// All j-dimensional faces; faces(dim) = {*this}.
    std::vector<Polytope> faces(int j) const {
        if (j < 0 || j > dim_) throw std::invalid_argument("faces: j out of range");
        if (j == dim_) return {*this};
        std::vector<Polytope> out;
        if (j == 0) {
            for (const auto& v : verts_) out.push_back(point_poly(v, ambient_));
            return out;
        }
        if (dim_ == 3 && j == 2) {
            for (const auto& cyc : facets_) {
                std::vector<Vec3> ring;
                for (int i : cyc) ring.push_back(verts_[i]);
                out.push_back(polygon(std::move(ring), 3));
            }
            return out;
        }
        if (dim_ == 3 && j == 1) {
            for (const auto& [a, b] : edges_) out.push_back(segment(verts_[a], verts_[b], 3));
            return out;
        }
        // dim 2, j == 1: boundary edges
        for (std::size_t i = 0; i < verts_.size(); ++i)
            out.push_back(segment(verts_[i], verts_[(i + 1) % verts_.size()], ambient_));
        return out;
    }

    bool euler_ok() const {
        if (dim_ != 3) return true;
        return long(verts_.size()) - long(edges_.size()) + long(facets_.size()) == 2;
    }

    /// Every vertex satisfies every supporting halfspace within tol.
    bool convexity_ok(double tol) const {
        if (dim_ != 3) return true;
        for (const auto& h : planes_)
            for (const auto& v : verts_)
                if (h.signed_dist(v) > tol) return false;
        return true;
    }

    // ---- transforms (value-returning) ---------------------------------------

    Polytope scaled(double s) const {
        Polytope P = *this;
        for (auto& v : P.verts_) v = v * s;
        P.frame_.origin = frame_.origin * s;
        P.finalize();
        return P;
    }

    Polytope translated(const Vec3& t) const {
        Polytope P = *this;
        for (auto& v : P.verts_) v = v + t;
        P.frame_.origin = frame_.origin + t;
        P.finalize();
        return P;
    }

    Polytope rotated(const Mat3& R) const {
        Polytope P = *this;
        for (auto& v : P.verts_) v = R.apply(v);
        P.frame_.origin = R.apply(frame_.origin);
        P.frame_.u = R.apply(frame_.u);
        P.frame_.v = R.apply(frame_.v);
        P.frame_.normal = R.apply(frame_.normal);
        P.finalize();
        return P;
    }

    /// Intrinsic 2D coordinates of the vertex ring (dim 2 only).
    std::array<double, 2> to_plane(const Vec3& p) const {
        return {dot(p - frame_.origin, frame_.u), dot(p - frame_.origin, frame_.v)};
    }

    Tolerances default_tolerances() const {
        return {1e-9 * diameter_, 1e-12 * std::max(volume_, 1e-300)};
    }

private:
    static Polytope icosphere(int freq) {
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        std::vector<Vec3> base = {
            {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
            {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
            {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
        for (auto& v : base) v = normalized(v);
        const int F[20][3] = {{0, 11, 5},  {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},   {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},   {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},   {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
        std::vector<Vec3> verts;
        std::map<std::array<long long, 3>, int> index;
        auto key_of = [](const Vec3& p) {
            auto q = [](double x) { return llround(x * 1e8); };
            return std::array<long long, 3>{q(p.x), q(p.y), q(p.z)};
        };
        // Shared lattice points are recomputed from different corner triples;
        // search the 27 neighbouring key cells so tiny fp differences cannot
        // duplicate a vertex.
        auto add_vertex = [&](const Vec3& p) {
            auto k = key_of(p);
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy)
                    for (long long dz = -1; dz <= 1; ++dz) {
                        auto it = index.find({k[0] + dx, k[1] + dy, k[2] + dz});
                        if (it != index.end() && dist(verts[it->second], p) < 1e-7)
                            return it->second;
                    }
            verts.push_back(p);
            index.emplace(k, int(verts.size()) - 1);
            return int(verts.size()) - 1;
        };
        std::vector<std::vector<int>> tris;
        for (const auto& f : F) {
            const Vec3 &A = base[f[0]], &B = base[f[1]], &C = base[f[2]];
            // lattice points p(i,j) = normalize(A + i*(B-A)/freq + j*(C-A)/freq)
            std::vector<std::vector<int>> grid(freq + 1);
            for (int i = 0; i <= freq; ++i) {
                grid[i].resize(freq - i + 1);
                for (int j = 0; j <= freq - i; ++j) {
                    Vec3 p = A + (B - A) * (double(i) / freq) + (C - A) * (double(j) / freq);
                    grid[i][j] = add_vertex(normalized(p));
                }
            }
            for (int i = 0; i < freq; ++i)
                for (int j = 0; j < freq - i; ++j) {
                    tris.push_back({grid[i][j], grid[i + 1][j], grid[i][j + 1]});
                    if (j < freq - i - 1)
                        tris.push_back({grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]});
                }
        }
        return polyhedron(std::move(verts), std::move(tris));
    }

    double v1_edge_sum() const {
        // V1 = (1/2pi) * sum over edges of length x (pi - interior dihedral);
        // the exterior angle equals the angle between the outward normals.
        double s = 0.0;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            auto [fa, fb] = edge_facets_[e];
            double ang = angle_between(planes_[fa].normal, planes_[fb].normal);
            s += dist(verts_[edges_[e].first], verts_[edges_[e].second]) * ang;
        }
        return s / (2.0 * 3.14159265358979323846);
    }

    void finalize() {
        centroid_ = geomdetail::mean_point(verts_);
        diameter_ = 0.0;
        for (std::size_t i = 0; i < verts_.size(); ++i)
            for (std::size_t j = i + 1; j < verts_.size(); ++j)
                diameter_ = std::max(diameter_, dist(verts_[i], verts_[j]));

        planes_.clear();
        facet_areas_.clear();
        edges_.clear();
        edge_facets_.clear();

        if (dim_ == 0) { volume_ = 1.0; return; }
        if (dim_ == 1) { volume_ = dist(verts_[0], verts_[1]); return; }
        if (dim_ == 2) {
            double a2 = norm(geomdetail::newell_normal(verts_));
            volume_ = 0.5 * a2;
            return;
        }

        // dim 3: facet planes (outward), areas, edge->facet incidence, volume.
        std::map<std::pair<int, int>, std::vector<int>> edge_map;
        volume_ = 0.0;
        for (std::size_t f = 0; f < facets_.size(); ++f) {
            const auto& cyc = facets_[f];
            std::vector<Vec3> ring;
            for (int i : cyc) ring.push_back(verts_[i]);
            Vec3 nw = geomdetail::newell_normal(ring);
            double area = 0.5 * norm(nw);
            Vec3 n = nw / std::max(norm(nw), 1e-300);
            Vec3 fc = geomdetail::mean_point(ring);
            if (dot(n, fc - centroid_) < 0.0) n = -n;
            planes_.push_back({n, dot(n, fc)});
            facet_areas_.push_back(area);
            double h = dot(n, fc - centroid_);
            volume_ += area * h / 3.0;
            for (std::size_t k = 0; k < cyc.size(); ++k) {
                int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
                edge_map[{std::min(a, b), std::max(a, b)}].push_back(int(f));
            }
        }
        for (const auto& [e, fs] : edge_map) {
            if (fs.size() != 2) continue;  // open edge on a degenerate input
            edges_.push_back(e);
            edge_facets_.push_back({fs[0], fs[1]});
        }
        inradius_ = 0.0;
        outradius_ = 0.0;
        if (!planes_.empty()) {
            inradius_ = planes_[0].offset;
            for (const auto& h : planes_) inradius_ = std::min(inradius_, h.offset);
            inradius_ = std::max(inradius_, 0.0);
        }
        for (const auto& v : verts_) outradius_ = std::max(outradius_, norm(v));
    }

    int dim_ = 3;
    int ambient_ = 3;
    std::vector<Vec3> verts_;
    std::vector<std::vector<int>> facets_;  // dim 3 only; dim 2 uses vertex order
    Frame frame_;

    // caches
    std::vector<Hyperplane> planes_;
    std::vector<double> facet_areas_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::pair<int, int>> edge_facets_;
    Vec3 centroid_;
    double volume_ = 0.0;
    double diameter_ = 0.0;
    double inradius_ = 0.0;
    double outradius_ = 0.0;
};

// ---- clipping --------------------------------------------------------------

struct ClipResult {
    enum class Status { split, miss };
    Status status = Status::miss;
    Polytope above, below, facet;
    bool is_split() const { return status == Status::split; }
};

namespace geomdetail {

inline int classify(double s, double eps) { return s > eps ? 1 : (s < -eps ? -1 : 0); }

/// Clip a polygon (dim 2, possibly embedded) by the trace of hyperplane H on
/// its supporting plane. Returns miss when H is parallel to the polygon or
/// cuts off nothing of relative area above tol.eps_vol.
inline ClipResult clip_polygon(const Polytope& P, const Hyperplane& H, const Tolerances& tol) {
    ClipResult res;
    const auto& vs = P.vertices();
    const std::size_t n = vs.size();
    // in-plane line: m . xi = b in intrinsic coordinates
    double mu = dot(H.normal, P.frame().u);
    double mv = dot(H.normal, P.frame().v);
    double b = H.offset - dot(H.normal, P.frame().origin);
    double mlen = std::hypot(mu, mv);
    if (mlen < 1e-12) return res;  // parallel to the polygon plane

    std::vector<double> s(n);
    std::vector<int> cls(n);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto q = P.to_plane(vs[i]);
        s[i] = (mu * q[0] + mv * q[1] - b) / mlen;
        cls[i] = classify(s[i], tol.eps_geom);
        any_pos |= cls[i] > 0;
        any_neg |= cls[i] < 0;
    }
    if (!any_pos || !any_neg) return res;

    std::vector<Vec3> up, down, cut;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if (cls[i] >= 0) up.push_back(vs[i]);
        if (cls[i] <= 0) down.push_back(vs[i]);
        if (cls[i] == 0) cut.push_back(vs[i]);
        if (cls[i] * cls[j] == -1) {
            double t = s[i] / (s[i] - s[j]);
            Vec3 p = vs[i] + (vs[j] - vs[i]) * t;
            up.push_back(p);
            down.push_back(p);
            cut.push_back(p);
        }
    }
    dedup_ring(cut, tol.eps_geom);
    if (cut.size() != 2 || up.size() < 3 || down.size() < 3) return res;

    Polytope above = Polytope::polygon(std::move(up), P.ambient_dim());
    Polytope below = Polytope::polygon(std::move(down), P.ambient_dim());
    if (above.volume() < tol.eps_vol || below.volume() < tol.eps_vol) return res;
    res.status = ClipResult::Status::split;
    res.above = std::move(above);
    res.below = std::move(below);
    res.facet = Polytope::segment(cut[0], cut[1], P.ambient_dim());
    return res;
}

inline ClipResult clip_polyhedron(const Polytope& P, const Hyperplane& H, const Tolerances& tol) {
    ClipResult res;
    const auto& vs = P.vertices();
    const std::size_t n = vs.size();
    std::vector<double> s(n);
    std::vector<int> cls(n);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = H.signed_dist(vs[i]);
        cls[i] = classify(s[i], tol.eps_geom);
        any_pos |= cls[i] > 0;
        any_neg |= cls[i] < 0;
    }
    if (!any_pos || !any_neg) return res;

    // Shared cut points, keyed by the edge they lie on so neighbouring facets
    // agree exactly; on-plane vertices are kept on both sides.
    std::map<std::pair<int, int>, Vec3> edge_cut;
    auto cut_point = [&](int a, int b) -> Vec3 {
        auto key = std::minmax(a, b);
        auto it = edge_cut.find(key);
        if (it != edge_cut.end()) return it->second;
        double t = s[a] / (s[a] - s[b]);
        Vec3 p = vs[a] + (vs[b] - vs[a]) * t;
        edge_cut.emplace(key, p);
        return p;
    };

    std::vector<std::vector<Vec3>> up_cycles, down_cycles;
    std::vector<Vec3> cap;
    for (const auto& cyc : P.facet_cycles()) {
        std::vector<Vec3> up, down;
        bool strict_up = false, strict_down = false;
        for (std::size_t k = 0; k < cyc.size(); ++k) {
            int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
            if (cls[a] >= 0) up.push_back(vs[a]);
            if (cls[a] <= 0) down.push_back(vs[a]);
            strict_up |= cls[a] > 0;
            strict_down |= cls[a] < 0;
            if (cls[a] == 0) cap.push_back(vs[a]);
            if (cls[a] * cls[b] == -1) {
                Vec3 p = cut_point(a, b);
                up.push_back(p);
                down.push_back(p);
                cap.push_back(p);
            }
        }
        dedup_ring(up, tol.eps_geom);
        dedup_ring(down, tol.eps_geom);
        if (strict_up && up.size() >= 3) up_cycles.push_back(std::move(up));
        if (strict_down && down.size() >= 3) down_cycles.push_back(std::move(down));
    }
    dedup_ring(cap, tol.eps_geom);
    if (cap.size() < 3) return res;
    sort_cycle_in_plane(cap, H.normal);
    up_cycles.push_back(cap);
    down_cycles.push_back(cap);

    // Vertex ids are assigned by distance snapping at eps_geom so that all
    // facet cycles of a child reference one shared vertex set even when a cut
    // point lands within tolerance of an original vertex.
    auto assemble = [&](const std::vector<std::vector<Vec3>>& cycles) {
        std::vector<Vec3> verts;
        auto id_of = [&](const Vec3& p) {
            for (std::size_t i = 0; i < verts.size(); ++i)
                if (dist(verts[i], p) <= tol.eps_geom) return int(i);
            verts.push_back(p);
            return int(verts.size()) - 1;
        };
        std::vector<std::vector<int>> fcycles;
        for (const auto& ring : cycles) {
            std::vector<int> cyc;
            for (const auto& p : ring) {
                int id = id_of(p);
                if (cyc.empty() || cyc.back() != id) cyc.push_back(id);
            }
            while (cyc.size() > 1 && cyc.front() == cyc.back()) cyc.pop_back();
            if (cyc.size() >= 3) fcycles.push_back(std::move(cyc));
        }
        return Polytope::polyhedron(std::move(verts), std::move(fcycles));
    };

    Polytope above = assemble(up_cycles);
    Polytope below = assemble(down_cycles);
    if (above.volume() < tol.eps_vol || below.volume() < tol.eps_vol) return res;

    res.status = ClipResult::Status::split;
    res.above = std::move(above);
    res.below = std::move(below);
    res.facet = Polytope::polygon(std::move(cap), 3);
    return res;
}

inline ClipResult clip_segment(const Polytope& P, const Hyperplane& H, const Tolerances& tol) {
    ClipResult res;
    const Vec3 &a = P.vertices()[0], &b = P.vertices()[1];
    double sa = H.signed_dist(a), sb = H.signed_dist(b);
    if (classify(sa, tol.eps_geom) * classify(sb, tol.eps_geom) != -1) return res;
    double t = sa / (sa - sb);
    Vec3 p = a + (b - a) * t;
    res.status = ClipResult::Status::split;
    bool a_above = sa > 0;
    res.above = Polytope::segment(a_above ? a : b, p, P.ambient_dim());
    res.below = Polytope::segment(a_above ? b : a, p, P.ambient_dim());
    res.facet = Polytope::point_poly(p, P.ambient_dim());
    return res;
}

}  // namespace geomdetail

/// Split P by H into the sub-polytope above H (normal side), the one below,
/// and the separating facet P n H. Returns miss when H does not cut off
/// positive volume on both sides; callers decide whether to resample.
inline ClipResult clip(const Polytope& P, const Hyperplane& H, const Tolerances& tol) {
    switch (P.dim()) {
        case 3: return geomdetail::clip_polyhedron(P, H, tol);
        case 2: return geomdetail::clip_polygon(P, H, tol);
        case 1: return geomdetail::clip_segment(P, H, tol);
        default: throw std::invalid_argument("clip: unsupported dim");
    }
}

inline ClipResult clip(const Polytope& P, const Hyperplane& H) {
    return clip(P, H, P.default_tolerances());
}

/// The section P n H as a (dim-1)-polytope, without building the children.
/// Empty when H misses the interior of P.
inline std::optional<Polytope> cross_section(const Polytope& P, const Hyperplane& H,
                                             const Tolerances& tol) {
    if (P.dim() == 3) {
        const auto& vs = P.vertices();
        std::vector<double> s(vs.size());
        std::vector<int> cls(vs.size());
        bool any_pos = false, any_neg = false;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            s[i] = H.signed_dist(vs[i]);
            cls[i] = geomdetail::classify(s[i], tol.eps_geom);
            any_pos |= cls[i] > 0;
            any_neg |= cls[i] < 0;
        }
        if (!any_pos || !any_neg) return std::nullopt;
        std::vector<Vec3> cap;
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (cls[i] == 0) cap.push_back(vs[i]);
        for (const auto& [a, b] : P.edges()) {
            if (cls[a] * cls[b] == -1) {
                double t = s[a] / (s[a] - s[b]);
                cap.push_back(vs[a] + (vs[b] - vs[a]) * t);
            }
        }
        geomdetail::dedup_ring(cap, tol.eps_geom);
        if (cap.size() < 3) return std::nullopt;
        geomdetail::sort_cycle_in_plane(cap, H.normal);
        return Polytope::polygon(std::move(cap), 3);
    }
    if (P.dim() == 2) {
        auto r = geomdetail::clip_polygon(P, H, tol);
        if (!r.is_split()) return std::nullopt;
        return r.facet;
    }
    throw std::invalid_argument("cross_section: unsupported dim");
}

inline std::optional<Polytope> cross_section(const Polytope& P, const Hyperplane& H) {
    return cross_section(P, H, P.default_tolerances());
}

}  // namespace stit
