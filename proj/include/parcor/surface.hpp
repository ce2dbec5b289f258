#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "parcor/core.hpp"

// Boundary surfaces Sigma and their surface measure sigma = H^{n+1}_par|_Sigma.
//
// Two representations:
//   * analytic graph  {x_0 = psi(u, t)} over u in R^{n-1}, t in R, with an
//     evaluator that is total on the declared patch.  sigma on a patch is
//     taken to be the Lebesgue measure of its (u,t) shadow; the sample
//     weights discretize exactly that.
//   * point cloud: finite sample set with positive weights summing to the
//     declared total mass.
//
// Proximity queries run through a multi-scale bucket index keyed by
// (spatial cell, time cell) at dyadic scales; time cells are the square of
// the spatial cell, so cells are parabolic boxes.  Queries are best-first
// searches over the implicit cell tree.

namespace parcor {

// ---------------------------------------------------------------------------
// Sample storage (struct-of-arrays; hot loops scan coordinate arrays).

struct PointSet {
    int n = 0;  // ambient spatial dimension
    std::vector<double> coord[kMaxSpatialDim];
    std::vector<double> time;
    std::vector<double> weight;

    std::size_t size() const { return time.size(); }

    SpaceTimePoint point(std::size_t i) const {
        SpaceTimePoint p{Vec(n), time[i]};
        for (int a = 0; a < n; ++a) p.x[a] = coord[a][i];
        return p;
    }

    void push(const SpaceTimePoint& p, double w) {
        for (int a = 0; a < n; ++a) coord[a].push_back(p.x[a]);
        time.push_back(p.t);
        weight.push_back(w);
    }

    double gauge_to(std::size_t i, const SpaceTimePoint& p) const {
        double s2 = 0;
        for (int a = 0; a < n; ++a) s2 += sqr(coord[a][i] - p.x[a]);
        return std::max(std::sqrt(s2), std::sqrt(std::abs(time[i] - p.t)));
    }
    double par_to(std::size_t i, const SpaceTimePoint& p) const {
        double s2 = 0;
        for (int a = 0; a < n; ++a) s2 += sqr(coord[a][i] - p.x[a]);
        return std::sqrt(s2) + std::sqrt(std::abs(time[i] - p.t));
    }
};

// An axis-aligned parabolic box: spatial intervals and a time interval.
struct ParBox {
    int n = 0;
    double lo[kMaxSpatialDim] = {0, 0, 0, 0};
    double hi[kMaxSpatialDim] = {0, 0, 0, 0};
    double tlo = 0, thi = 0;

    double spatial_gap2(const Vec& x) const {
        double s2 = 0;
        for (int a = 0; a < n; ++a) {
            double g = 0;
            if (x[a] < lo[a]) g = lo[a] - x[a];
            else if (x[a] > hi[a]) g = x[a] - hi[a];
            s2 += g * g;
        }
        return s2;
    }
    double time_gap(double t) const {
        if (t < tlo) return tlo - t;
        if (t > thi) return t - thi;
        return 0;
    }
    double gauge_to(const SpaceTimePoint& p) const {
        return std::max(std::sqrt(spatial_gap2(p.x)), std::sqrt(time_gap(p.t)));
    }
    double par_to(const SpaceTimePoint& p) const {
        return std::sqrt(spatial_gap2(p.x)) + std::sqrt(time_gap(p.t));
    }
    // Min distances between two boxes.
    double par_to(const ParBox& o) const {
        double s2 = 0;
        for (int a = 0; a < n; ++a) s2 += sqr(std::max({0.0, o.lo[a] - hi[a], lo[a] - o.hi[a]}));
        double tg = std::max({0.0, o.tlo - thi, tlo - o.thi});
        return std::sqrt(s2) + std::sqrt(tg);
    }
    double gauge_to(const ParBox& o) const {
        double s2 = 0;
        for (int a = 0; a < n; ++a) s2 += sqr(std::max({0.0, o.lo[a] - hi[a], lo[a] - o.hi[a]}));
        double tg = std::max({0.0, o.tlo - thi, tlo - o.thi});
        return std::max(std::sqrt(s2), std::sqrt(tg));
    }
    bool contains(const SpaceTimePoint& p) const {
        for (int a = 0; a < n; ++a)
            if (p.x[a] < lo[a] || p.x[a] > hi[a]) return false;
        return p.t >= tlo && p.t <= thi;
    }
    SpaceTimePoint center() const {
        SpaceTimePoint c{Vec(n), 0.5 * (tlo + thi)};
        for (int a = 0; a < n; ++a) c.x[a] = 0.5 * (lo[a] + hi[a]);
        return c;
    }
};

// ---------------------------------------------------------------------------
// Multi-scale bucket index.

namespace detail {

// Exact packed cell key: up to 3 spatial indices plus a time index,
// 16 bits each with offset.  Throws if a scene exceeds the index range.
inline uint64_t pack_cell(const int64_t* ix, int n, int64_t it) {
    uint64_t key = 0;
    for (int a = 0; a < n; ++a) {
        int64_t v = ix[a] + 32768;
        if (v < 0 || v > 65535) throw std::runtime_error("bucket index: spatial cell out of range");
        key = (key << 16) | uint64_t(v);
    }
    int64_t v = it + 32768;
    if (v < 0 || v > 65535) throw std::runtime_error("bucket index: time cell out of range");
    key = (key << 16) | uint64_t(v);
    return key;
}

}  // namespace detail

class BucketIndex {
  public:
    BucketIndex() = default;

    // base_cell: spatial size of the finest cell (time side = base_cell^2).
    void build(const PointSet& pts, double base_cell, int levels = 12) {
        pts_ = &pts;
        base_ = base_cell;
        n_ = pts.n;
        const std::size_t N = pts.size();
        ids_.resize(N);
        std::iota(ids_.begin(), ids_.end(), 0u);
        std::vector<uint64_t> keys(N);
        for (std::size_t i = 0; i < N; ++i) keys[i] = cell_key(pts.point(i), 0);
        std::sort(ids_.begin(), ids_.end(),
                  [&](uint32_t a, uint32_t b) { return keys[a] < keys[b] || (keys[a] == keys[b] && a < b); });
        base_keys_.clear();
        base_off_.clear();
        for (std::size_t i = 0; i < N; ++i) {
            uint64_t k = keys[ids_[i]];
            if (base_keys_.empty() || base_keys_.back() != k) {
                base_keys_.push_back(k);
                base_off_.push_back(uint32_t(i));
            }
        }
        base_off_.push_back(uint32_t(N));
        // Coarse levels carry one representative sample per occupied cell;
        // each level is built from the previous level's representatives.
        levels_.assign(levels, Level{});
        std::vector<uint32_t> prev;
        prev.reserve(base_keys_.size());
        for (std::size_t i = 0; i + 1 < base_off_.size(); ++i) prev.push_back(ids_[base_off_[i]]);
        for (int j = 1; j < levels; ++j) {
            auto& lv = levels_[j];
            std::vector<std::pair<uint64_t, uint32_t>> cells;
            cells.reserve(prev.size());
            for (uint32_t id : prev) cells.emplace_back(cell_key(pts.point(id), j), id);
            std::sort(cells.begin(), cells.end());
            for (auto& kv : cells) {
                if (lv.keys.empty() || lv.keys.back() != kv.first) {
                    lv.keys.push_back(kv.first);
                    lv.reps.push_back(kv.second);
                }
            }
            prev = lv.reps;
        }
    }

    bool empty() const { return !pts_ || pts_->size() == 0; }
    int top_level() const { return int(levels_.size()) - 1; }

    std::pair<int64_t, double> nearest_gauge(const SpaceTimePoint& p) const {
        return search(point_box(p), false, std::numeric_limits<double>::infinity());
    }
    std::pair<int64_t, double> nearest_par(const SpaceTimePoint& p) const {
        return search(point_box(p), true, std::numeric_limits<double>::infinity());
    }
    bool any_within_gauge(const SpaceTimePoint& p, double r) const {
        return search(point_box(p), false, r, /*early_cap=*/r).second <= r;
    }
    std::pair<int64_t, double> nearest_to_box_par(const ParBox& box) const {
        return search(box, true, std::numeric_limits<double>::infinity());
    }
    std::pair<int64_t, double> nearest_to_box_gauge(const ParBox& box) const {
        return search(box, false, std::numeric_limits<double>::infinity());
    }

    // Visit every sample with gauge distance < r from p.
    void visit_ball(const SpaceTimePoint& p, double r, const std::function<void(uint32_t)>& f) const {
        const auto& pts = *pts_;
        double cs = base_;
        auto clamp_cell = [](double v) {
            return int64_t(std::clamp(std::floor(v), -32768.0, 32767.0));
        };
        int64_t xlo[kMaxSpatialDim] = {}, xhi[kMaxSpatialDim] = {};
        for (int a = 0; a < n_; ++a) {
            xlo[a] = clamp_cell((p.x[a] - r) / cs);
            xhi[a] = clamp_cell((p.x[a] + r) / cs);
        }
        int64_t tlo = clamp_cell((p.t - r * r) / (cs * cs));
        int64_t thi = clamp_cell((p.t + r * r) / (cs * cs));
        int64_t ix[kMaxSpatialDim] = {};
        visit_cells_rec(0, xlo, xhi, tlo, thi, ix, [&](uint64_t key) {
            auto [lo, hi] = base_range(key);
            for (uint32_t k = lo; k < hi; ++k)
                if (pts.gauge_to(ids_[k], p) < r) f(ids_[k]);
        });
    }

  private:
    struct Level {
        std::vector<uint64_t> keys;
        std::vector<uint32_t> reps;
    };

    ParBox point_box(const SpaceTimePoint& p) const {
        ParBox b;
        b.n = n_;
        for (int a = 0; a < n_; ++a) b.lo[a] = b.hi[a] = p.x[a];
        b.tlo = b.thi = p.t;
        return b;
    }

    template <typename F>
    void visit_cells_rec(int a, const int64_t* xlo, const int64_t* xhi, int64_t tlo, int64_t thi,
                         int64_t* ix, const F& f) const {
        if (a == n_) {
            for (int64_t it = tlo; it <= thi; ++it) f(detail::pack_cell(ix, n_, it));
            return;
        }
        for (int64_t v = xlo[a]; v <= xhi[a]; ++v) {
            ix[a] = v;
            visit_cells_rec(a + 1, xlo, xhi, tlo, thi, ix, f);
        }
    }

    double cell_size(int level) const { return base_ * double(uint64_t(1) << level); }

    uint64_t cell_key(const SpaceTimePoint& p, int level) const {
        double cs = cell_size(level);
        int64_t ix[kMaxSpatialDim] = {};
        for (int a = 0; a < n_; ++a) ix[a] = int64_t(std::floor(p.x[a] / cs));
        int64_t it = int64_t(std::floor(p.t / (cs * cs)));
        return detail::pack_cell(ix, n_, it);
    }

    std::pair<uint32_t, uint32_t> base_range(uint64_t key) const {
        auto it = std::lower_bound(base_keys_.begin(), base_keys_.end(), key);
        if (it == base_keys_.end() || *it != key) return {0, 0};
        std::size_t i = std::size_t(it - base_keys_.begin());
        return {base_off_[i], base_off_[i + 1]};
    }

    int64_t level_lookup(int level, uint64_t key) const {
        const auto& lv = levels_[level];
        auto it = std::lower_bound(lv.keys.begin(), lv.keys.end(), key);
        if (it == lv.keys.end() || *it != key) return -1;
        return lv.reps[std::size_t(it - lv.keys.begin())];
    }

    ParBox cell_box(uint32_t rep, int level) const {
        const auto& pts = *pts_;
        double cs = cell_size(level);
        ParBox b;
        b.n = n_;
        for (int a = 0; a < n_; ++a) {
            double lo = std::floor(pts.coord[a][rep] / cs) * cs;
            b.lo[a] = lo;
            b.hi[a] = lo + cs;
        }
        double tcs = cs * cs;
        b.tlo = std::floor(pts.time[rep] / tcs) * tcs;
        b.thi = b.tlo + tcs;
        return b;
    }

    struct QNode {
        double bound;
        int level;
        uint32_t rep;
        bool operator<(const QNode& o) const { return bound > o.bound; }
    };

    // Best-first search for the sample closest to `target`.  With early_cap
    // set, stops as soon as a sample within early_cap is found.
    std::pair<int64_t, double> search(const ParBox& target, bool par, double cap,
                                      double early_cap = -1) const {
        const auto& pts = *pts_;
        const int top = top_level();
        double best = std::numeric_limits<double>::infinity();
        int64_t best_id = -1;
        auto box_bound = [&](const ParBox& cell) {
            return par ? target.par_to(cell) : target.gauge_to(cell);
        };
        std::priority_queue<QNode> q;
        for (std::size_t i = 0; i < levels_[top].keys.size(); ++i) {
            ParBox cb = cell_box(levels_[top].reps[i], top);
            double b = box_bound(cb);
            if (b <= cap) q.push({b, top, levels_[top].reps[i]});
        }
        while (!q.empty()) {
            QNode nd = q.top();
            q.pop();
            if (nd.bound >= best || nd.bound > cap) break;
            if (nd.level == 0) {
                auto [lo, hi] = base_range(cell_key(pts.point(nd.rep), 0));
                for (uint32_t k = lo; k < hi; ++k) {
                    uint32_t id = ids_[k];
                    SpaceTimePoint sp = pts.point(id);
                    double d = par ? target.par_to(sp) : target.gauge_to(sp);
                    if (d < best) {
                        best = d;
                        best_id = id;
                    }
                }
                if (early_cap >= 0 && best <= early_cap) break;
                continue;
            }
            int cl = nd.level - 1;
            ParBox parent = cell_box(nd.rep, nd.level);
            double cs = cell_size(cl), tcs = cs * cs;
            int nsub = 1 << n_;
            for (int m = 0; m < nsub; ++m) {
                for (int tsub = 0; tsub < 4; ++tsub) {
                    SpaceTimePoint probe{Vec(n_), parent.tlo + (tsub + 0.5) * tcs};
                    for (int a = 0; a < n_; ++a)
                        probe.x[a] = parent.lo[a] + ((m >> a) & 1 ? 1.5 : 0.5) * cs;
                    uint64_t key = cell_key(probe, cl);
                    int64_t rep = cl == 0 ? base_rep(key) : level_lookup(cl, key);
                    if (rep < 0) continue;
                    ParBox cb = cell_box(uint32_t(rep), cl);
                    double b = box_bound(cb);
                    if (b < best && b <= cap) q.push({b, cl, uint32_t(rep)});
                }
            }
        }
        return {best_id, best};
    }

    int64_t base_rep(uint64_t key) const {
        auto [lo, hi] = base_range(key);
        if (lo == hi) return -1;
        return ids_[lo];
    }

    const PointSet* pts_ = nullptr;
    int n_ = 0;
    double base_ = 0;
    std::vector<Level> levels_;
    std::vector<uint64_t> base_keys_;
    std::vector<uint32_t> base_off_;
    std::vector<uint32_t> ids_;
};

// ---------------------------------------------------------------------------
// Surface.

enum class SurfaceKind { AnalyticGraph, PointCloud };

// psi(u, t): graph height over u in R^{n-1}; for n = 1 the u argument is empty.
using GraphEvaluator = std::function<double(const Vec& u, double t)>;

struct DeltaResult {
    double value = 0;
    bool on_boundary = false;  // p within sampling tolerance of Sigma
    SpaceTimePoint touch;      // a point of Sigma realizing the value
};

// Immutable after construction; all queries are const and safe to run
// concurrently.  Copies share the sample storage.
class Surface {
  public:
    static Surface analytic_graph(int n, GraphEvaluator psi, const ParabolicCylinder& bound,
                                  double resolution, double lip_space = 1.0, double lip_time = 1.0) {
        Surface s;
        s.kind_ = SurfaceKind::AnalyticGraph;
        s.n_ = n;
        s.psi_ = std::move(psi);
        s.bound_ = bound;
        s.h_ = resolution;
        s.lip_space_ = lip_space;
        s.lip_time_ = lip_time;
        s.samples_ = std::make_shared<PointSet>();
        s.sample_patch();
        s.index_ = std::make_shared<BucketIndex>();
        s.index_->build(*s.samples_, s.index_cell());
        return s;
    }

    static Surface point_cloud(PointSet pts, const ParabolicCylinder& bound, double spacing) {
        Surface s;
        s.kind_ = SurfaceKind::PointCloud;
        s.n_ = pts.n;
        s.bound_ = bound;
        s.h_ = spacing;
        s.samples_ = std::make_shared<PointSet>(std::move(pts));
        s.total_mass_ = 0;
        for (double w : s.samples_->weight) {
            if (!(w > 0)) throw std::invalid_argument("point cloud weights must be positive");
            s.total_mass_ += w;
        }
        s.index_ = std::make_shared<BucketIndex>();
        s.index_->build(*s.samples_, s.index_cell());
        return s;
    }

    // Declare psi affine and t-independent; distance queries then use the
    // closed form (plane distance is purely spatial).
    void set_affine(const Vec& grad, double c) {
        affine_ = true;
        affine_grad_ = grad;
        affine_c_ = c;
    }
    bool affine() const { return affine_; }

    SurfaceKind kind() const { return kind_; }
    int dim() const { return n_; }
    int graph_params() const { return n_ - 1; }
    const ParabolicCylinder& bound() const { return bound_; }
    double resolution() const { return h_; }
    const PointSet& samples() const { return *samples_; }
    const BucketIndex& index() const { return *index_; }
    double total_mass() const { return total_mass_; }
    bool analytic() const { return kind_ == SurfaceKind::AnalyticGraph; }
    double lip_space() const { return lip_space_; }
    double lip_time() const { return lip_time_; }

    // Shell radius inside which a point counts as "on" a sampled surface.
    double boundary_tolerance() const { return analytic() ? 1e-9 * bound_.radius : 2.0 * h_; }

    // Signed graph side x_0 - psi(u,t); only for analytic surfaces.
    double graph_gap(const SpaceTimePoint& p) const {
        Vec u = lateral(p);
        return p.x[0] - psi_(u, p.t);
    }
    double psi(const Vec& u, double t) const { return psi_(u, t); }

    SpaceTimePoint graph_point(const Vec& u, double t) const {
        SpaceTimePoint p{Vec(n_), t};
        p.x[0] = psi_(u, t);
        for (int a = 1; a < n_; ++a) p.x[a] = u[a - 1];
        return p;
    }

    Vec lateral(const SpaceTimePoint& p) const {
        Vec u(n_ - 1);
        for (int a = 1; a < n_; ++a) u[a - 1] = p.x[a];
        return u;
    }

    // Omega membership.  Analytic graphs bound the one-sided domain
    // {x_0 > psi}; point clouds bound the full complement of the shell.
    bool omega_contains(const SpaceTimePoint& p) const {
        if (analytic()) return graph_gap(p) > 0;
        return !index_->any_within_gauge(p, boundary_tolerance());
    }

    // delta(p): smallest d such that Sigma meets the closed cylinder C(p,d),
    // i.e. the gauge distance from p to Sigma.
    DeltaResult delta(const SpaceTimePoint& p, double tol = 0) const {
        if (affine_) {
            DeltaResult r;
            double s = affine_signed(p);
            r.value = std::abs(s);
            Vec u = lateral(p);
            // foot of the spatial perpendicular
            double denom = 1 + affine_grad_.norm2();
            double lam = s / std::sqrt(denom);
            SpaceTimePoint touch{Vec(n_), p.t};
            touch.x[0] = p.x[0] - lam / std::sqrt(denom);
            for (int a = 1; a < n_; ++a)
                touch.x[a] = p.x[a] + lam * affine_grad_[a - 1] / std::sqrt(denom);
            r.touch = touch;
            if (r.value <= boundary_tolerance()) r.on_boundary = true;
            return r;
        }
        DeltaResult r = analytic() ? minimize_gauge(p, tol) : cloud_gauge(p);
        if (r.value <= boundary_tolerance()) {
            r.on_boundary = true;
            r.value = std::max(r.value, 0.0);
        }
        return r;
    }

    // Parabolic distance dist(p, Sigma); satisfies delta <= dist <= 2 delta.
    // `tol` relaxes the minimizer's step floor (0 = full precision).
    double par_distance(const SpaceTimePoint& p, double tol = 0) const {
        if (affine_) return std::abs(affine_signed(p));
        if (!analytic()) return index_->nearest_par(p).second;
        Vec u(n_ - 1);
        double t = 0;
        auto f = [&](const Vec& uu, double tt) { return par_dist(p, graph_point(uu, tt)); };
        return compass(p, f, u, t, tol);
    }

    // Parabolic distance from an axis-aligned parabolic box to Sigma.
    double par_distance_box(const ParBox& box, double tol = 0) const {
        if (affine_) {
            // signed spatial distance is affine; extremes at box corners
            double smin = std::numeric_limits<double>::infinity(), smax = -smin;
            for (int m = 0; m < (1 << n_); ++m) {
                SpaceTimePoint c{Vec(n_), box.tlo};
                for (int a = 0; a < n_; ++a) c.x[a] = (m >> a) & 1 ? box.hi[a] : box.lo[a];
                double s = affine_signed(c);
                smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
            if (smin <= 0 && smax >= 0) return 0;
            return std::min(std::abs(smin), std::abs(smax));
        }
        if (!analytic()) return index_->nearest_to_box_par(box).second;
        Vec u(n_ - 1);
        double t = 0;
        auto f = [&](const Vec& uu, double tt) { return box.par_to(graph_point(uu, tt)); };
        return compass(box.center(), f, u, t, tol);
    }

    // sigma of the open cylinder C(c,r): sum of sample weights inside.
    double sigma_ball(const SpaceTimePoint& c, double r) const {
        double m = 0;
        index_->visit_ball(c, r, [&](uint32_t i) { m += samples_->weight[i]; });
        return m;
    }

  private:
    // signed spatial distance to the affine plane (positive on the Omega side)
    double affine_signed(const SpaceTimePoint& p) const {
        double v = p.x[0] - affine_c_;
        for (int a = 1; a < n_; ++a) v -= affine_grad_[a - 1] * p.x[a];
        return v / std::sqrt(1 + affine_grad_.norm2());
    }

    double index_cell() const { return std::max(2.0 * h_, 1e-9 * bound_.radius); }

    void sample_patch() {
        int k = n_ - 1;
        auto& ps = *samples_;
        ps.n = n_;
        double r = bound_.radius;
        const Vec& c = bound_.center.x;
        double ct = bound_.center.t;
        long nu = std::max<long>(1, std::lround(2 * r / h_));
        long nt = std::max<long>(1, std::lround(2 * r * r / (h_ * h_)));
        double du = 2 * r / double(nu);
        double dt = 2 * r * r / double(nt);
        double cellw = dt;
        for (int a = 0; a < k; ++a) cellw *= du;
        std::vector<long> idx(std::max(k, 1), 0);
        total_mass_ = 0;
        std::function<void(int)> rec = [&](int a) {
            if (a == k) {
                Vec u(k);
                for (int b = 0; b < k; ++b) u[b] = c[b + 1] - r + (idx[b] + 0.5) * du;
                for (long it = 0; it < nt; ++it) {
                    double t = ct - r * r + (it + 0.5) * dt;
                    ps.push(graph_point(u, t), cellw);
                    total_mass_ += cellw;
                }
                return;
            }
            for (idx[a] = 0; idx[a] < nu; ++idx[a]) rec(a + 1);
        };
        rec(0);
    }

    DeltaResult cloud_gauge(const SpaceTimePoint& p) const {
        auto [id, d] = index_->nearest_gauge(p);
        DeltaResult r;
        r.value = d;
        if (id >= 0) r.touch = samples_->point(std::size_t(id));
        return r;
    }

    // Compass search over (u, t) with parabolic step scaling, seeded at the
    // lateral projection of the anchor and at the nearest sample.
    template <typename F>
    double compass(const SpaceTimePoint& anchor, const F& f, Vec& u_best, double& t_best,
                   double tol = 0) const {
        int k = n_ - 1;
        struct Seed {
            Vec u;
            double t;
        };
        std::vector<Seed> seeds;
        seeds.push_back({lateral(anchor), anchor.t});
        if (!index_->empty()) {
            auto [id, d] = index_->nearest_gauge(anchor);
            (void)d;
            if (id >= 0) {
                SpaceTimePoint q = samples_->point(std::size_t(id));
                seeds.push_back({lateral(q), q.t});
            }
        }
        double best = std::numeric_limits<double>::infinity();
        u_best = Vec(k);
        t_best = anchor.t;
        for (const auto& sd : seeds) {
            Vec u = sd.u;
            double t = sd.t;
            double fv = f(u, t);
            double step =
                std::max({2 * h_, std::abs(anchor.x[0] - psi_(u, t)), 1e-6 * bound_.radius});
            double floor_step = std::max(tol, 1e-13 * std::max(1.0, bound_.radius));
            for (int iter = 0; iter < 240 && step > floor_step; ++iter) {
                bool moved = false;
                for (int a = 0; a < k; ++a) {
                    for (double sgn : {+1.0, -1.0}) {
                        Vec u2 = u;
                        u2[a] += sgn * step;
                        double f2 = f(u2, t);
                        if (f2 < fv) {
                            u = u2;
                            fv = f2;
                            moved = true;
                        }
                    }
                }
                for (double sgn : {+1.0, -1.0}) {
                    double t2 = t + sgn * step * step;
                    double f2 = f(u, t2);
                    if (f2 < fv) {
                        t = t2;
                        fv = f2;
                        moved = true;
                    }
                }
                if (!moved) step *= 0.5;
            }
            if (fv < best) {
                best = fv;
                u_best = u;
                t_best = t;
            }
        }
        return best;
    }

    DeltaResult minimize_gauge(const SpaceTimePoint& p, double tol = 0) const {
        Vec u(n_ - 1);
        double t = 0;
        auto f = [&](const Vec& uu, double tt) { return gauge_dist(p, graph_point(uu, tt)); };
        DeltaResult r;
        r.value = compass(p, f, u, t, tol);
        r.touch = graph_point(u, t);
        return r;
    }

    SurfaceKind kind_ = SurfaceKind::AnalyticGraph;
    int n_ = 1;
    bool affine_ = false;
    Vec affine_grad_;     // psi(u,t) = affine_c_ + <affine_grad_, u>
    double affine_c_ = 0;
    GraphEvaluator psi_;
    ParabolicCylinder bound_;
    double h_ = 0;
    double lip_space_ = 1.0, lip_time_ = 1.0;
    std::shared_ptr<PointSet> samples_;
    std::shared_ptr<BucketIndex> index_;
    double total_mass_ = 0;
};

}  // namespace parcor
