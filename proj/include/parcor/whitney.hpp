#pragma once

#include <cstdint>
#include <deque>
#include <unordered_set>
#include <vector>

#include "parcor/dyadic.hpp"
#include "parcor/surface.hpp"

// Parabolic Whitney decomposition of Omega = R^{n+1} \ Sigma, Whitney
// regions U_Q attached to boundary cubes, and the chain regions U~_Q.
//
// Whitney boxes are dyadic parabolic boxes (spatial side L, time side L^2)
// aligned to the absolute lattice.  Every emitted box satisfies
//   4 diam(I) <= dist(4I, Sigma) <= dist(I, Sigma) <= 40 diam(I),
// with diam the parabolic diameter (sqrt(n) + 1) L.  Boxes are generated
// lazily per query window by top-down subdivision: the first box that
// clears the (slightly strengthened) lower bound is emitted, so adjacent
// boxes have comparable sizes.

namespace parcor {

struct WhitneyBox {
    ParBox box;
    double side = 0;        // spatial side L; time side L^2
    double dist_sigma = 0;  // dist(I, Sigma)
    double dist_4I = 0;     // dist(4I, Sigma)

    double diam() const { return (std::sqrt(double(box.n)) + 1.0) * side; }

    // Parabolic concentric dilate: spatial side a*L, time side (a*L)^2.
    ParBox dilate(double a) const {
        ParBox d = box;
        for (int i = 0; i < box.n; ++i) {
            double c = 0.5 * (box.lo[i] + box.hi[i]);
            d.lo[i] = c - 0.5 * a * side;
            d.hi[i] = c + 0.5 * a * side;
        }
        double tc = 0.5 * (box.tlo + box.thi);
        d.tlo = tc - 0.5 * a * a * side * side;
        d.thi = tc + 0.5 * a * a * side * side;
        return d;
    }
};

namespace detail {
// Emission threshold: a hair above the asserted 4, so that minimizer
// tolerance can never push an emitted box below the paper bound.
inline constexpr double kWhitneyEmit = 4.25;
}  // namespace detail

class WhitneyDecomposition {
  public:
    using Prune = std::function<bool(const ParBox&)>;

    // Cover window cap Omega by Whitney boxes.  min_side floors the
    // subdivision (points closer to Sigma than ~min_side stay uncovered).
    // `prune` may drop a box and its entire subtree.
    static WhitneyDecomposition build(const Surface& sigma, const ParabolicCylinder& window,
                                      double min_side = 0, Prune prune = nullptr) {
        WhitneyDecomposition W;
        W.sigma_ = &sigma;
        W.prune_ = std::move(prune);
        double dc = sigma.delta(window.center, 1e-4 * window.radius).value;
        if (min_side <= 0) min_side = std::max(4 * sigma.boundary_tolerance(), 1e-7 * window.radius);
        if (dc + window.radius < 4 * sigma.boundary_tolerance())
            throw std::runtime_error("whitney_decompose: window sits inside the sampling tolerance shell");
        // roots large enough that the 40 diam upper bound cannot be violated
        // by fiat at the top level
        double need = (dc + 3 * window.radius) / 20.0;
        double root = min_side;
        while (root < need || root < window.radius / 2) root *= 2;
        W.min_side_ = min_side;
        int n = sigma.dim();
        // enumerate root cells intersecting the window
        long lo[kMaxSpatialDim] = {}, hi[kMaxSpatialDim] = {};
        for (int a = 0; a < n; ++a) {
            lo[a] = long(std::floor((window.center.x[a] - window.radius) / root));
            hi[a] = long(std::floor((window.center.x[a] + window.radius) / root));
        }
        long tlo = long(std::floor((window.center.t - sqr(window.radius)) / sqr(root)));
        long thi = long(std::floor((window.center.t + sqr(window.radius)) / sqr(root)));
        std::vector<long> ix(std::size_t(n), 0);
        std::function<void(int)> rec = [&](int a) {
            if (a == n) {
                for (long it = tlo; it <= thi; ++it) {
                    ParBox b;
                    b.n = n;
                    for (int d = 0; d < n; ++d) {
                        b.lo[d] = double(ix[std::size_t(d)]) * root;
                        b.hi[d] = b.lo[d] + root;
                    }
                    b.tlo = double(it) * sqr(root);
                    b.thi = b.tlo + sqr(root);
                    W.subdivide(b, root, window);
                }
                return;
            }
            for (long v = lo[a]; v <= hi[a]; ++v) {
                ix[std::size_t(a)] = v;
                rec(a + 1);
            }
        };
        rec(0);
        return W;
    }

    const std::vector<WhitneyBox>& boxes() const { return boxes_; }

    // The covering box containing p, if any.
    const WhitneyBox* find(const SpaceTimePoint& p) const {
        for (const auto& w : boxes_)
            if (w.box.contains(p)) return &w;
        return nullptr;
    }

  private:
    void subdivide(const ParBox& b, double side, const ParabolicCylinder& window) {
        // skip boxes that cannot meet the window
        SpaceTimePoint wc = window.center;
        if (b.gauge_to(wc) >= window.radius) return;
        if (prune_ && prune_(b)) return;
        WhitneyBox w;
        w.box = b;
        w.side = side;
        double diam = w.diam();
        double tol = 1e-3 * diam;
        double d4 = sigma_->par_distance_box(w.dilate(4.0), tol);
        if (d4 >= detail::kWhitneyEmit * diam) {
            // a box missing Sigma lies on one side; keep the Omega side only
            if (!sigma_->omega_contains(b.center())) return;
            w.dist_4I = d4;
            w.dist_sigma = sigma_->par_distance_box(b, tol);
            boxes_.push_back(w);
            return;
        }
        if (side / 2 < min_side_) return;  // inside the shell; give up here
        if (sigma_->analytic() && sigma_->par_distance_box(b, tol) > 0 &&
            !sigma_->omega_contains(b.center()))
            return;  // entirely below the graph
        const int n = b.n;
        double hs = side / 2, ht = sqr(side) / 4;
        int nsub = 1 << n;
        for (int m = 0; m < nsub; ++m) {
            for (int q = 0; q < 4; ++q) {
                ParBox c = b;
                for (int a = 0; a < n; ++a) {
                    c.lo[a] = b.lo[a] + ((m >> a) & 1 ? hs : 0.0);
                    c.hi[a] = c.lo[a] + hs;
                }
                c.tlo = b.tlo + q * ht;
                c.thi = c.tlo + ht;
                subdivide(c, hs, window);
            }
        }
    }

    const Surface* sigma_ = nullptr;
    Prune prune_;
    double min_side_ = 0;
    std::vector<WhitneyBox> boxes_;
};

// Is dist(box, Q) <= limit?  Early-exit recursion over the cube hierarchy.
inline bool cube_box_within(const CubeTree& T, int32_t id, const ParBox& box, double limit) {
    const auto& pts = T.surface().samples();
    std::function<bool(int32_t)> rec = [&](int32_t cid) -> bool {
        const DyadicCube& q = T.cube(cid);
        double dc = box.par_to(q.center);
        if (dc + q.radius_par <= limit) return true;
        if (dc - q.radius_par > limit) return false;
        if (q.gen == T.generations() || q.samples <= 32) {
            bool hit = false;
            T.visit_members(cid, [&](uint32_t s) {
                if (!hit && box.par_to(pts.point(s)) <= limit) hit = true;
            });
            return hit;
        }
        for (int32_t c = q.first_child; c < q.first_child + q.child_count; ++c)
            if (rec(c)) return true;
        return false;
    };
    return rec(id);
}

// Parabolic distance from a cube's sample set to a box, with pruning.
inline double cube_box_distance(const CubeTree& T, int32_t id, const ParBox& box) {
    const auto& pts = T.surface().samples();
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int32_t)> rec = [&](int32_t cid) {
        const DyadicCube& q = T.cube(cid);
        if (box.par_to(q.center) - q.radius_par >= best) return;
        if (q.gen == T.generations() || q.samples <= 32) {
            T.visit_members(cid, [&](uint32_t s) { best = std::min(best, box.par_to(pts.point(s))); });
            return;
        }
        for (int32_t c = q.first_child; c < q.first_child + q.child_count; ++c) rec(c);
    };
    rec(id);
    return best;
}

// ---------------------------------------------------------------------------
// Whitney regions U_Q = union of fattened boxes I* = (1+2 tau) I over
//   W_Q = {I : l(Q)/K0 <= l(I) <= K0 l(Q), dist(I,Q) <= K0 l(Q)}.

struct WhitneyRegion {
    int32_t cube = -1;
    double k0 = 0, tau = 0;
    std::vector<WhitneyBox> boxes;          // W_Q
    std::vector<int> component_of;           // per box
    int components = 0;
    double max_dist_to_cube = 0;             // sup over U_Q corners of dist(.,Q)/ (K0 l(Q))

    bool contains(const SpaceTimePoint& p, int comp = -1) const {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (comp >= 0 && component_of[i] != comp) continue;
            if (boxes[i].dilate(1 + 2 * tau).contains(p)) return true;
        }
        return false;
    }
};

inline WhitneyRegion whitney_region(const CubeTree& T, int32_t id, double k0, double tau) {
    const DyadicCube& Q = T.cube(id);
    const Surface& sigma = T.surface();
    WhitneyRegion R;
    R.cube = id;
    R.k0 = k0;
    R.tau = tau;
    double lq = Q.ell;
    // window big enough to hold every admissible box: boxes lie within
    // parabolic distance K0 l(Q) of Q and have gauge extent <= K0 l sqrt(n)
    double reach = Q.radius_gauge + k0 * lq * (2 + std::sqrt(double(sigma.dim())));
    ParabolicCylinder window{Q.center, reach};
    const double rootn = std::sqrt(double(sigma.dim()));
    const double min_emit = detail::kWhitneyEmit * (1 + rootn) * lq / k0;
    auto prune = [&](const ParBox& b) {
        if (!cube_box_within(T, id, b, k0 * lq)) return true;
        // no descendant of a box this close to Sigma can clear the Whitney
        // bound at the smallest admissible scale l(Q)/K0
        double side = b.hi[0] - b.lo[0];
        double dmax = sigma.par_distance_box(b, 0.05 * side) + (1 + rootn) * side;
        return dmax < min_emit;
    };
    auto W = WhitneyDecomposition::build(sigma, window, lq / (2 * k0), prune);
    for (const auto& w : W.boxes()) {
        if (w.side < lq / k0 * (1 - 1e-12) || w.side > k0 * lq * (1 + 1e-12)) continue;
        if (!cube_box_within(T, id, w.box, k0 * lq)) continue;
        R.boxes.push_back(w);
    }
    if (R.boxes.empty())
        throw std::runtime_error("whitney_region: W_Q empty; K0 too small for this geometry");
    // connected components of the fattened union
    std::vector<int> parent(R.boxes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) { return parent[std::size_t(a)] == a ? a : parent[std::size_t(a)] = find(parent[std::size_t(a)]); };
    for (std::size_t i = 0; i < R.boxes.size(); ++i)
        for (std::size_t j = i + 1; j < R.boxes.size(); ++j) {
            ParBox bi = R.boxes[i].dilate(1 + 2 * tau);
            ParBox bj = R.boxes[j].dilate(1 + 2 * tau);
            bool overlap = true;
            for (int a = 0; a < bi.n && overlap; ++a)
                overlap = bi.lo[a] <= bj.hi[a] && bj.lo[a] <= bi.hi[a];
            overlap = overlap && bi.tlo <= bj.thi && bj.tlo <= bi.thi;
            if (overlap) parent[std::size_t(find(int(i)))] = find(int(j));
        }
    std::vector<int> label(R.boxes.size(), -1);
    R.component_of.resize(R.boxes.size());
    int next = 0;
    for (std::size_t i = 0; i < R.boxes.size(); ++i) {
        int root = find(int(i));
        if (label[std::size_t(root)] < 0) label[std::size_t(root)] = next++;
        R.component_of[i] = label[std::size_t(root)];
    }
    R.components = next;
    for (const auto& w : R.boxes) {
        ParBox f = w.dilate(1 + 2 * tau);
        // corners of the fattened box
        for (int m = 0; m < (1 << sigma.dim()); ++m)
            for (double tt : {f.tlo, f.thi}) {
                SpaceTimePoint c{Vec(sigma.dim()), tt};
                for (int a = 0; a < sigma.dim(); ++a) c.x[a] = (m >> a) & 1 ? f.hi[a] : f.lo[a];
                R.max_dist_to_cube = std::max(R.max_dist_to_cube, T.dist_to_cube(c, id) / (k0 * lq));
            }
    }
    return R;
}

// ---------------------------------------------------------------------------
// Chain regions: breadth-first closure over overlapping Whitney cylinders
// C(Y,s,delta(Y,s)/2) whose sizes stay within [eps^3 l(Q), eps^-3 l(Q)],
// chain length capped at floor(1/eps).  Chains are not time directed.

struct ChainCylinder {
    SpaceTimePoint center;
    double delta = 0;  // cylinder radius = delta/2
    int depth = 0;     // chain position (1 = touches U_Q^i directly)
    int component = 0; // seed component of U_Q
};

struct ChainRegion {
    int32_t cube = -1;
    double eps = 0;
    std::vector<ChainCylinder> cylinders;

    bool contains(const SpaceTimePoint& p) const {
        for (const auto& c : cylinders)
            if (gauge_dist(p, c.center) < c.delta / 2) return true;
        return false;
    }
};

inline ChainRegion chain_region(const CubeTree& T, const WhitneyRegion& U, double eps,
                                std::size_t max_cylinders = 512) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("chain_region: eps must be in (0,1)");
    const Surface& sigma = T.surface();
    const DyadicCube& Q = T.cube(U.cube);
    const double lq = Q.ell;
    const double dmin = eps * eps * eps * lq;
    const double dmax = lq / (eps * eps * eps);
    const int cap = int(1.0 / eps);
    ChainRegion out;
    out.cube = U.cube;
    out.eps = eps;
    double dtol = dmin / 64;

    // lattice key for dedupe: (scale level, quantized coords)
    auto lattice_key = [&](const SpaceTimePoint& p, int lvl, double q) {
        int64_t ix[kMaxSpatialDim] = {};
        for (int a = 0; a < sigma.dim(); ++a) ix[a] = int64_t(std::floor(p.x[a] / q));
        uint64_t key = uint64_t(lvl) << 58;
        for (int a = 0; a < sigma.dim(); ++a) key = key * 1000003u + uint64_t(ix[a] & 0x3fffffff);
        key = key * 1000003u + uint64_t(int64_t(std::floor(p.t / (q * q))) & 0x3fffffff);
        return key;
    };
    std::unordered_set<uint64_t> seen;
    std::deque<ChainCylinder> queue;

    auto try_add = [&](SpaceTimePoint p, int depth, int comp) {
        if (out.cylinders.size() >= max_cylinders) return;
        double d = sigma.delta(p, dtol).value;
        if (d < dmin || d > dmax) return;
        int lvl = int(std::floor(std::log2(std::max(d, 1e-300))));
        double q = std::pow(2.0, lvl) / 4;
        // snap to the scale lattice for determinism and dedupe
        SpaceTimePoint snapped{Vec(sigma.dim()), (std::floor(p.t / (q * q)) + 0.5) * q * q};
        for (int a = 0; a < sigma.dim(); ++a) snapped.x[a] = (std::floor(p.x[a] / q) + 0.5) * q;
        uint64_t key = lattice_key(snapped, lvl, q);
        if (!seen.insert(key).second) return;
        double ds = sigma.delta(snapped, dtol).value;
        if (ds < dmin || ds > dmax) return;
        ChainCylinder c{snapped, ds, depth, comp};
        out.cylinders.push_back(c);
        if (depth < cap) queue.push_back(c);
    };

    // seeds: lattice points inside the fattened boxes of U_Q
    for (std::size_t i = 0; i < U.boxes.size(); ++i) {
        const auto& w = U.boxes[i];
        ParBox f = w.dilate(1 + 2 * U.tau);
        double q = w.side / 2;
        for (double x0 = f.lo[0] + q / 2; x0 < f.hi[0]; x0 += q)
            for (double t = f.tlo + q * q / 2; t < f.thi; t += q * q) {
                SpaceTimePoint p{Vec(sigma.dim()), t};
                p.x[0] = x0;
                if (sigma.dim() >= 2) {
                    for (double x1 = f.lo[1] + q / 2; x1 < f.hi[1]; x1 += q) {
                        p.x[1] = x1;
                        if (sigma.dim() >= 3) {
                            for (double x2 = f.lo[2] + q / 2; x2 < f.hi[2]; x2 += q) {
                                p.x[2] = x2;
                                try_add(p, 1, U.component_of[i]);
                            }
                        } else {
                            try_add(p, 1, U.component_of[i]);
                        }
                    }
                } else {
                    try_add(p, 1, U.component_of[i]);
                }
            }
    }

    // BFS expansion: candidate centers on scale lattices inside the cylinder
    // (overlapping admissible cylinders have comparable delta, so scanning
    // scales within a factor 4 loses nothing)
    while (!queue.empty() && out.cylinders.size() < max_cylinders) {
        ChainCylinder c = queue.front();
        queue.pop_front();
        double rho = c.delta / 2;
        for (double scale : {c.delta / 4, c.delta / 2, c.delta, 2 * c.delta}) {
            if (scale < dmin / 2 || scale > 2 * dmax) continue;
            double q = scale / 2;
            long nx = long(std::floor(rho / q));
            long nt = long(std::floor(rho * rho / (q * q)));
            std::function<void(int, SpaceTimePoint)> lat = [&](int a, SpaceTimePoint p) {
                if (a == sigma.dim()) {
                    for (long it = -nt; it <= nt; ++it) {
                        SpaceTimePoint p2 = p;
                        p2.t += double(it) * q * q;
                        if (gauge_dist(p2, c.center) < rho) try_add(p2, c.depth + 1, c.component);
                    }
                    return;
                }
                for (long i = -nx; i <= nx; ++i) {
                    SpaceTimePoint p2 = p;
                    p2.x[a] += double(i) * q;
                    lat(a + 1, p2);
                }
            };
            lat(0, c.center);
        }
    }
    return out;
}

}  // namespace parcor
