#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "parcor/surface.hpp"

// Parabolic Christ-David dyadic decomposition of Sigma.
//
// Construction: per generation k, a maximal 2^-k-separated net of
// Sigma-samples (cylinder gauge), grown greedily in deterministic
// sample-index order with the coarser net as seed, so nets are nested.
// Each sample is assigned to its nearest finest-generation net point and
// each net point to its nearest net point one generation up; cube
// membership is read off the chains.  Partition and nesting are exact on
// sample membership by construction.

namespace parcor {

struct DyadicCube {
    int32_t id = -1;
    int gen = 0;
    int32_t parent = -1;
    int32_t first_child = -1;  // children occupy contiguous ids
    int32_t child_count = 0;
    uint32_t net_sample = 0;  // sample index of the net point (the "center")
    SpaceTimePoint center;
    double ell = 0;           // l(Q) = 2^-k * root scale
    double sigma = 0;         // sum of member weights
    double radius_par = 0;    // max parabolic distance center -> member
    double radius_gauge = 0;  // max gauge distance center -> member
    double r_inner = 0;       // r_Q: Sigma cap C(X_Q,t_Q,r_Q) subset Q certified
    std::size_t samples = 0;

    // diam(Q) proxy used downstream; Q lies in the parabolic ball of this
    // radius about the center.
    double diam() const { return std::max(radius_par, 1e-300); }
};

class CubeTree {
  public:
    static CubeTree build(const Surface& sigma, int generations, double root_scale = 0) {
        CubeTree T;
        T.surface_ = sigma;
        T.root_scale_ = root_scale > 0 ? root_scale : sigma.bound().radius;
        T.generations_ = generations;
        double finest = T.root_scale_ * std::pow(0.5, generations);
        if (sigma.resolution() > 0 && sigma.resolution() > finest / 2)
            throw std::runtime_error(
                "build_cube_tree: sample resolution too coarse for requested depth (need <= " +
                std::to_string(finest / 2) + ")");
        T.construct();
        return T;
    }

    const Surface& surface() const { return surface_; }
    int generations() const { return generations_; }
    double root_scale() const { return root_scale_; }
    double scale_of(int gen) const { return root_scale_ * std::pow(0.5, gen); }

    const std::vector<DyadicCube>& cubes() const { return cubes_; }
    const std::vector<int32_t>& generation(int g) const { return gens_.at(std::size_t(g)); }
    const DyadicCube& cube(int32_t id) const { return cubes_[std::size_t(id)]; }
    std::size_t size() const { return cubes_.size(); }

    int32_t cube_of_sample(uint32_t i, int g) const {
        int32_t c = finest_cube_of_sample_[i];
        while (cubes_[std::size_t(c)].gen > g) c = cubes_[std::size_t(c)].parent;
        return c;
    }

    bool is_ancestor(int32_t anc, int32_t id) const {
        while (id != -1 && cubes_[std::size_t(id)].gen > cubes_[std::size_t(anc)].gen)
            id = cubes_[std::size_t(id)].parent;
        return id == anc;
    }

    void visit_members(int32_t id, const std::function<void(uint32_t)>& f) const {
        const DyadicCube& q = cubes_[std::size_t(id)];
        if (q.gen == generations_) {
            for (uint32_t s : finest_members_[std::size_t(id - finest_base_)]) f(s);
            return;
        }
        for (int32_t c = q.first_child; c < q.first_child + q.child_count; ++c) visit_members(c, f);
    }

    std::vector<uint32_t> members(int32_t id) const {
        std::vector<uint32_t> out;
        out.reserve(cubes_[std::size_t(id)].samples);
        visit_members(id, [&](uint32_t s) { out.push_back(s); });
        return out;
    }

    // Parabolic distance from a point to the cube, exact on members.
    double dist_to_cube(const SpaceTimePoint& p, int32_t id) const {
        double best = std::numeric_limits<double>::infinity();
        dist_to_cube_rec(p, id, best);
        return best;
    }

    // lambdaQ = {(X,t) in Sigma : dist(X,t,Q) < (lambda-1) diam(Q)}; for
    // lambda = 1 this is exactly Q.  `sample_id` is the sample slot of p.
    bool in_dilate(const SpaceTimePoint& p, uint32_t sample_id, int32_t id, double lambda) const {
        if (lambda < 1) throw std::invalid_argument("cube dilate needs lambda >= 1");
        const DyadicCube& q = cubes_[std::size_t(id)];
        if (cube_of_sample(sample_id, q.gen) == id) return true;
        if (lambda == 1) return false;
        return dist_to_cube(p, id) < (lambda - 1) * q.diam();
    }

    double sigma_dilate(int32_t id, double lambda) const {
        if (lambda < 1) throw std::invalid_argument("cube dilate needs lambda >= 1");
        const DyadicCube& q = cubes_[std::size_t(id)];
        if (lambda == 1) return q.sigma;
        double reach = (lambda - 1) * q.diam() + q.radius_gauge;
        double total = 0;
        const auto& pts = surface_.samples();
        surface_.index().visit_ball(q.center, 2 * reach + q.ell, [&](uint32_t i) {
            if (cube_of_sample(i, q.gen) == id ||
                dist_to_cube(pts.point(i), id) < (lambda - 1) * q.diam())
                total += pts.weight[i];
        });
        return total;
    }

    double cstar() const {
        double c = 0;
        for (const auto& q : cubes_)
            if (q.samples > 1) c = std::max(c, q.radius_par / q.ell);
        return c;
    }
    double c0() const {
        double c = std::numeric_limits<double>::infinity();
        for (const auto& q : cubes_) c = std::min(c, q.r_inner / q.ell);
        return c;
    }

  private:
    void dist_to_cube_rec(const SpaceTimePoint& p, int32_t id, double& best) const {
        const DyadicCube& q = cubes_[std::size_t(id)];
        double lower = par_dist(p, q.center) - q.radius_par;
        if (lower >= best) return;
        if (q.gen == generations_ || q.samples <= 32) {
            const auto& pts = surface_.samples();
            visit_members(id, [&](uint32_t s) { best = std::min(best, pts.par_to(s, p)); });
            return;
        }
        for (int32_t c = q.first_child; c < q.first_child + q.child_count; ++c)
            dist_to_cube_rec(p, c, best);
    }

    struct NetGrid {
        double cs = 0;
        int n = 0;
        std::unordered_map<uint64_t, std::vector<uint32_t>> cells;

        uint64_t key_of(const SpaceTimePoint& p) const {
            int64_t ix[kMaxSpatialDim] = {};
            for (int a = 0; a < n; ++a) ix[a] = int64_t(std::floor(p.x[a] / cs));
            return detail::pack_cell(ix, n, int64_t(std::floor(p.t / (cs * cs))));
        }
        void insert(const SpaceTimePoint& p, uint32_t id) { cells[key_of(p)].push_back(id); }

        template <typename F>
        void visit_near(const SpaceTimePoint& p, int ring, const F& f) const {
            int64_t lo[kMaxSpatialDim] = {}, hi[kMaxSpatialDim] = {};
            for (int a = 0; a < n; ++a) {
                int64_t ix = int64_t(std::floor(p.x[a] / cs));
                lo[a] = ix - ring;
                hi[a] = ix + ring;
            }
            int64_t it0 = int64_t(std::floor(p.t / (cs * cs)));
            int64_t cur[kMaxSpatialDim] = {};
            visit_rec(0, lo, hi, it0 - ring, it0 + ring, cur, f);
        }
        template <typename F>
        void visit_rec(int a, const int64_t* lo, const int64_t* hi, int64_t tlo, int64_t thi,
                       int64_t* cur, const F& f) const {
            if (a == n) {
                for (int64_t it = tlo; it <= thi; ++it) {
                    auto itc = cells.find(detail::pack_cell(cur, n, it));
                    if (itc == cells.end()) continue;
                    for (uint32_t id : itc->second) f(id);
                }
                return;
            }
            for (int64_t v = lo[a]; v <= hi[a]; ++v) {
                cur[a] = v;
                visit_rec(a + 1, lo, hi, tlo, thi, cur, f);
            }
        }
    };

    void construct() {
        const auto& pts = surface_.samples();
        const std::size_t N = pts.size();
        const int n = pts.n;
        const int G = generations_;

        // --- maximal nets, nested
        std::vector<std::vector<uint32_t>> nets(std::size_t(G) + 1);
        std::vector<NetGrid> grids(std::size_t(G) + 1);
        for (int g = 0; g <= G; ++g) {
            double s = scale_of(g);
            auto& net = nets[std::size_t(g)];
            auto& grid = grids[std::size_t(g)];
            grid.cs = s;
            grid.n = n;
            if (g > 0)
                for (uint32_t id : nets[std::size_t(g - 1)]) {
                    net.push_back(id);
                    grid.insert(pts.point(id), id);
                }
            for (uint32_t i = 0; i < N; ++i) {
                SpaceTimePoint p = pts.point(i);
                bool blocked = false;
                grid.visit_near(p, 1, [&](uint32_t other) {
                    if (!blocked && pts.gauge_to(other, p) < s) blocked = true;
                });
                if (!blocked) {
                    net.push_back(i);
                    grid.insert(p, i);
                }
            }
        }

        // nearest net point at generation g (gauge, ties by sample index).
        // A point in an unvisited cell after `ring` rings is at gauge
        // >= sqrt(ring) * s, which gives the stopping rule; net maximality
        // guarantees a hit within gauge < s.
        auto nearest_net = [&](const SpaceTimePoint& p, int g) -> uint32_t {
            double best = std::numeric_limits<double>::infinity();
            int64_t best_id = -1;
            double s = scale_of(g);
            for (int ring = 1; ring <= 16; ++ring) {
                grids[std::size_t(g)].visit_near(p, ring, [&](uint32_t id) {
                    double d = pts.gauge_to(id, p);
                    if (d < best || (d == best && int64_t(id) < best_id)) {
                        best = d;
                        best_id = id;
                    }
                });
                if (best <= std::sqrt(double(ring)) * s) break;
            }
            if (best_id < 0) throw std::runtime_error("cube tree: net assignment failed");
            return uint32_t(best_id);
        };

        // --- provisional parent chains between nets (indices into nets[g])
        std::vector<std::unordered_map<uint32_t, int32_t>> net_index(std::size_t(G) + 1);
        for (int g = 0; g <= G; ++g)
            for (std::size_t k = 0; k < nets[std::size_t(g)].size(); ++k)
                net_index[std::size_t(g)][nets[std::size_t(g)][k]] = int32_t(k);
        std::vector<std::vector<int32_t>> parent_of(std::size_t(G) + 1);
        for (int g = 1; g <= G; ++g) {
            auto& par = parent_of[std::size_t(g)];
            par.resize(nets[std::size_t(g)].size());
            for (std::size_t k = 0; k < nets[std::size_t(g)].size(); ++k) {
                uint32_t np = nets[std::size_t(g)][k];
                uint32_t pn = nearest_net(pts.point(np), g - 1);
                par[k] = net_index[std::size_t(g - 1)][pn];
            }
        }

        // --- final ordering: children contiguous under their parent
        std::vector<std::vector<int32_t>> order(std::size_t(G) + 1);  // final pos -> net index
        std::vector<std::vector<int32_t>> pos(std::size_t(G) + 1);    // net index -> final pos
        order[0].resize(nets[0].size());
        for (std::size_t k = 0; k < nets[0].size(); ++k) order[0][k] = int32_t(k);
        for (int g = 1; g <= G; ++g) {
            std::vector<std::vector<int32_t>> buckets(nets[std::size_t(g - 1)].size());
            for (std::size_t k = 0; k < nets[std::size_t(g)].size(); ++k)
                buckets[std::size_t(parent_of[std::size_t(g)][k])].push_back(int32_t(k));
            auto& ord = order[std::size_t(g)];
            for (int32_t pk : order[std::size_t(g - 1)])
                for (int32_t k : buckets[std::size_t(pk)]) ord.push_back(k);
        }
        for (int g = 0; g <= G; ++g) {
            pos[std::size_t(g)].resize(order[std::size_t(g)].size());
            for (std::size_t k = 0; k < order[std::size_t(g)].size(); ++k)
                pos[std::size_t(g)][std::size_t(order[std::size_t(g)][k])] = int32_t(k);
        }

        // --- materialize cubes
        gens_.assign(std::size_t(G) + 1, {});
        std::vector<int32_t> base(std::size_t(G) + 1);
        int32_t next_id = 0;
        for (int g = 0; g <= G; ++g) {
            base[std::size_t(g)] = next_id;
            for (std::size_t k = 0; k < order[std::size_t(g)].size(); ++k) {
                uint32_t np = nets[std::size_t(g)][std::size_t(order[std::size_t(g)][k])];
                DyadicCube q;
                q.id = next_id;
                q.gen = g;
                q.net_sample = np;
                q.center = pts.point(np);
                q.ell = scale_of(g);
                if (g > 0) {
                    int32_t pnet = parent_of[std::size_t(g)][std::size_t(order[std::size_t(g)][k])];
                    q.parent = base[std::size_t(g - 1)] + pos[std::size_t(g - 1)][std::size_t(pnet)];
                }
                cubes_.push_back(q);
                gens_[std::size_t(g)].push_back(next_id);
                ++next_id;
            }
        }
        for (int g = 1; g <= G; ++g)
            for (int32_t id : gens_[std::size_t(g)]) {
                auto& p = cubes_[std::size_t(cubes_[std::size_t(id)].parent)];
                if (p.first_child == -1) p.first_child = id;
                p.child_count += 1;
            }

        // --- sample assignment to finest cubes
        finest_base_ = base[std::size_t(G)];
        finest_cube_of_sample_.resize(N);
        finest_members_.assign(gens_[std::size_t(G)].size(), {});
        for (uint32_t i = 0; i < N; ++i) {
            uint32_t np = nearest_net(pts.point(i), G);
            int32_t c = finest_base_ + pos[std::size_t(G)][std::size_t(net_index[std::size_t(G)][np])];
            finest_cube_of_sample_[i] = c;
            finest_members_[std::size_t(c - finest_base_)].push_back(i);
        }

        // --- per-cube statistics
        for (int g = 0; g <= G; ++g) {
            for (uint32_t i = 0; i < N; ++i) {
                DyadicCube& q = cubes_[std::size_t(cube_of_sample(i, g))];
                q.sigma += pts.weight[i];
                q.samples += 1;
                q.radius_par = std::max(q.radius_par, pts.par_to(i, q.center));
                q.radius_gauge = std::max(q.radius_gauge, pts.gauge_to(i, q.center));
            }
        }
        // r_Q: largest r <= l(Q) with all samples of C(center,r) members of Q
        for (auto& q : cubes_) {
            double r = q.ell;
            surface_.index().visit_ball(q.center, r, [&](uint32_t i) {
                if (cube_of_sample(i, q.gen) != q.id) r = std::min(r, pts.gauge_to(i, q.center));
            });
            q.r_inner = r;
        }
    }

    Surface surface_;
    double root_scale_ = 1.0;
    int generations_ = 0;
    std::vector<DyadicCube> cubes_;
    std::vector<std::vector<int32_t>> gens_;
    std::vector<int32_t> finest_cube_of_sample_;
    std::vector<std::vector<uint32_t>> finest_members_;
    int32_t finest_base_ = 0;
};

}  // namespace parcor
