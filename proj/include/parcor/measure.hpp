#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "parcor/surface.hpp"

// Parabolic Hausdorff covering estimates, ADR diagnostics and the
// corkscrew-constant search.

namespace parcor {

// Unit-normalization constant: sigma(Delta(X,t,r)) = adr_unit(n) * r^{n+1}
// exactly on a hyperplane (graph-shadow measure: unit-(n-1)-ball volume
// times the time window 2r^2).
inline double adr_unit(int n) {
    // volume of the unit ball in R^{n-1}
    static const double vol[] = {1.0, 2.0, 3.14159265358979323846, 4.18879020478639098462};
    return 2.0 * vol[n - 1];
}

// ---------------------------------------------------------------------------
// Parabolic Hausdorff measure (grid-cover estimate).

struct HausdorffRow {
    double delta;
    std::size_t boxes;
    double estimate;  // boxes * delta^alpha
};

struct HausdorffEstimate {
    std::vector<HausdorffRow> table;
    double value = 0;      // estimate at the finest delta
    bool decreasing = false;  // monotone non-increasing trend across the table
};

// Cover the patch (samples of Sigma inside `patch`) by parabolic grid boxes
// of spatial side delta and time side delta^2, and tabulate N(delta)*delta^alpha.
inline HausdorffEstimate hausdorff_measure(const Surface& sigma, const ParabolicCylinder& patch,
                                           double alpha, const std::vector<double>& deltas) {
    if (!(alpha > 0) || alpha > sigma.dim() + 2)
        throw std::invalid_argument("hausdorff_measure: alpha out of (0, n+2]");
    HausdorffEstimate out;
    const auto& pts = sigma.samples();
    std::vector<uint32_t> inside;
    sigma.index().visit_ball(patch.center, patch.radius, [&](uint32_t i) { inside.push_back(i); });
    if (inside.empty()) {
        out.value = 0;
        return out;
    }
    for (double d : deltas) {
        if (!(d > 0)) throw std::invalid_argument("hausdorff_measure: delta must be positive");
        std::set<std::vector<long>> boxes;
        for (uint32_t i : inside) {
            std::vector<long> key(std::size_t(pts.n) + 1);
            for (int a = 0; a < pts.n; ++a) key[std::size_t(a)] = long(std::floor(pts.coord[a][i] / d));
            key[std::size_t(pts.n)] = long(std::floor(pts.time[i] / (d * d)));
            boxes.insert(std::move(key));
        }
        out.table.push_back({d, boxes.size(), double(boxes.size()) * std::pow(d, alpha)});
    }
    out.value = out.table.back().estimate;
    out.decreasing = true;
    for (std::size_t i = 1; i < out.table.size(); ++i)
        if (out.table[i].estimate > out.table[i - 1].estimate * (1 + 1e-12)) out.decreasing = false;
    return out;
}

// ---------------------------------------------------------------------------
// ADR / corkscrew report.

struct AdrRatioRow {
    SpaceTimePoint center;
    double scale;
    double ratio;           // sigma(Delta)/r^{n+1}, unnormalized
    double ratio_backward;  // sigma(Delta^-)/r^{n+1}
    double ratio_forward;   // sigma(Delta^+)/r^{n+1}
};

struct CorkscrewRow {
    SpaceTimePoint center;
    double scale;
    SpaceTimePoint point;
    double rho;  // certified cylinder radius
};

struct ADRReport {
    double adr_constant = 1;      // M: max of normalized ratio and its inverse
    double tb_constant = 1;       // same convention on the backward halves
    double tf_constant = 1;       // ... and the forward halves
    double corkscrew_constant = 1;  // gamma
    std::vector<AdrRatioRow> ratios;
    std::vector<CorkscrewRow> corkscrews;
};

// Survey sigma(Delta)/r^{n+1} over (center, scale) pairs and search interior
// corkscrew cylinders on a lattice of candidate centers.  Every certified
// cylinder is re-verified empty of Sigma-samples.
inline ADRReport adr_report(const Surface& sigma, const std::vector<SpaceTimePoint>& centers,
                            const std::vector<double>& scales) {
    const int n = sigma.dim();
    const double unit = adr_unit(n);
    double min_scale = 4 * sigma.resolution();
    double max_scale = sigma.bound().radius;
    for (double r : scales)
        if (r < min_scale || r > max_scale)
            throw std::invalid_argument("adr_report: scale " + std::to_string(r) +
                                        " outside resolved range [" + std::to_string(min_scale) +
                                        ", " + std::to_string(max_scale) + "]");
    ADRReport rep;
    double worst = 1, worst_tb = 1, worst_tf = 1, worst_gamma = 1;
    for (const auto& c : centers) {
        for (double r : scales) {
            AdrRatioRow row;
            row.center = c;
            row.scale = r;
            double m = 0, mb = 0, mf = 0;
            sigma.index().visit_ball(c, r, [&](uint32_t i) {
                double w = sigma.samples().weight[i];
                m += w;
                if (sigma.samples().time[i] < c.t) mb += w;
                else mf += w;
            });
            double rn = std::pow(r, n + 1);
            row.ratio = m / rn;
            row.ratio_backward = mb / rn;
            row.ratio_forward = mf / rn;
            rep.ratios.push_back(row);
            if (m > 0) {
                double q = row.ratio / unit;
                worst = std::max({worst, q, 1 / q});
                double qb = row.ratio_backward / (unit / 2);
                double qf = row.ratio_forward / (unit / 2);
                if (qb > 0) worst_tb = std::max({worst_tb, qb, 1 / qb});
                if (qf > 0) worst_tf = std::max({worst_tf, qf, 1 / qf});
            }

            // corkscrew search: axis directions, dyadic heights
            double best_rho = 0;
            SpaceTimePoint best_pt = c;
            for (int axis = 0; axis < n; ++axis) {
                for (double sgn : {+1.0, -1.0}) {
                    if (sigma.analytic() && !(axis == 0 && sgn > 0)) continue;  // interior side
                    for (double f : {0.5, 0.375, 0.25, 0.125}) {
                        SpaceTimePoint cand = c;
                        cand.x[axis] += sgn * f * r;
                        double head = gauge_dist(cand, c);
                        double rho = std::min(sigma.delta(cand).value, r - head);
                        if (rho <= best_rho) continue;
                        if (sigma.index().any_within_gauge(cand, rho * (1 - 1e-12))) continue;
                        best_rho = rho;
                        best_pt = cand;
                    }
                }
            }
            if (best_rho > 0) {
                rep.corkscrews.push_back({c, r, best_pt, best_rho});
                worst_gamma = std::max(worst_gamma, r / best_rho);
            }
        }
    }
    rep.adr_constant = worst;
    rep.tb_constant = worst_tb;
    rep.tf_constant = worst_tf;
    rep.corkscrew_constant = worst_gamma;
    return rep;
}

}  // namespace parcor
