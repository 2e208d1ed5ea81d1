#pragma once

// UV-map measures: texel coverage (occupancy and overlaps), atlas crumbliness,
// texture sampling density s_f and quasi-conformal distortion.

#include "texmetrics/mesh_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace texmetrics {

/// first_chart value for texels covered by triangles of two or more charts.
inline constexpr std::uint32_t kMultiChart = 0xfffffffeu;

struct CoverageGrid {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint16_t> count;       // covering triangles per texel, saturating
    std::vector<std::uint32_t> first_chart; // kNoIndex, a chart id, or kMultiChart

    std::size_t index(std::uint32_t x, std::uint32_t y) const { return std::size_t(y) * width + x; }
};

namespace raster_detail {

// Edge function of directed edge p->q at x, evaluated on the lexicographically
// ordered endpoints so that both triangles sharing an edge see exactly
// opposite values.
inline double edge_function(Vec2 p, Vec2 q, Vec2 x)
{
    const bool ordered = p.x < q.x || (p.x == q.x && p.y < q.y);
    const Vec2 lo = ordered ? p : q;
    const Vec2 hi = ordered ? q : p;
    const double e = (hi.x - lo.x) * (x.y - lo.y) - (hi.y - lo.y) * (x.x - lo.x);
    return ordered ? e : -e;
}

// For a counter-clockwise triangle: a "top" edge is horizontal running toward -x,
// a "left" edge runs toward -y.
inline bool is_top_left(Vec2 p, Vec2 q) { return q.y < p.y || (q.y == p.y && q.x < p.x); }

inline bool covers(Vec2 p, Vec2 q, bool top_left, Vec2 x)
{
    const double e = edge_function(p, q, x);
    return e > 0.0 || (e == 0.0 && top_left);
}

} // namespace raster_detail

/// Calls visit(x, y) for each texel whose center ((x+0.5)/W, (y+0.5)/H) lies
/// inside the UV triangle under the top-left fill rule. Texels outside the
/// grid are never visited (coverage is clipped to the unit square).
template <class Visit>
void for_each_covered_texel(Vec2 a, Vec2 b, Vec2 c, std::uint32_t width, std::uint32_t height, Visit&& visit)
{
    const double w = width, h = height;
    Vec2 p0{a.x * w, a.y * h}, p1{b.x * w, b.y * h}, p2{c.x * w, c.y * h};
    const double area2 = raster_detail::edge_function(p0, p1, p2);
    if (!(area2 != 0.0) || !std::isfinite(area2))
        return;
    if (area2 < 0.0)
        std::swap(p1, p2);

    const double min_x = std::min({p0.x, p1.x, p2.x}), max_x = std::max({p0.x, p1.x, p2.x});
    const double min_y = std::min({p0.y, p1.y, p2.y}), max_y = std::max({p0.y, p1.y, p2.y});
    const double x_lo = std::max(0.0, std::ceil(min_x - 0.5));
    const double x_hi = std::min(w - 1.0, std::floor(max_x - 0.5));
    const double y_lo = std::max(0.0, std::ceil(min_y - 0.5));
    const double y_hi = std::min(h - 1.0, std::floor(max_y - 0.5));
    if (x_lo > x_hi || y_lo > y_hi)
        return;

    const bool tl0 = raster_detail::is_top_left(p0, p1);
    const bool tl1 = raster_detail::is_top_left(p1, p2);
    const bool tl2 = raster_detail::is_top_left(p2, p0);
    const auto x0 = static_cast<std::uint32_t>(x_lo), x1 = static_cast<std::uint32_t>(x_hi);
    const auto y0 = static_cast<std::uint32_t>(y_lo), y1 = static_cast<std::uint32_t>(y_hi);
    for (std::uint32_t y = y0; y <= y1; ++y) {
        const double cy = y + 0.5;
        for (std::uint32_t x = x0; x <= x1; ++x) {
            const Vec2 center{x + 0.5, cy};
            if (raster_detail::covers(p0, p1, tl0, center) && raster_detail::covers(p1, p2, tl1, center) &&
                raster_detail::covers(p2, p0, tl2, center))
                visit(x, y);
        }
    }
}

/// Rasterizes the given mapped faces (one texture unit) into a coverage grid.
/// Faces with zero UV area are skipped. Throws std::invalid_argument on a
/// zero-sized grid.
CoverageGrid rasterize_coverage(const TexturedMesh& mesh, const ChartSet& charts, TextureDims dims,
                                std::span<const std::uint32_t> faces);

struct CoverageSummary {
    std::uint64_t texels = 0;
    std::uint64_t covered = 0;     // counter >= 1
    std::uint64_t multiple = 0;    // counter >= 2
    std::uint64_t cross_chart = 0; // covered by two or more charts

    CoverageSummary& operator+=(const CoverageSummary& o);
};

CoverageSummary summarize_coverage(const CoverageGrid& grid);

/// Covered texels over all grids divided by total texels; empty when there are no grids.
std::optional<double> occupancy(std::span<const CoverageGrid> grids);

struct OverlapStats {
    std::uint64_t flipped_face_count = 0;         // local overlaps
    std::uint64_t cross_chart_overlap_texels = 0; // global overlaps
    double overlap_texel_fraction = 0.0;
};

/// Faces whose UV orientation disagrees with the majority of their chart
/// (ties resolve to positive orientation). Zero-area faces are never flipped.
std::uint64_t count_flipped_faces(const TexturedMesh& mesh, const ChartSet& charts);

OverlapStats detect_overlaps(std::span<const CoverageGrid> grids, const TexturedMesh& mesh, const ChartSet& charts);

/// Overlap measures from pre-summarized grids (lets callers drop each grid after use).
OverlapStats overlap_stats(const CoverageSummary& coverage, std::uint64_t flipped_faces);

struct Crumbliness {
    double crumbliness = 0.0;
    double solidity = 0.0;
};

/// Total chart perimeter over the perimeter of the circle with the same total
/// area. Empty when the total chart area is at most 1e-16.
std::optional<Crumbliness> crumbliness(std::span<const Chart> charts);

struct SamplingField {
    std::vector<double> per_face; // NaN for faces that do not enter the field
    std::uint64_t valid_faces = 0;
    std::optional<double> mean; // 3D-area weighted, 1 by construction
    std::optional<double> variance;
    std::optional<double> p1;
    std::optional<double> p50;
    std::optional<double> p99;
};

/// Per-face ratio of local to global UV/3D area scale. Only mapped faces with
/// 3D area above the zero-area threshold take part; aggregates are weighted by
/// 3D area and percentiles read off the weighted empirical distribution.
SamplingField sampling_field(const TexturedMesh& mesh);

/// Lower weighted quantile: smallest value whose cumulative weight reaches q * total.
/// `samples` holds (value, weight) pairs and is sorted in place.
double weighted_percentile(std::vector<std::pair<double, double>>& samples, double q);

struct Jacobian2 {
    double a = 0.0, b = 0.0; // row 0
    double c = 0.0, d = 0.0; // row 1
};

struct SingularValues2 {
    double max = 0.0;
    double min = 0.0;
};

/// Linear map from the triangle's 3D plane (in an orthonormal in-plane frame
/// anchored on edge p0->p1) to UV space. Requires a non-degenerate 3D triangle.
Jacobian2 face_jacobian(Vec3 p0, Vec3 p1, Vec3 p2, Vec2 t0, Vec2 t1, Vec2 t2);

/// Closed-form singular values of a 2x2 matrix.
SingularValues2 singular_values(const Jacobian2& j);

/// sigma_min / sigma_max of the face Jacobian; 0 for UV-degenerate faces.
double face_qcd(Vec3 p0, Vec3 p1, Vec3 p2, Vec2 t0, Vec2 t1, Vec2 t2);

struct ConformalDistortion {
    std::vector<double> per_face; // NaN for unmapped or 3D-degenerate faces
    std::uint64_t evaluated_faces = 0;
    std::uint64_t degenerate_3d_faces = 0; // mapped faces skipped for zero 3D area
    std::optional<double> mean;            // 3D-area weighted
};

ConformalDistortion qc_distortion(const TexturedMesh& mesh);

} // namespace texmetrics
