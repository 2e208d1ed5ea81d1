#include "texmetrics/uv_analysis.hpp"

#include "texmetrics/topology.hpp"

#include <limits>
#include <numbers>

namespace texmetrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double face_uv_signed_area(const TexturedMesh& mesh, std::uint32_t f)
{
    return signed_area(mesh.uv(f, 0), mesh.uv(f, 1), mesh.uv(f, 2));
}

double face_area_3d(const TexturedMesh& mesh, std::uint32_t f)
{
    return triangle_area(mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2));
}

} // namespace

CoverageGrid rasterize_coverage(const TexturedMesh& mesh, const ChartSet& charts, TextureDims dims,
                                std::span<const std::uint32_t> faces)
{
    if (dims.width == 0 || dims.height == 0)
        throw std::invalid_argument("invalid texture dimensions");
    CoverageGrid grid;
    grid.width = dims.width;
    grid.height = dims.height;
    const std::size_t n = std::size_t(dims.width) * dims.height;
    grid.count.assign(n, 0);
    grid.first_chart.assign(n, kNoIndex);

    for (auto f : faces) {
        if (!mesh.faces[f].mapped())
            continue;
        const auto chart = charts.face_chart[f];
        for_each_covered_texel(mesh.uv(f, 0), mesh.uv(f, 1), mesh.uv(f, 2), dims.width, dims.height,
                               [&](std::uint32_t x, std::uint32_t y) {
                                   const auto i = grid.index(x, y);
                                   if (grid.count[i] != std::numeric_limits<std::uint16_t>::max())
                                       ++grid.count[i];
                                   auto& owner = grid.first_chart[i];
                                   if (owner == kNoIndex)
                                       owner = chart;
                                   else if (owner != chart)
                                       owner = kMultiChart;
                               });
    }
    return grid;
}

CoverageSummary& CoverageSummary::operator+=(const CoverageSummary& o)
{
    texels += o.texels;
    covered += o.covered;
    multiple += o.multiple;
    cross_chart += o.cross_chart;
    return *this;
}

CoverageSummary summarize_coverage(const CoverageGrid& grid)
{
    CoverageSummary s;
    s.texels = grid.count.size();
    for (std::size_t i = 0; i < grid.count.size(); ++i) {
        s.covered += grid.count[i] >= 1;
        s.multiple += grid.count[i] >= 2;
        s.cross_chart += grid.first_chart[i] == kMultiChart;
    }
    return s;
}

std::optional<double> occupancy(std::span<const CoverageGrid> grids)
{
    if (grids.empty())
        return std::nullopt;
    CoverageSummary total;
    for (const auto& g : grids)
        total += summarize_coverage(g);
    return total.texels == 0 ? 0.0 : static_cast<double>(total.covered) / static_cast<double>(total.texels);
}

std::uint64_t count_flipped_faces(const TexturedMesh& mesh, const ChartSet& charts)
{
    std::uint64_t flipped = 0;
    for (const auto& chart : charts.charts) {
        std::uint64_t positive = 0, negative = 0;
        for (auto f : chart.face_ids) {
            const double a = face_uv_signed_area(mesh, f);
            positive += a > 0.0;
            negative += a < 0.0;
        }
        flipped += negative > positive ? positive : negative;
    }
    return flipped;
}

OverlapStats overlap_stats(const CoverageSummary& coverage, std::uint64_t flipped_faces)
{
    OverlapStats s;
    s.flipped_face_count = flipped_faces;
    s.cross_chart_overlap_texels = coverage.cross_chart;
    s.overlap_texel_fraction =
        coverage.covered == 0 ? 0.0 : static_cast<double>(coverage.multiple) / static_cast<double>(coverage.covered);
    return s;
}

OverlapStats detect_overlaps(std::span<const CoverageGrid> grids, const TexturedMesh& mesh, const ChartSet& charts)
{
    CoverageSummary total;
    for (const auto& g : grids)
        total += summarize_coverage(g);
    return overlap_stats(total, count_flipped_faces(mesh, charts));
}

std::optional<Crumbliness> crumbliness(std::span<const Chart> charts)
{
    double perimeter = 0.0, area = 0.0;
    for (const auto& c : charts) {
        perimeter += c.uv_perimeter;
        area += c.uv_area;
    }
    if (area <= 1e-16)
        return std::nullopt;
    const double c = perimeter / std::sqrt(4.0 * std::numbers::pi * area);
    return Crumbliness{c, 1.0 / c};
}

double weighted_percentile(std::vector<std::pair<double, double>>& samples, double q)
{
    std::sort(samples.begin(), samples.end());
    double total = 0.0;
    for (const auto& s : samples)
        total += s.second;
    const double target = q * total;
    double cumulative = 0.0;
    for (const auto& [value, weight] : samples) {
        cumulative += weight;
        if (cumulative >= target)
            return value;
    }
    return samples.back().first;
}

SamplingField sampling_field(const TexturedMesh& mesh)
{
    SamplingField out;
    const auto nf = mesh.faces.size();
    out.per_face.assign(nf, kNaN);
    const double area_eps = zero_area_threshold(mesh);

    std::vector<double> area3d(nf, 0.0), area_uv(nf, 0.0);
    double sum3d = 0.0, sum_uv = 0.0;
    for (std::uint32_t f = 0; f < nf; ++f) {
        if (!mesh.faces[f].mapped())
            continue;
        area3d[f] = face_area_3d(mesh, f);
        if (!(area3d[f] > area_eps))
            continue;
        area_uv[f] = std::abs(face_uv_signed_area(mesh, f));
        sum3d += area3d[f];
        sum_uv += area_uv[f];
        ++out.valid_faces;
    }
    if (out.valid_faces == 0 || !(sum_uv > 0.0))
        return out;

    const double global_ratio = sum_uv / sum3d;
    std::vector<std::pair<double, double>> weighted;
    weighted.reserve(out.valid_faces);
    double weighted_sum = 0.0;
    for (std::uint32_t f = 0; f < nf; ++f) {
        if (!mesh.faces[f].mapped() || !(area3d[f] > area_eps))
            continue;
        const double s = (area_uv[f] / area3d[f]) / global_ratio;
        out.per_face[f] = s;
        weighted.emplace_back(s, area3d[f]);
        weighted_sum += area3d[f] * s;
    }
    const double mean = weighted_sum / sum3d;
    double spread = 0.0;
    for (const auto& [s, w] : weighted)
        spread += w * (s - mean) * (s - mean);
    out.mean = mean;
    out.variance = spread / sum3d;
    out.p1 = weighted_percentile(weighted, 0.01);
    out.p50 = weighted_percentile(weighted, 0.50);
    out.p99 = weighted_percentile(weighted, 0.99);
    return out;
}

Jacobian2 face_jacobian(Vec3 p0, Vec3 p1, Vec3 p2, Vec2 t0, Vec2 t1, Vec2 t2)
{
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const double len1 = length(e1);
    const Vec3 x_axis = (1.0 / len1) * e1;
    const Vec3 in_plane = cross(cross(e1, e2), e1);
    const Vec3 y_axis = (1.0 / length(in_plane)) * in_plane;

    // Columns of P are the 3D edges in the frame, columns of Q their UV images.
    const double p00 = len1, p01 = dot(e2, x_axis), p11 = dot(e2, y_axis);
    const Vec2 q0 = t1 - t0, q1 = t2 - t0;

    // J = Q * P^-1 with P upper triangular.
    const double inv00 = 1.0 / p00, inv01 = -p01 / (p00 * p11), inv11 = 1.0 / p11;
    return Jacobian2{q0.x * inv00, q0.x * inv01 + q1.x * inv11, q0.y * inv00, q0.y * inv01 + q1.y * inv11};
}

SingularValues2 singular_values(const Jacobian2& j)
{
    const double e = 0.5 * (j.a + j.d);
    const double f = 0.5 * (j.a - j.d);
    const double g = 0.5 * (j.c + j.b);
    const double h = 0.5 * (j.c - j.b);
    const double q = std::hypot(e, h);
    const double r = std::hypot(f, g);
    return {q + r, std::abs(q - r)};
}

double face_qcd(Vec3 p0, Vec3 p1, Vec3 p2, Vec2 t0, Vec2 t1, Vec2 t2)
{
    const auto sv = singular_values(face_jacobian(p0, p1, p2, t0, t1, t2));
    if (!(sv.max > 0.0) || !std::isfinite(sv.max))
        return 0.0;
    return std::clamp(sv.min / sv.max, 0.0, 1.0);
}

ConformalDistortion qc_distortion(const TexturedMesh& mesh)
{
    ConformalDistortion out;
    const auto nf = mesh.faces.size();
    out.per_face.assign(nf, kNaN);
    const double area_eps = zero_area_threshold(mesh);
    double weighted = 0.0, total = 0.0;
    for (std::uint32_t f = 0; f < nf; ++f) {
        if (!mesh.faces[f].mapped())
            continue;
        const double a = face_area_3d(mesh, f);
        if (!(a > area_eps)) {
            ++out.degenerate_3d_faces;
            continue;
        }
        const double q = face_qcd(mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2), mesh.uv(f, 0),
                                  mesh.uv(f, 1), mesh.uv(f, 2));
        out.per_face[f] = q;
        ++out.evaluated_faces;
        weighted += a * q;
        total += a;
    }
    if (out.evaluated_faces > 0)
        out.mean = weighted / total;
    return out;
}

} // namespace texmetrics
