#include "texmetrics/seam_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace texmetrics {

bool SeamPair::degenerate() const
{
    return !(length(e1_end - e1_start) > kUvTolerance) || !(length(e2_end - e2_start) > kUvTolerance);
}

std::vector<SeamPair> build_seam_pairs(const TexturedMesh& mesh, const MeshAdjacency& adj,
                                       std::span<const std::uint32_t> seams, const TextureUnits& units)
{
    std::vector<SeamPair> pairs;
    pairs.reserve(seams.size());
    for (auto e : seams) {
        const auto& rec = adj.edges[e];
        if (rec.manifold_class != EdgeClass::manifold)
            continue;
        const auto c = adj.corners(e);
        const auto& fa = mesh.faces[c[0].face];
        const auto& fb = mesh.faces[c[1].face];
        if (!fa.mapped() || !fb.mapped())
            continue;
        const int a0 = c[0].corner, a1 = (a0 + 1) % 3;
        int b0 = c[1].corner, b1 = (b0 + 1) % 3;
        if (fb.v[b0] != fa.v[a0])
            std::swap(b0, b1);
        SeamPair p;
        p.edge = e;
        p.edge_3d_length = length(mesh.positions[rec.v1] - mesh.positions[rec.v0]);
        p.e1_start = mesh.texcoords[fa.t[a0]];
        p.e1_end = mesh.texcoords[fa.t[a1]];
        p.e2_start = mesh.texcoords[fb.t[b0]];
        p.e2_end = mesh.texcoords[fb.t[b1]];
        p.e1_texture = units.face_unit[c[0].face];
        p.e2_texture = units.face_unit[c[1].face];
        pairs.push_back(p);
    }
    return pairs;
}

namespace {

double texel_length(Vec2 a, Vec2 b, const TextureImage& t)
{
    return std::hypot((b.x - a.x) * t.width, (b.y - a.y) * t.height);
}

// Bilinear value in double precision; bilinear_sample rounds to float storage.
std::array<double, 3> sample_rgb(const TextureImage& texture, Vec2 uv)
{
    const double x = uv.x * texture.width - 0.5;
    const double y = uv.y * texture.height - 0.5;
    const double fx0 = std::floor(x), fy0 = std::floor(y);
    const double tx = x - fx0, ty = y - fy0;
    auto clamp_index = [](double i, std::uint32_t n) {
        return static_cast<std::uint32_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
    };
    const auto x0 = clamp_index(fx0, texture.width), x1 = clamp_index(fx0 + 1.0, texture.width);
    const auto y0 = clamp_index(fy0, texture.height), y1 = clamp_index(fy0 + 1.0, texture.height);
    const Rgb& c00 = texture.texel(x0, y0);
    const Rgb& c10 = texture.texel(x1, y0);
    const Rgb& c01 = texture.texel(x0, y1);
    const Rgb& c11 = texture.texel(x1, y1);
    auto blend = [&](float Rgb::*ch) {
        const double bottom = (1.0 - tx) * c00.*ch + tx * c10.*ch;
        const double top = (1.0 - tx) * c01.*ch + tx * c11.*ch;
        return (1.0 - ty) * bottom + ty * top;
    };
    return {blend(&Rgb::r), blend(&Rgb::g), blend(&Rgb::b)};
}

} // namespace

Rgb bilinear_sample(const TextureImage& texture, Vec2 uv)
{
    if (!texture.has_pixels())
        throw std::logic_error("pixels unavailable");
    const auto c = sample_rgb(texture, uv);
    return Rgb{static_cast<float>(c[0]), static_cast<float>(c[1]), static_cast<float>(c[2])};
}

std::uint32_t seam_sample_count(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2)
{
    const double longest = std::max(texel_length(pair.e1_start, pair.e1_end, t1), texel_length(pair.e2_start, pair.e2_end, t2));
    return std::max<std::uint32_t>(2, static_cast<std::uint32_t>(std::ceil(longest)));
}

double edge_discrepancy_samples(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2,
                                std::uint32_t samples)
{
    if (!t1.has_pixels() || !t2.has_pixels())
        throw std::logic_error("pixels unavailable");
    double sum = 0.0;
    for (std::uint32_t k = 0; k < samples; ++k) {
        const double t = (k + 0.5) / samples;
        const auto c1 = sample_rgb(t1, pair.e1_start + t * (pair.e1_end - pair.e1_start));
        const auto c2 = sample_rgb(t2, pair.e2_start + t * (pair.e2_end - pair.e2_start));
        const double dr = c1[0] - c2[0], dg = c1[1] - c2[1], db = c1[2] - c2[2];
        sum += std::sqrt(dr * dr + dg * dg + db * db);
    }
    return sum / samples;
}

std::optional<double> edge_discrepancy(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2)
{
    if (pair.degenerate() || !t1.has_pixels() || !t2.has_pixels())
        return std::nullopt;
    return edge_discrepancy_samples(pair, t1, t2, seam_sample_count(pair, t1, t2));
}

std::optional<double> weighted_discrepancy(std::span<const std::pair<double, double>> rows)
{
    double num = 0.0, den = 0.0;
    for (const auto& [len, value] : rows) {
        num += len * value;
        den += len;
    }
    if (!(den > 0.0))
        return std::nullopt;
    return num / den;
}

DiscrepancyStats mesh_discrepancy(std::span<const SeamPair> pairs,
                                  std::span<const std::optional<TextureImage>> textures)
{
    DiscrepancyStats s;
    s.seam_edge_count = pairs.size();
    s.per_edge.reserve(pairs.size());
    std::vector<std::pair<double, double>> rows;
    auto texture_for = [&](std::uint32_t unit) -> const TextureImage* {
        if (unit >= textures.size() || !textures[unit] || !textures[unit]->has_pixels())
            return nullptr;
        return &*textures[unit];
    };
    for (const auto& p : pairs) {
        s.seam_total_length_3d += p.edge_3d_length;
        s.seam_total_length_uv += length(p.e1_end - p.e1_start) + length(p.e2_end - p.e2_start);
        s.cross_texture_edges += p.cross_texture();
        if (p.degenerate()) {
            ++s.degenerate_pairs;
            s.per_edge.emplace_back();
            continue;
        }
        const auto* t1 = texture_for(p.e1_texture);
        const auto* t2 = texture_for(p.e2_texture);
        if (!t1 || !t2) {
            s.per_edge.emplace_back();
            continue;
        }
        const auto d = edge_discrepancy(p, *t1, *t2);
        s.per_edge.push_back(d);
        ++s.evaluated_edges;
        rows.emplace_back(p.edge_3d_length, *d);
    }
    s.aggregate = weighted_discrepancy(rows);
    return s;
}

} // namespace texmetrics
