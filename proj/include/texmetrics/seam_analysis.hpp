#pragma once

#include "texmetrics/mesh_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace texmetrics {

/// The two UV images of one seam edge. e1 and e2 start at the UV images of the
/// same 3D endpoint.
struct SeamPair {
    std::uint32_t edge = 0;
    double edge_3d_length = 0.0;
    Vec2 e1_start, e1_end;
    Vec2 e2_start, e2_end;
    std::uint32_t e1_texture = kNoIndex; // texture unit of each side
    std::uint32_t e2_texture = kNoIndex;

    bool degenerate() const;
    bool cross_texture() const { return e1_texture != e2_texture; }
};

/// One pair per seam edge with both incident faces mapped, in seam order.
std::vector<SeamPair> build_seam_pairs(const TexturedMesh& mesh, const MeshAdjacency& adj,
                                       std::span<const std::uint32_t> seams, const TextureUnits& units);

/// Bilinear lookup with clamp-to-edge addressing; texel (x, y) has its center
/// at ((x+0.5)/W, (y+0.5)/H). Throws std::logic_error on a dims-only texture.
Rgb bilinear_sample(const TextureImage& texture, Vec2 uv);

/// Number of midpoint samples used along a seam: max(2, ceil(longest side in texels)).
std::uint32_t seam_sample_count(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2);

/// Mean Euclidean RGB distance between the two sides, midpoint rule. Empty for
/// degenerate pairs or when either texture has no pixels.
std::optional<double> edge_discrepancy(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2);

/// Same integral with an explicit sample count.
double edge_discrepancy_samples(const SeamPair& pair, const TextureImage& t1, const TextureImage& t2,
                                std::uint32_t samples);

struct DiscrepancyStats {
    std::vector<std::optional<double>> per_edge; // parallel to the pairs
    std::optional<double> aggregate;             // length-weighted mean over evaluable pairs
    std::uint64_t seam_edge_count = 0;
    std::uint64_t evaluated_edges = 0;
    std::uint64_t degenerate_pairs = 0;
    std::uint64_t cross_texture_edges = 0;
    double seam_total_length_3d = 0.0;
    double seam_total_length_uv = 0.0; // both sides
};

/// `textures` is indexed by texture unit; a missing entry or one without
/// pixels makes the pairs that touch it unevaluable.
DiscrepancyStats mesh_discrepancy(std::span<const SeamPair> pairs,
                                  std::span<const std::optional<TextureImage>> textures);

/// Length-weighted mean of (length, value) rows; empty when the total length is zero.
std::optional<double> weighted_discrepancy(std::span<const std::pair<double, double>> rows);

} // namespace texmetrics
