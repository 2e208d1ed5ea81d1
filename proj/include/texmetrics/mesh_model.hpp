#pragma once

#include "texmetrics/mesh_io.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace texmetrics {

/// UV coordinates closer than this (Euclidean, normalized UV units) are the same point.
inline constexpr double kUvTolerance = 1e-7;

enum class EdgeClass : std::uint8_t { boundary, manifold, nonmanifold };

struct FaceCorner {
    std::uint32_t face = 0;
    std::uint8_t corner = 0; // edge k of a face runs from corner k to corner (k+1)%3
};

struct EdgeRecord {
    std::uint32_t v0 = 0; // v0 <= v1
    std::uint32_t v1 = 0;
    std::uint32_t first_corner = 0; // into MeshAdjacency::edge_corners
    std::uint32_t corner_count = 0;
    EdgeClass manifold_class = EdgeClass::boundary;
    bool is_seam = false; // only ever set on manifold edges

    bool degenerate() const { return v0 == v1; }
};

/// Undirected edge table plus face/vertex incidence. Edges are sorted by
/// endpoint pair, so the ordering is deterministic for a given mesh.
struct MeshAdjacency {
    std::vector<EdgeRecord> edges;
    std::vector<FaceCorner> edge_corners;
    std::vector<std::array<std::uint32_t, 3>> face_edges; // edge id of face side k

    // vertex -> incident faces, CSR layout; a face touching a vertex twice appears twice
    std::vector<std::uint32_t> vertex_face_offsets;
    std::vector<std::uint32_t> vertex_faces;

    std::span<const FaceCorner> corners(std::uint32_t edge) const
    {
        const auto& e = edges[edge];
        return {edge_corners.data() + e.first_corner, e.corner_count};
    }
    std::span<const std::uint32_t> faces_of_vertex(std::uint32_t v) const
    {
        return {vertex_faces.data() + vertex_face_offsets[v], vertex_face_offsets[v + 1] - vertex_face_offsets[v]};
    }
    /// Opposite face across side k of f, or kNoIndex when the side is not a manifold edge.
    std::uint32_t neighbor(const std::uint32_t face, int side) const;
};

MeshAdjacency build_adjacency(const TexturedMesh& mesh);

/// Marks seam edges in `adj` and returns their ids in ascending order.
/// A manifold edge is a seam when its two UV images differ at either shared
/// endpoint by more than kUvTolerance, or when exactly one incident face is mapped.
std::vector<std::uint32_t> classify_seams(const TexturedMesh& mesh, MeshAdjacency& adj);

struct Chart {
    std::vector<std::uint32_t> face_ids; // ascending
    double uv_area = 0.0;
    double uv_perimeter = 0.0;
    std::uint32_t material = kNoIndex;
};

struct ChartSet {
    std::vector<Chart> charts;
    std::vector<std::uint32_t> face_chart; // kNoIndex for unmapped faces
};

/// Charts are connected components of mapped faces joined across manifold,
/// non-seam edges whose two faces share a material.
ChartSet extract_charts(const TexturedMesh& mesh, const MeshAdjacency& adj);

/// Distinct diffuse textures referenced by mapped faces. Mapped faces whose
/// material has no map_Kd (or that have no material) share one extra
/// "untextured" unit, which only gets dimensions from an override.
struct TextureUnits {
    std::vector<std::string> paths;          // map_Kd path per unit; empty for the untextured unit
    std::vector<std::uint32_t> first_material; // a material that references the unit, kNoIndex for untextured
    std::vector<std::uint32_t> face_unit;    // per face; kNoIndex for unmapped faces
    std::uint32_t untextured_unit = kNoIndex;

    std::size_t size() const { return paths.size(); }
    /// Mapped faces per unit, ascending.
    std::vector<std::vector<std::uint32_t>> faces_by_unit() const;
};

TextureUnits assign_texture_units(const TexturedMesh& mesh);

/// True when side k of face f is part of its chart's UV boundary.
bool is_chart_boundary_side(const TexturedMesh& mesh, const MeshAdjacency& adj, std::uint32_t face, int side);

} // namespace texmetrics
