#pragma once

#include "texmetrics/mesh_model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace texmetrics {

/// Faces with 3D area <= kZeroAreaEpsilon * (bbox diagonal)^2 count as zero-area.
inline constexpr double kZeroAreaEpsilon = 1e-12;

struct TopologyStats {
    std::uint64_t vertex_count = 0;            // position records
    std::uint64_t referenced_vertex_count = 0; // the V that enters the Euler characteristic
    std::uint64_t edge_count = 0;
    std::uint64_t face_count = 0;
    std::uint64_t connected_components = 0;
    std::uint64_t boundary_loop_count = 0;
    double boundary_total_length = 0.0;
    double surface_area_3d = 0.0;
    std::int64_t euler_characteristic = 0;
    std::optional<std::uint64_t> genus;
    std::string genus_null_reason; // set whenever genus is empty
};

struct DefectReport {
    std::uint64_t zero_area_faces = 0;
    std::uint64_t degenerate_faces = 0;
    std::uint64_t duplicate_vertices = 0;
    std::uint64_t unreferenced_vertices = 0;
    std::uint64_t nonmanifold_edges = 0;
    std::uint64_t nonmanifold_vertices = 0;
    std::uint64_t unmapped_faces = 0;
    std::uint64_t uv_out_of_range_faces = 0;
};

double bounding_box_diagonal(const TexturedMesh& mesh);

bool is_degenerate_face(const Face& f);

/// Area threshold below which a face is treated as having no 3D extent.
double zero_area_threshold(const TexturedMesh& mesh);

TopologyStats topology_stats(const TexturedMesh& mesh, const MeshAdjacency& adj);

DefectReport defect_scan(const TexturedMesh& mesh, const MeshAdjacency& adj);

/// True when the faces around v form a single fan: one closed disk or one open half-disk.
bool vertex_link_is_disk(const TexturedMesh& mesh, const MeshAdjacency& adj, std::uint32_t v);

} // namespace texmetrics
