#pragma once

// Procedural meshes and file writers shared by the unit and acceptance suites.

#include "texmetrics/mesh_io.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using texmetrics::Face;
using texmetrics::TexturedMesh;
using texmetrics::Vec2;
using texmetrics::Vec3;

/// Adds a triangle with one fresh texcoord record per corner.
void add_mapped_triangle(TexturedMesh& m, std::array<std::uint32_t, 3> v, std::array<Vec2, 3> uv,
                         std::uint32_t material = texmetrics::kNoIndex);
void add_unmapped_triangle(TexturedMesh& m, std::array<std::uint32_t, 3> v);

/// Unit square in the z = 0 plane, UV equal to (x, y), split along its diagonal.
TexturedMesh unit_square_chart();

/// n disjoint unit squares, each its own chart covering UV [0,1]^2.
TexturedMesh unit_squares(int n);

/// Triangle fan approximating a disk with n rim vertices; UV is the same disk
/// scaled into the unit square.
TexturedMesh polygon_disk(int n);

TexturedMesh tetrahedron();
TexturedMesh two_tetrahedra();
/// Closed torus from an nu x nv grid; UV is the grid, cut along both wrap loops.
TexturedMesh torus(int nu, int nv);
/// Open cylinder, n segments around and m rings of quads.
TexturedMesh open_cylinder(int n, int m);

enum class CubeUnwrap { cross, per_face, per_triangle };
/// Closed unit cube with 12 triangles and one texcoord record per corner.
TexturedMesh cube(CubeUnwrap unwrap);

/// Flat a x b quad grid on [0,1]^2 in 3D, UV = offset + scale * (x, y) with
/// optional per-vertex jitter that keeps orientation.
TexturedMesh grid_patch(int a, int b, Vec2 offset, Vec2 scale, double jitter, std::mt19937_64* rng);

/// Appends `part` to `into`, remapping indices and materials by name.
void append(TexturedMesh& into, const TexturedMesh& part);

/// Random multi-chart atlas of grid patches, some split into per-quad islands.
TexturedMesh random_atlas(std::mt19937_64& rng);

/// 1-to-4 midpoint subdivision; shared edges (by position index pair) and shared
/// texcoord pairs reuse one midpoint record.
TexturedMesh subdivide(const TexturedMesh& m);

/// UV triangles of a random atlas for coverage tests. With lattice_bits > 0 all
/// coordinates are multiples of 2^-lattice_bits.
std::vector<std::array<Vec2, 3>> random_uv_triangles(std::mt19937_64& rng, int count, int lattice_bits);

/// Mesh made of disconnected triangles with the given UVs (one chart each).
TexturedMesh triangle_soup(const std::vector<std::array<Vec2, 3>>& uvs);

// --- files -----------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Writes an 8- or 16-bit PNG. `channels` is 1 (gray), 2 (gray+alpha), 3 (RGB)
/// or 4 (RGBA). texel(x, y) is given in texture space (y = 0 at v = 0) and
/// returns channel values in [0,1].
void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height, int channels,
               int bit_depth, const std::function<std::array<double, 4>(std::uint32_t, std::uint32_t)>& texel);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes model.obj (+ model.mtl referencing `texture_name` when non-empty)
/// into dir; faces get material "mat" when a texture is given.
std::filesystem::path write_model(const std::filesystem::path& dir, TexturedMesh mesh,
                                  const std::string& texture_name = "");

} // namespace fixtures
