#pragma once

// OBJ/MTL/PNG ingestion for textured triangle meshes.
//
// The loaders are deliberately forgiving: content errors (bad numbers, indices
// out of range, unknown statements) drop or demote the offending record and
// leave a ParseWarning behind. Only an unreadable stream is fatal.

#include "texmetrics/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace texmetrics {

struct Rgb {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;
    friend bool operator==(Rgb, Rgb) = default;
};

/// Texel grid in texture space: row 0 is the v = 0 edge of the UV square.
/// A dims-only stub (from a command-line override) carries no pixels.
struct TextureImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Rgb> pixels; // row-major, width * height, or empty

    bool has_pixels() const { return !pixels.empty(); }
    const Rgb& texel(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t(y) * width + x]; }
};

struct TextureDims {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    friend bool operator==(TextureDims, TextureDims) = default;
};

struct MaterialRef {
    std::string name;
    std::optional<std::string> diffuse_texture_path; // as written after map_Kd
    std::vector<std::pair<std::string, std::string>> aux_textures; // (statement, path), inventory only
};

inline constexpr std::uint32_t kNoIndex = 0xffffffffu;

struct Face {
    std::array<std::uint32_t, 3> v{};
    std::array<std::uint32_t, 3> t{kNoIndex, kNoIndex, kNoIndex};
    std::uint32_t material = kNoIndex;

    bool mapped() const { return t[0] != kNoIndex; }
    bool has_material() const { return material != kNoIndex; }
};

struct TexturedMesh {
    std::vector<Vec3> positions;
    std::vector<Vec2> texcoords;
    std::vector<Face> faces;
    std::vector<MaterialRef> materials;
    std::vector<std::string> material_libraries;

    Vec3 position(std::uint32_t f, int corner) const { return positions[faces[f].v[corner]]; }
    Vec2 uv(std::uint32_t f, int corner) const { return texcoords[faces[f].t[corner]]; }
};

struct ParseWarning {
    std::size_t line = 0; // 1-based, 0 when not tied to a line
    std::string message;
};

struct ObjParseResult {
    TexturedMesh mesh;
    std::vector<ParseWarning> warnings;
};

/// Thrown for conditions that prevent any analysis (unreadable input).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses OBJ text. Statements v, vt, vn, f, usemtl, mtllib, o, g, s are
/// understood; polygons are fan-triangulated from their first corner.
/// mtllib files are resolved against base_dir and parsed immediately; pass an
/// empty base_dir to skip material library loading.
ObjParseResult parse_obj(std::istream& source, const std::filesystem::path& base_dir);
ObjParseResult load_obj(const std::filesystem::path& path);

std::vector<MaterialRef> parse_mtl(std::istream& source, std::vector<ParseWarning>* warnings = nullptr);

/// Decodes a PNG (8/16 bit, gray/RGB/RGBA/palette) into texture space.
/// With dims_override the file is not touched and a dims-only stub is returned.
/// Throws IoError when the image cannot be decoded and no override is given.
TextureImage load_texture(const std::filesystem::path& path, std::optional<TextureDims> dims_override);

/// Serializes positions, texcoords and faces (with usemtl runs) back to OBJ.
void write_obj(std::ostream& out, const TexturedMesh& mesh);

} // namespace texmetrics
