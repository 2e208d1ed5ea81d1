#include "fixtures.hpp"

#include <png.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unistd.h>

namespace fixtures {

using texmetrics::kNoIndex;

void add_mapped_triangle(TexturedMesh& m, std::array<std::uint32_t, 3> v, std::array<Vec2, 3> uv,
                         std::uint32_t material)
{
    Face f;
    f.v = v;
    for (int k = 0; k < 3; ++k) {
        f.t[k] = static_cast<std::uint32_t>(m.texcoords.size());
        m.texcoords.push_back(uv[k]);
    }
    f.material = material;
    m.faces.push_back(f);
}

void add_unmapped_triangle(TexturedMesh& m, std::array<std::uint32_t, 3> v)
{
    Face f;
    f.v = v;
    m.faces.push_back(f);
}

TexturedMesh unit_square_chart() { return unit_squares(1); }

TexturedMesh unit_squares(int n)
{
    TexturedMesh m;
    for (int i = 0; i < n; ++i) {
        const auto base = static_cast<std::uint32_t>(m.positions.size());
        const double x0 = 2.0 * i;
        m.positions.push_back({x0, 0, 0});
        m.positions.push_back({x0 + 1, 0, 0});
        m.positions.push_back({x0 + 1, 1, 0});
        m.positions.push_back({x0, 1, 0});
        add_mapped_triangle(m, {base, base + 1, base + 2}, {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}});
        add_mapped_triangle(m, {base, base + 2, base + 3}, {Vec2{0, 0}, Vec2{1, 1}, Vec2{0, 1}});
    }
    return m;
}

TexturedMesh polygon_disk(int n)
{
    TexturedMesh m;
    m.positions.push_back({0, 0, 0});
    std::vector<Vec2> rim;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        m.positions.push_back({std::cos(a), std::sin(a), 0});
        rim.push_back({0.5 + 0.5 * std::cos(a), 0.5 + 0.5 * std::sin(a)});
    }
    for (int k = 0; k < n; ++k) {
        const auto a = static_cast<std::uint32_t>(1 + k);
        const auto b = static_cast<std::uint32_t>(1 + (k + 1) % n);
        add_mapped_triangle(m, {0, a, b}, {Vec2{0.5, 0.5}, rim[k], rim[(k + 1) % n]});
    }
    return m;
}

TexturedMesh tetrahedron()
{
    TexturedMesh m;
    m.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const std::array<std::array<std::uint32_t, 3>, 4> faces = {{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
    for (int i = 0; i < 4; ++i) {
        const double ox = 0.05 + 0.5 * (i % 2), oy = 0.05 + 0.5 * (i / 2);
        add_mapped_triangle(m, faces[i], {Vec2{ox, oy}, Vec2{ox + 0.4, oy}, Vec2{ox, oy + 0.4}});
    }
    return m;
}

TexturedMesh two_tetrahedra()
{
    auto a = tetrahedron();
    auto b = tetrahedron();
    for (auto& p : b.positions)
        p.x += 5.0;
    append(a, b);
    return a;
}

TexturedMesh torus(int nu, int nv)
{
    TexturedMesh m;
    const double R = 2.0, r = 0.6;
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const double th = 2.0 * std::numbers::pi * i / nu, ph = 2.0 * std::numbers::pi * j / nv;
            m.positions.push_back({(R + r * std::cos(ph)) * std::cos(th), (R + r * std::cos(ph)) * std::sin(th), r * std::sin(ph)});
        }
    }
    auto vid = [&](int i, int j) { return static_cast<std::uint32_t>((j % nv) * nu + (i % nu)); };
    auto uv = [&](int i, int j) { return Vec2{double(i) / nu, double(j) / nv}; };
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            add_mapped_triangle(m, {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}, {uv(i, j), uv(i + 1, j), uv(i + 1, j + 1)});
            add_mapped_triangle(m, {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}, {uv(i, j), uv(i + 1, j + 1), uv(i, j + 1)});
        }
    }
    return m;
}

TexturedMesh open_cylinder(int n, int m_rings)
{
    TexturedMesh m;
    for (int j = 0; j <= m_rings; ++j) {
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * i / n;
            m.positions.push_back({std::cos(th), std::sin(th), double(j) / m_rings});
        }
    }
    auto vid = [&](int i, int j) { return static_cast<std::uint32_t>(j * n + (i % n)); };
    auto uv = [&](int i, int j) { return Vec2{double(i) / n, double(j) / m_rings}; };
    for (int j = 0; j < m_rings; ++j) {
        for (int i = 0; i < n; ++i) {
            add_mapped_triangle(m, {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}, {uv(i, j), uv(i + 1, j), uv(i + 1, j + 1)});
            add_mapped_triangle(m, {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}, {uv(i, j), uv(i + 1, j + 1), uv(i, j + 1)});
        }
    }
    return m;
}

TexturedMesh cube(CubeUnwrap unwrap)
{
    TexturedMesh m;
    for (int z = 0; z < 2; ++z)
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x)
                m.positions.push_back({double(x), double(y), double(z)});
    auto id = [](int x, int y, int z) { return static_cast<std::uint32_t>(x + 2 * y + 4 * z); };

    struct Quad {
        std::array<std::uint32_t, 4> v;
        std::function<Vec2(Vec3)> cross_uv; // planar unfolding, before normalization
    };
    const std::vector<Quad> quads = {
        {{id(0, 0, 0), id(0, 1, 0), id(1, 1, 0), id(1, 0, 0)}, [](Vec3 p) { return Vec2{p.x, -p.y}; }},
        {{id(0, 0, 1), id(1, 0, 1), id(1, 1, 1), id(0, 1, 1)}, [](Vec3 p) { return Vec2{p.x, 1 + p.y}; }},
        {{id(0, 0, 0), id(1, 0, 0), id(1, 0, 1), id(0, 0, 1)}, [](Vec3 p) { return Vec2{p.x, p.z}; }},
        {{id(0, 1, 0), id(0, 1, 1), id(1, 1, 1), id(1, 1, 0)}, [](Vec3 p) { return Vec2{3 - p.x, p.z}; }},
        {{id(0, 0, 0), id(0, 0, 1), id(0, 1, 1), id(0, 1, 0)}, [](Vec3 p) { return Vec2{4 - p.y, p.z}; }},
        {{id(1, 0, 0), id(1, 1, 0), id(1, 1, 1), id(1, 0, 1)}, [](Vec3 p) { return Vec2{1 + p.y, p.z}; }},
    };
    for (std::size_t qi = 0; qi < quads.size(); ++qi) {
        const auto& q = quads[qi];
        std::array<Vec2, 4> uv;
        for (int k = 0; k < 4; ++k) {
            const Vec2 c = q.cross_uv(m.positions[q.v[k]]);
            uv[k] = {c.x / 4.0, (c.y + 1.0) / 3.0};
        }
        if (unwrap != CubeUnwrap::cross) {
            // Square islands in a 3 x 2 layout, same corner orientation as the cross.
            const double size = unwrap == CubeUnwrap::per_face ? 0.3 : 0.15;
            const double margin = unwrap == CubeUnwrap::per_face ? 0.02 : 0.1;
            const Vec2 lo = uv[0];
            double min_x = 0.0, min_y = 0.0;
            for (auto& t : uv) {
                t = {(t.x - lo.x) * 4.0 * size, (t.y - lo.y) * 3.0 * size};
                min_x = std::min(min_x, t.x);
                min_y = std::min(min_y, t.y);
            }
            const Vec2 shift{margin + 0.33 * double(qi % 3) - min_x, margin + 0.5 * double(qi / 3) - min_y};
            for (auto& t : uv)
                t = t + shift;
        }
        add_mapped_triangle(m, {q.v[0], q.v[1], q.v[2]}, {uv[0], uv[1], uv[2]});
        std::array<Vec2, 3> second = {uv[0], uv[2], uv[3]};
        if (unwrap == CubeUnwrap::per_triangle) {
            // move away from the first triangle, along the other diagonal
            const Vec2 away = 0.5 * (uv[3] - uv[1]);
            for (auto& t : second)
                t = t + away;
        }
        add_mapped_triangle(m, {q.v[0], q.v[2], q.v[3]}, second);
    }
    return m;
}

TexturedMesh grid_patch(int a, int b, Vec2 offset, Vec2 scale, double jitter, std::mt19937_64* rng)
{
    TexturedMesh m;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int j = 0; j <= b; ++j) {
        for (int i = 0; i <= a; ++i) {
            const double x = double(i) / a, y = double(j) / b;
            m.positions.push_back({x, y, 0.1 * (x * x - y * y)});
            double jx = 0, jy = 0;
            if (rng && i > 0 && i < a && j > 0 && j < b) {
                jx = jitter * unit(*rng) / a;
                jy = jitter * unit(*rng) / b;
            }
            m.texcoords.push_back({offset.x + scale.x * (x + jx), offset.y + scale.y * (y + jy)});
        }
    }
    auto vid = [&](int i, int j) { return static_cast<std::uint32_t>(j * (a + 1) + i); };
    for (int j = 0; j < b; ++j) {
        for (int i = 0; i < a; ++i) {
            Face f1, f2;
            f1.v = f1.t = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
            f2.v = f2.t = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
            m.faces.push_back(f1);
            m.faces.push_back(f2);
        }
    }
    return m;
}

void append(TexturedMesh& into, const TexturedMesh& part)
{
    const auto pv = static_cast<std::uint32_t>(into.positions.size());
    const auto pt = static_cast<std::uint32_t>(into.texcoords.size());
    into.positions.insert(into.positions.end(), part.positions.begin(), part.positions.end());
    into.texcoords.insert(into.texcoords.end(), part.texcoords.begin(), part.texcoords.end());
    std::vector<std::uint32_t> material_map;
    for (const auto& mat : part.materials) {
        auto it = std::find_if(into.materials.begin(), into.materials.end(),
                               [&](const auto& x) { return x.name == mat.name; });
        if (it == into.materials.end()) {
            material_map.push_back(static_cast<std::uint32_t>(into.materials.size()));
            into.materials.push_back(mat);
        } else {
            material_map.push_back(static_cast<std::uint32_t>(it - into.materials.begin()));
        }
    }
    for (auto f : part.faces) {
        for (auto& v : f.v)
            v += pv;
        if (f.mapped())
            for (auto& t : f.t)
                t += pt;
        if (f.has_material())
            f.material = material_map[f.material];
        into.faces.push_back(f);
    }
}

TexturedMesh random_atlas(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> patches(1, 4), cells(1, 5);
    std::uniform_real_distribution<double> scale(0.1, 0.4), offset(0.0, 0.55), coin(0.0, 1.0);
    TexturedMesh atlas;
    const int k = patches(rng);
    for (int p = 0; p < k; ++p) {
        auto patch = grid_patch(cells(rng), cells(rng), {offset(rng), offset(rng)}, {scale(rng), scale(rng)}, 0.3, &rng);
        for (auto& pos : patch.positions)
            pos.z += 3.0 * p;
        if (coin(rng) < 0.3) {
            // Split into per-triangle islands: fresh, shifted texcoords per face.
            TexturedMesh islands;
            islands.positions = patch.positions;
            for (const auto& f : patch.faces) {
                const Vec2 shift{0.01 * coin(rng), 0.01 * coin(rng)};
                add_mapped_triangle(islands, f.v,
                                    {patch.texcoords[f.t[0]] + shift, patch.texcoords[f.t[1]] + shift,
                                     patch.texcoords[f.t[2]] + shift});
            }
            patch = std::move(islands);
        }
        append(atlas, patch);
    }
    return atlas;
}

TexturedMesh subdivide(const TexturedMesh& m)
{
    TexturedMesh out;
    out.positions = m.positions;
    out.texcoords = m.texcoords;
    out.materials = m.materials;
    out.material_libraries = m.material_libraries;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> pmid, tmid;
    auto midpoint = [](auto& table, auto& store, std::uint32_t a, std::uint32_t b) {
        const auto key = std::minmax(a, b);
        auto [it, inserted] = table.try_emplace({key.first, key.second}, static_cast<std::uint32_t>(store.size()));
        if (inserted)
            store.push_back(0.5 * (store[key.first] + store[key.second]));
        return it->second;
    };
    for (const auto& f : m.faces) {
        std::array<std::uint32_t, 3> mv{}, mt{};
        for (int k = 0; k < 3; ++k) {
            mv[k] = midpoint(pmid, out.positions, f.v[k], f.v[(k + 1) % 3]);
            if (f.mapped())
                mt[k] = midpoint(tmid, out.texcoords, f.t[k], f.t[(k + 1) % 3]);
        }
        // corner triangles then the center one; midpoint k sits on side k
        const std::array<std::array<int, 3>, 4> pattern = {{{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}}};
        const std::array<std::uint32_t, 6> vv = {f.v[0], f.v[1], f.v[2], mv[0], mv[1], mv[2]};
        const std::array<std::uint32_t, 6> tt = {f.t[0], f.t[1], f.t[2], mt[0], mt[1], mt[2]};
        for (const auto& p : pattern) {
            Face g;
            g.material = f.material;
            for (int k = 0; k < 3; ++k) {
                g.v[k] = vv[p[k]];
                if (f.mapped())
                    g.t[k] = tt[p[k]];
            }
            out.faces.push_back(g);
        }
    }
    return out;
}

std::vector<std::array<Vec2, 3>> random_uv_triangles(std::mt19937_64& rng, int count, int lattice_bits)
{
    std::uniform_real_distribution<double> wide(-0.1, 1.1), local(-0.15, 0.15), coin(0.0, 1.0);
    auto snap = [&](double v) {
        if (lattice_bits <= 0)
            return v;
        const double s = std::ldexp(1.0, lattice_bits);
        return std::round(v * s) / s;
    };
    std::vector<std::array<Vec2, 3>> tris;
    for (int i = 0; i < count; ++i) {
        std::array<Vec2, 3> t;
        if (coin(rng) < 0.5) {
            for (auto& p : t)
                p = {snap(wide(rng)), snap(wide(rng))};
        } else {
            const Vec2 c{wide(rng), wide(rng)};
            for (auto& p : t)
                p = {snap(c.x + local(rng)), snap(c.y + local(rng))};
        }
        tris.push_back(t);
    }
    return tris;
}

TexturedMesh triangle_soup(const std::vector<std::array<Vec2, 3>>& uvs)
{
    TexturedMesh m;
    for (std::size_t i = 0; i < uvs.size(); ++i) {
        const auto base = static_cast<std::uint32_t>(m.positions.size());
        const double z = 2.0 * double(i);
        m.positions.push_back({0, 0, z});
        m.positions.push_back({1, 0, z});
        m.positions.push_back({0, 1, z});
        add_mapped_triangle(m, {base, base + 1, base + 2}, uvs[i]);
    }
    return m;
}

TempDir::TempDir(const std::string& tag)
{
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("texmetrics_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height, int channels,
               int bit_depth, const std::function<std::array<double, 4>(std::uint32_t, std::uint32_t)>& texel)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp)
        throw std::runtime_error("cannot create " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    const int color_type = channels == 1   ? PNG_COLOR_TYPE_GRAY
                           : channels == 2 ? PNG_COLOR_TYPE_GRAY_ALPHA
                           : channels == 3 ? PNG_COLOR_TYPE_RGB
                                           : PNG_COLOR_TYPE_RGBA;
    const int bytes = bit_depth / 8;
    std::vector<unsigned char> data(std::size_t(width) * height * channels * bytes);
    const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
    for (std::uint32_t row = 0; row < height; ++row) {
        const std::uint32_t y = height - 1 - row; // PNG rows are top-down
        for (std::uint32_t x = 0; x < width; ++x) {
            const auto c = texel(x, y);
            std::array<double, 4> ch{};
            if (channels <= 2) {
                ch[0] = c[0];
                ch[1] = c[3];
            } else {
                ch = c;
            }
            for (int k = 0; k < channels; ++k) {
                const auto v = static_cast<unsigned>(std::lround(std::clamp(ch[k], 0.0, 1.0) * maxv));
                unsigned char* dst = &data[((std::size_t(row) * width + x) * channels + k) * bytes];
                if (bytes == 2) {
                    dst[0] = static_cast<unsigned char>(v >> 8);
                    dst[1] = static_cast<unsigned char>(v & 0xff);
                } else {
                    dst[0] = static_cast<unsigned char>(v);
                }
            }
        }
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("png write failed");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t row = 0; row < height; ++row)
        png_write_row(png, &data[std::size_t(row) * width * channels * bytes]);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::filesystem::path write_model(const std::filesystem::path& dir, TexturedMesh mesh, const std::string& texture_name)
{
    std::filesystem::create_directories(dir);
    if (!texture_name.empty()) {
        mesh.materials = {texmetrics::MaterialRef{"mat", texture_name, {}}};
        mesh.material_libraries = {"model.mtl"};
        for (auto& f : mesh.faces)
            f.material = 0;
        write_text(dir / "model.mtl", "newmtl mat\nKd 1 1 1\nmap_Kd " + texture_name + "\n");
    }
    const auto path = dir / "model.obj";
    std::ofstream out(path, std::ios::binary);
    texmetrics::write_obj(out, mesh);
    return path;
}

} // namespace fixtures
