#include "texmetrics/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>
#include <unordered_map>

namespace texmetrics {

namespace {

std::string_view trim(std::string_view s)
{
    const auto* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// Splits on blanks; the returned views alias `line`.
std::vector<std::string_view> tokenize(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_double(std::string_view tok, double& out)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_long(std::string_view tok, long& out)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end;
}

// OBJ indices are 1-based; negative values count back from the current end.
bool resolve_index(long raw, std::size_t count, std::uint32_t& out)
{
    long resolved = 0;
    if (raw > 0)
        resolved = raw - 1;
    else if (raw < 0)
        resolved = static_cast<long>(count) + raw;
    else
        return false;
    if (resolved < 0 || static_cast<std::size_t>(resolved) >= count)
        return false;
    out = static_cast<std::uint32_t>(resolved);
    return true;
}

struct Corner {
    long v = 0;
    long t = 0; // 0 when absent
};

bool parse_corner(std::string_view tok, Corner& c)
{
    const auto s1 = tok.find('/');
    if (!parse_long(tok.substr(0, s1), c.v))
        return false;
    c.t = 0;
    if (s1 == std::string_view::npos)
        return true;
    auto rest = tok.substr(s1 + 1);
    const auto s2 = rest.find('/');
    auto ttok = rest.substr(0, s2);
    if (!ttok.empty() && !parse_long(ttok, c.t))
        return false;
    if (s2 != std::string_view::npos) {
        long n = 0;
        auto ntok = rest.substr(s2 + 1);
        if (!ntok.empty() && !parse_long(ntok, n))
            return false;
    }
    return true;
}

std::string join_rest(const std::vector<std::string_view>& toks, std::size_t from)
{
    std::string s;
    for (std::size_t i = from; i < toks.size(); ++i) {
        if (!s.empty())
            s += ' ';
        s.append(toks[i]);
    }
    return s;
}

// Texture map statement arguments: skips -option values and returns the path.
std::string texture_path_argument(const std::vector<std::string_view>& toks)
{
    static const std::unordered_map<std::string_view, int> fixed_args = {
        {"-blendu", 1}, {"-blendv", 1}, {"-bm", 1},     {"-boost", 1}, {"-cc", 1},
        {"-clamp", 1},  {"-imfchan", 1}, {"-mm", 2},    {"-texres", 1}, {"-type", 1},
    };
    std::size_t i = 1;
    while (i < toks.size() && toks[i].size() > 1 && toks[i].front() == '-') {
        const auto opt = toks[i];
        ++i;
        if (auto it = fixed_args.find(opt); it != fixed_args.end()) {
            i += static_cast<std::size_t>(it->second);
        } else if (opt == "-o" || opt == "-s" || opt == "-t") {
            double tmp = 0.0;
            for (int k = 0; k < 3 && i < toks.size() && parse_double(toks[i], tmp); ++k)
                ++i;
        }
    }
    return join_rest(toks, i);
}

void warn(std::vector<ParseWarning>* warnings, std::size_t line, std::string msg)
{
    if (warnings)
        warnings->push_back({line, std::move(msg)});
}

} // namespace

std::vector<MaterialRef> parse_mtl(std::istream& source, std::vector<ParseWarning>* warnings)
{
    std::vector<MaterialRef> out;
    std::unordered_map<std::string, std::size_t> seen;
    MaterialRef* current = nullptr;
    bool skipping_duplicate = false;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(source, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto toks = tokenize(line);
        const auto key = toks[0];
        if (key == "newmtl") {
            auto name = join_rest(toks, 1);
            if (seen.count(name)) {
                warn(warnings, lineno, "duplicate material '" + name + "' ignored");
                current = nullptr;
                skipping_duplicate = true;
                continue;
            }
            skipping_duplicate = false;
            seen.emplace(name, out.size());
            out.push_back(MaterialRef{name, std::nullopt, {}});
            current = &out.back();
        } else if (key.size() > 4 && key.substr(0, 4) == "map_") {
            if (!current) {
                if (!skipping_duplicate)
                    warn(warnings, lineno, "texture statement outside of a material");
                continue;
            }
            auto path = texture_path_argument(toks);
            if (path.empty()) {
                warn(warnings, lineno, std::string(key) + " without a file name");
                continue;
            }
            if (key == "map_Kd")
                current->diffuse_texture_path = std::move(path);
            else
                current->aux_textures.emplace_back(std::string(key), std::move(path));
        } else if (key == "bump" || key == "disp" || key == "decal" || key == "refl" || key == "norm") {
            if (current) {
                auto path = texture_path_argument(toks);
                if (!path.empty())
                    current->aux_textures.emplace_back(std::string(key), std::move(path));
            }
        }
        // Scalar material parameters (Ka, Kd, Ns, illum, ...) carry nothing we measure.
    }
    return out;
}

ObjParseResult parse_obj(std::istream& source, const std::filesystem::path& base_dir)
{
    if (!source)
        throw IoError("unreadable OBJ stream");

    ObjParseResult result;
    auto& mesh = result.mesh;
    auto& warnings = result.warnings;

    std::unordered_map<std::string, std::uint32_t> material_index;
    std::uint32_t active_material = kNoIndex;
    std::size_t normal_count = 0;

    std::vector<Corner> corners;
    std::vector<std::uint32_t> vi;
    std::vector<std::uint32_t> ti;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(source, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto toks = tokenize(line);
        const auto key = toks[0];

        if (key == "v") {
            Vec3 p;
            if (toks.size() < 4 || !parse_double(toks[1], p.x) || !parse_double(toks[2], p.y) ||
                !parse_double(toks[3], p.z)) {
                warnings.push_back({lineno, "malformed vertex record dropped"});
                continue;
            }
            mesh.positions.push_back(p);
        } else if (key == "vt") {
            Vec2 t;
            if (toks.size() < 2 || !parse_double(toks[1], t.x) ||
                (toks.size() >= 3 && !parse_double(toks[2], t.y))) {
                warnings.push_back({lineno, "malformed texcoord record dropped"});
                continue;
            }
            mesh.texcoords.push_back(t);
        } else if (key == "vn") {
            ++normal_count;
        } else if (key == "f") {
            corners.clear();
            bool ok = toks.size() >= 4;
            for (std::size_t i = 1; ok && i < toks.size(); ++i) {
                Corner c;
                ok = parse_corner(toks[i], c);
                corners.push_back(c);
            }
            if (!ok) {
                warnings.push_back({lineno, toks.size() < 4 ? "face with fewer than 3 corners dropped"
                                                            : "malformed face record dropped"});
                continue;
            }
            vi.clear();
            ti.clear();
            for (const auto& c : corners) {
                std::uint32_t idx = 0;
                if (!resolve_index(c.v, mesh.positions.size(), idx)) {
                    ok = false;
                    break;
                }
                vi.push_back(idx);
                if (c.t != 0) {
                    if (!resolve_index(c.t, mesh.texcoords.size(), idx)) {
                        ok = false;
                        break;
                    }
                    ti.push_back(idx);
                }
            }
            if (!ok) {
                warnings.push_back({lineno, "face index out of range; face dropped"});
                continue;
            }
            bool mapped = ti.size() == vi.size();
            if (!ti.empty() && !mapped) {
                warnings.push_back({lineno, "face mixes corners with and without texcoords; demoted to unmapped"});
            }
            for (std::size_t k = 1; k + 1 < vi.size(); ++k) {
                Face f;
                f.v = {vi[0], vi[k], vi[k + 1]};
                if (mapped)
                    f.t = {ti[0], ti[k], ti[k + 1]};
                f.material = active_material;
                mesh.faces.push_back(f);
            }
        } else if (key == "usemtl") {
            auto name = join_rest(toks, 1);
            auto [it, inserted] = material_index.try_emplace(name, static_cast<std::uint32_t>(mesh.materials.size()));
            if (inserted)
                mesh.materials.push_back(MaterialRef{name, std::nullopt, {}});
            active_material = it->second;
        } else if (key == "mtllib") {
            auto whole = join_rest(toks, 1);
            if (!base_dir.empty() && !whole.empty() && std::filesystem::exists(base_dir / whole)) {
                mesh.material_libraries.push_back(whole);
            } else {
                for (std::size_t i = 1; i < toks.size(); ++i)
                    mesh.material_libraries.emplace_back(toks[i]);
            }
        } else if (key == "o" || key == "g" || key == "s") {
            // grouping and smoothing do not affect any measure
        } else {
            warnings.push_back({lineno, "unknown statement '" + std::string(key) + "' skipped"});
        }
    }
    if (source.bad())
        throw IoError("read error while parsing OBJ");
    (void)normal_count;

    if (base_dir.empty())
        return result;

    // Attach material library definitions to the names used by usemtl.
    for (const auto& lib : mesh.material_libraries) {
        const auto path = base_dir / lib;
        std::ifstream in(path);
        if (!in) {
            warnings.push_back({0, "material library '" + lib + "' not found"});
            continue;
        }
        std::vector<ParseWarning> mtl_warnings;
        auto defs = parse_mtl(in, &mtl_warnings);
        for (auto& w : mtl_warnings)
            warnings.push_back({0, lib + ":" + std::to_string(w.line) + ": " + w.message});
        for (auto& def : defs) {
            auto [it, inserted] = material_index.try_emplace(def.name, static_cast<std::uint32_t>(mesh.materials.size()));
            if (inserted) {
                mesh.materials.push_back(std::move(def));
                continue;
            }
            auto& existing = mesh.materials[it->second];
            if (existing.diffuse_texture_path || !existing.aux_textures.empty()) {
                warnings.push_back({0, "material '" + def.name + "' redefined in '" + lib + "'; first definition kept"});
                continue;
            }
            existing.diffuse_texture_path = std::move(def.diffuse_texture_path);
            existing.aux_textures = std::move(def.aux_textures);
        }
    }
    return result;
}

ObjParseResult load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    auto base = path.parent_path();
    if (base.empty())
        base = ".";
    return parse_obj(in, base);
}

void write_obj(std::ostream& out, const TexturedMesh& mesh)
{
    out.precision(17);
    for (const auto& lib : mesh.material_libraries)
        out << "mtllib " << lib << '\n';
    for (const auto& p : mesh.positions)
        out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    for (const auto& t : mesh.texcoords)
        out << "vt " << t.x << ' ' << t.y << '\n';
    std::uint32_t active = kNoIndex;
    for (const auto& f : mesh.faces) {
        if (f.material != active && f.has_material()) {
            out << "usemtl " << mesh.materials[f.material].name << '\n';
            active = f.material;
        }
        out << 'f';
        for (int k = 0; k < 3; ++k) {
            out << ' ' << f.v[k] + 1;
            if (f.mapped())
                out << '/' << f.t[k] + 1;
        }
        out << '\n';
    }
}

} // namespace texmetrics
