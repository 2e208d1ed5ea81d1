#include "texmetrics/mesh_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace texmetrics {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

struct ReadState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::string error;

    ~ReadState() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

void on_error(png_structp png, png_const_charp msg)
{
    auto* state = static_cast<ReadState*>(png_get_error_ptr(png));
    state->error = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

struct Decoded {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 8;
    std::vector<unsigned char> data; // RGB rows, top row first
    std::vector<png_bytep> rows;
};

// No objects with destructors may be created between setjmp and the end of
// this function; everything lives in `out` or `state`.
bool decode(std::FILE* file, ReadState& state, Decoded& out)
{
    if (setjmp(png_jmpbuf(state.png)))
        return false;
    png_init_io(state.png, file);
    png_read_info(state.png, state.info);

    const int color_type = png_get_color_type(state.png, state.info);
    const int depth = png_get_bit_depth(state.png, state.info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(state.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(state.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(state.png);
    if (color_type & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(state.png);
    png_read_update_info(state.png, state.info);

    out.width = png_get_image_width(state.png, state.info);
    out.height = png_get_image_height(state.png, state.info);
    out.bit_depth = png_get_bit_depth(state.png, state.info);
    const auto rowbytes = png_get_rowbytes(state.png, state.info);
    out.data.resize(rowbytes * out.height);
    out.rows.resize(out.height);
    for (png_uint_32 y = 0; y < out.height; ++y)
        out.rows[y] = out.data.data() + rowbytes * y;
    png_read_image(state.png, out.rows.data());
    png_read_end(state.png, nullptr);
    return true;
}

} // namespace

TextureImage load_texture(const std::filesystem::path& path, std::optional<TextureDims> dims_override)
{
    if (dims_override) {
        if (dims_override->width == 0 || dims_override->height == 0)
            throw IoError("invalid texture dimensions");
        return TextureImage{dims_override->width, dims_override->height, {}};
    }

    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "rb"));
    if (!file)
        throw IoError("cannot open texture '" + path.string() + "'");
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError("'" + path.string() + "' is not a PNG image");

    ReadState state;
    state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, on_error, on_warning);
    if (!state.png)
        throw IoError("libpng initialization failed");
    state.info = png_create_info_struct(state.png);
    if (!state.info)
        throw IoError("libpng initialization failed");
    png_set_sig_bytes(state.png, 8);

    Decoded dec;
    if (!decode(file.get(), state, dec))
        throw IoError("cannot decode '" + path.string() + "': " + state.error);
    if (dec.width == 0 || dec.height == 0)
        throw IoError("invalid texture dimensions");

    TextureImage img;
    img.width = dec.width;
    img.height = dec.height;
    img.pixels.resize(std::size_t(dec.width) * dec.height);
    const bool wide = dec.bit_depth == 16;
    const float type_max = wide ? 65535.0f : 255.0f;
    for (png_uint_32 row = 0; row < dec.height; ++row) {
        const unsigned char* src = dec.rows[row];
        // PNG rows run top to bottom; texture row 0 sits at v = 0.
        Rgb* dst = img.pixels.data() + std::size_t(dec.height - 1 - row) * dec.width;
        for (png_uint_32 x = 0; x < dec.width; ++x) {
            float ch[3];
            for (int c = 0; c < 3; ++c) {
                const unsigned value = wide ? (unsigned(src[0]) << 8) | src[1] : src[0];
                src += wide ? 2 : 1;
                ch[c] = static_cast<float>(value) / type_max;
            }
            dst[x] = Rgb{ch[0], ch[1], ch[2]};
        }
    }
    return img;
}

} // namespace texmetrics
