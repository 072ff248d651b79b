#pragma once

#include <csetjmp>
#include <cstdio>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "radiocal/errors.hpp"
#include "radiocal/image.hpp"

namespace radiocal {

namespace detail {

struct JpegError {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

struct FileHandle {
    FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp)
            std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline Image load_png_file(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp)
        throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }

    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }

    png_init_io(png, file.fp);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_RGB_ALPHA) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": only RGB rasters are supported");
    }
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": unsupported bit depth " + std::to_string(bit_depth));
    }
    if (color_type == PNG_COLOR_TYPE_RGB_ALPHA)
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
        rows[r] = data.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(static_cast<int>(width), static_cast<int>(height));
    if (bit_depth == 8) {
        for (png_uint_32 r = 0; r < height; ++r)
            for (png_uint_32 c = 0; c < width; ++c) {
                const png_byte* px = rows[r] + 3 * c;
                img.at(static_cast<int>(r), static_cast<int>(c)) = {
                    px[0] / 255.0, px[1] / 255.0, px[2] / 255.0};
            }
    } else {
        for (png_uint_32 r = 0; r < height; ++r)
            for (png_uint_32 c = 0; c < width; ++c) {
                const png_byte* px = rows[r] + 6 * c; // network byte order
                const auto v = [&](int ch) {
                    return ((px[2 * ch] << 8) | px[2 * ch + 1]) / 65535.0;
                };
                img.at(static_cast<int>(r), static_cast<int>(c)) = {v(0), v(1), v(2)};
            }
    }
    return img;
}

inline Image load_jpeg_file(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp)
        throw IoError("cannot open " + path);

    jpeg_decompress_struct cinfo;
    JpegError jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;

    std::vector<unsigned char> rowbuf;
    Image img;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("failed to decode JPEG: " + path);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.fp);
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space == JCS_GRAYSCALE) {
        jpeg_destroy_decompress(&cinfo);
        throw FormatError(path + ": only RGB rasters are supported");
    }
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    img = Image(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    rowbuf.resize(static_cast<std::size_t>(cinfo.output_width) * 3);
    unsigned char* rowptr = rowbuf.data();
    int r = 0;
    while (cinfo.output_scanline < cinfo.output_height) {
        jpeg_read_scanlines(&cinfo, &rowptr, 1);
        for (int c = 0; c < img.width; ++c)
            img.at(r, c) = {rowbuf[3 * c] / 255.0, rowbuf[3 * c + 1] / 255.0,
                            rowbuf[3 * c + 2] / 255.0};
        ++r;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

} // namespace detail

/// Decode a PNG or JPEG RGB raster and normalize channels by the bit-depth
/// maximum (255 or 65535). The format is sniffed from the file's magic bytes.
inline Image load_image(const std::string& path) {
    unsigned char magic[8] = {0};
    {
        detail::FileHandle file(path, "rb");
        if (!file.fp)
            throw IoError("cannot open " + path);
        if (std::fread(magic, 1, sizeof(magic), file.fp) < 3)
            throw FormatError(path + ": not a PNG or JPEG file");
    }
    if (png_sig_cmp(magic, 0, 8) == 0)
        return detail::load_png_file(path);
    if (magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF)
        return detail::load_jpeg_file(path);
    throw FormatError(path + ": not a PNG or JPEG file");
}

/// Write an RGB PNG at the requested bit depth (8 or 16). Channel values are
/// clamped to [0,1] and rounded to the nearest code.
inline void save_png(const Image& img, const std::string& path, int bit_depth = 8) {
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("save_png: bit depth must be 8 or 16");
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("save_png: empty image");

    detail::FileHandle file(path, "wb");
    if (!file.fp)
        throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }

    const std::size_t bytes_per_px = bit_depth == 8 ? 3 : 6;
    std::vector<png_byte> data(static_cast<std::size_t>(img.width) * img.height * bytes_per_px);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    for (int r = 0; r < img.height; ++r) {
        rows[r] = data.data() + static_cast<std::size_t>(r) * img.width * bytes_per_px;
        for (int c = 0; c < img.width; ++c) {
            const Rgb& px = img.at(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                const double v = std::min(1.0, std::max(0.0, px[ch]));
                if (bit_depth == 8) {
                    rows[r][3 * c + ch] = static_cast<png_byte>(v * 255.0 + 0.5);
                } else {
                    const auto q = static_cast<unsigned>(v * 65535.0 + 0.5);
                    rows[r][6 * c + 2 * ch] = static_cast<png_byte>(q >> 8);
                    rows[r][6 * c + 2 * ch + 1] = static_cast<png_byte>(q & 0xFF);
                }
            }
        }
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to write PNG: " + path);
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), bit_depth, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace radiocal
