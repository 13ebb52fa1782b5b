#include "psiart/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <csetjmp>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "psiart/error.hpp"

namespace psiart {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool starts_with(const std::vector<unsigned char>& bytes,
                 std::initializer_list<unsigned char> magic) {
  if (bytes.size() < magic.size()) return false;
  return std::equal(magic.begin(), magic.end(), bytes.begin());
}

// --- PNG -------------------------------------------------------------------

struct PngReadCursor {
  const std::vector<unsigned char>* bytes;
  std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* cursor = static_cast<PngReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + n > cursor->bytes->size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cursor->bytes->data() + cursor->offset, n);
  cursor->offset += n;
}

// Errors surface as Error exceptions; libpng's default handler would also print.
void png_quiet_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_quiet_warning(png_structp, png_const_charp) {}

RasterImage decode_png(const std::vector<unsigned char>& bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error,
                                           png_quiet_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::IoError, "libpng initialisation failed");
  }
  std::vector<Rgb> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::InvalidInput, "corrupt PNG data");
  }
  PngReadCursor cursor{&bytes, 0};
  png_set_read_fn(png, &cursor, png_read_from_memory);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  std::vector<png_byte> row(png_get_rowbytes(png, info));
  pixels.resize(static_cast<std::size_t>(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < width; ++x) {
      pixels[y * width + x] = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return RasterImage(static_cast<int>(width), static_cast<int>(height),
                     std::move(pixels));
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

// --- JPEG ------------------------------------------------------------------

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

RasterImage decode_jpeg(const std::vector<unsigned char>& bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<Rgb> pixels;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorKind::InvalidInput, "corrupt JPEG data");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const auto width = cinfo.output_width;
  const auto height = cinfo.output_height;
  pixels.resize(static_cast<std::size_t>(width) * height);
  std::vector<JSAMPLE> row(static_cast<std::size_t>(width) * 3);
  while (cinfo.output_scanline < height) {
    JSAMPROW rows[1] = {row.data()};
    const auto y = cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (JDIMENSION x = 0; x < width; ++x) {
      pixels[y * width + x] = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return RasterImage(static_cast<int>(width), static_cast<int>(height),
                     std::move(pixels));
}

// --- Netpbm ----------------------------------------------------------------

RasterImage decode_pnm(const std::vector<unsigned char>& bytes) {
  std::string text(bytes.begin(), bytes.end());
  std::istringstream in(text);
  std::string magic;
  in >> magic;
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = -1;
    in >> v;
    return v;
  };
  const int width = next_int();
  const int height = next_int();
  const int maxval = next_int();
  if (!in || width < 1 || height < 1 || maxval != 255) {
    fail(ErrorKind::InvalidInput, "unsupported or corrupt PNM header");
  }
  in.get();
  const std::size_t channels = magic == "P6" ? 3 : 1;
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (offset + need > bytes.size()) {
    fail(ErrorKind::InvalidInput, "truncated PNM data");
  }
  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const unsigned char* p = &bytes[offset + i * channels];
    pixels[i] = channels == 3 ? Rgb{p[0], p[1], p[2]} : Rgb{p[0], p[0], p[0]};
  }
  return RasterImage(width, height, std::move(pixels));
}

}  // namespace

RasterImage decode_image_bytes(const std::vector<unsigned char>& bytes) {
  if (starts_with(bytes, {0x89, 'P', 'N', 'G'})) return decode_png(bytes);
  if (starts_with(bytes, {0xFF, 0xD8, 0xFF})) return decode_jpeg(bytes);
  if (starts_with(bytes, {'P', '6'}) || starts_with(bytes, {'P', '5'})) {
    return decode_pnm(bytes);
  }
  fail(ErrorKind::InvalidInput, "unrecognised image format");
}

RasterImage decode_image(const std::filesystem::path& path) {
  try {
    return decode_image_bytes(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) {
      fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::vector<unsigned char> encode_png(const RasterImage& img) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "libpng initialisation failed");
  }
  std::vector<unsigned char> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(img.width()) * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& p = img.at(x, y);
      row[3 * x] = p.r;
      row[3 * x + 1] = p.g;
      row[3 * x + 2] = p.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
}

void write_ppm(const std::filesystem::path& path, const RasterImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (const Rgb& p : img.pixels()) {
    const char px[3] = {static_cast<char>(p.r), static_cast<char>(p.g),
                        static_cast<char>(p.b)};
    out.write(px, 3);
  }
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
}

bool is_image_file(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".ppm" ||
         ext == ".pgm";
}

}  // namespace psiart
