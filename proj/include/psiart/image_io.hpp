#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "psiart/image.hpp"

namespace psiart {

// Decodes PNG, JPEG, or binary PPM/PGM. Format is sniffed from the magic
// bytes, not the extension. Throws Error(InvalidInput) on undecodable data
// and Error(IoError) when the file cannot be read.
RasterImage decode_image(const std::filesystem::path& path);
RasterImage decode_image_bytes(const std::vector<unsigned char>& bytes);

std::vector<unsigned char> encode_png(const RasterImage& img);
void write_png(const std::filesystem::path& path, const RasterImage& img);
void write_ppm(const std::filesystem::path& path, const RasterImage& img);

bool is_image_file(const std::filesystem::path& path);

}  // namespace psiart
