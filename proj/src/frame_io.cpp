// frame_io.cpp : PGM/PPM and PNG codecs plus paired-sequence scanning
#include "nightfuse/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include <png.h>

#include "nightfuse/errors.hpp"

namespace fs = std::filesystem;

namespace nightfuse {
namespace {

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size > 0) {
    bytes.resize(static_cast<std::size_t>(size));
    in.seekg(0, std::ios::beg);
    in.read(reinterpret_cast<char*>(bytes.data()), size);
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

std::vector<std::uint8_t> read_file_prefix(const fs::path& path, std::size_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  std::vector<std::uint8_t> bytes(limit);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(limit));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  return bytes;
}

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

enum class Container { Pnm, Png };

Container sniff_container(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  if (bytes.empty()) throw MalformedImage(path.string() + ": empty file");
  if (bytes.size() >= 3 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6') &&
      (std::isspace(bytes[2]) || bytes[2] == '#'))
    return Container::Pnm;
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0)
    return Container::Png;
  throw MalformedImage(path.string() + ": unrecognized image format");
}

struct PnmHeader {
  char magic;  // '5' or '6'
  int width;
  int height;
  std::size_t data_offset;
};

PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  auto fail = [&](const std::string& why) -> void {
    throw MalformedImage(path.string() + ": " + why);
  };
  PnmHeader header{};
  header.magic = static_cast<char>(bytes[1]);
  std::size_t pos = 2;
  auto next_int = [&](const char* what) {
    while (pos < bytes.size()) {
      const std::uint8_t c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      fail(std::string("bad or missing ") + what + " in header");
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1000000000L) fail(std::string(what) + " out of range");
      ++pos;
    }
    return value;
  };
  const long width = next_int("width");
  const long height = next_int("height");
  const long maxval = next_int("maxval");
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    fail("missing whitespace after maxval");
  ++pos;  // exactly one whitespace byte separates the header from the raster
  if (width < 1 || height < 1) fail("dimensions must be positive");
  if (maxval > 255) fail("bit depth is not 8 (maxval " + std::to_string(maxval) + ")");
  if (maxval < 1) fail("bad maxval " + std::to_string(maxval));
  if (width > 65535 || height > 65535) fail("dimensions out of range");
  header.width = static_cast<int>(width);
  header.height = static_cast<int>(height);
  header.data_offset = pos;
  return header;
}

struct DecodedImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> pixels;
};

DecodedImage decode_pnm(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  const PnmHeader header = parse_pnm_header(bytes, path);
  DecodedImage img;
  img.width = header.width;
  img.height = header.height;
  img.channels = header.magic == '5' ? 1 : 3;
  const std::size_t need = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (bytes.size() - header.data_offset < need)
    throw MalformedImage(path.string() + ": truncated raster (expected " +
                         std::to_string(need) + " bytes, found " +
                         std::to_string(bytes.size() - header.data_offset) + ")");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header.data_offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(header.data_offset + need));
  return img;
}

struct MemReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

extern "C" void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* reader = static_cast<MemReader*>(png_get_io_ptr(png));
  if (reader->offset + len > reader->size)
    png_error(png, "unexpected end of stream");
  std::memcpy(out, reader->data + reader->offset, len);
  reader->offset += len;
}

struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngReadState() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

DecodedImage decode_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  PngReadState state;
  if (!state.png || !state.info)
    throw IoError(path.string() + ": cannot allocate PNG reader");
  MemReader reader{bytes.data(), bytes.size(), 0};
  DecodedImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(state.png)))
    throw MalformedImage(path.string() + ": corrupt PNG");
  png_set_read_fn(state.png, &reader, png_mem_read);
  png_read_info(state.png, state.info);
  if (png_get_bit_depth(state.png, state.info) == 16)
    throw MalformedImage(path.string() + ": 16-bit PNG is not supported (8-bit only)");
  png_set_expand(state.png);       // palette to RGB, low-bit gray to 8, tRNS to alpha
  png_set_strip_alpha(state.png);
  png_set_interlace_handling(state.png);
  png_read_update_info(state.png, state.info);
  img.width = static_cast<int>(png_get_image_width(state.png, state.info));
  img.height = static_cast<int>(png_get_image_height(state.png, state.info));
  img.channels = png_get_channels(state.png, state.info);
  if (img.width < 1 || img.height < 1)
    throw MalformedImage(path.string() + ": dimensions must be positive");
  if (img.channels != 1 && img.channels != 3)
    throw MalformedImage(path.string() + ": unsupported channel layout");
  const std::size_t rowbytes = png_get_rowbytes(state.png, state.info);
  if (rowbytes != static_cast<std::size_t>(img.width) * img.channels)
    throw MalformedImage(path.string() + ": unexpected row layout");
  img.pixels.resize(rowbytes * img.height);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y)
    rows[static_cast<std::size_t>(y)] = img.pixels.data() + static_cast<std::size_t>(y) * rowbytes;
  png_read_image(state.png, rows.data());
  png_read_end(state.png, nullptr);
  return img;
}

DecodedImage decode_any(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  switch (sniff_container(bytes, path)) {
    case Container::Pnm: return decode_pnm(bytes, path);
    case Container::Png: return decode_png(bytes, path);
  }
  throw MalformedImage(path.string() + ": unrecognized image format");
}

bool wants_png(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

void save_pnm(const std::uint8_t* pixels, int width, int height, int channels,
              const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << (channels == 1 ? "P5" : "P6") << "\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels),
            static_cast<std::streamsize>(static_cast<std::size_t>(width) * height * channels));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* file = nullptr;
  PngWriteState() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngWriteState() {
    png_destroy_write_struct(&png, &info);
    if (file) std::fclose(file);
  }
};

void save_png(const std::uint8_t* pixels, int width, int height, int channels,
              const fs::path& path) {
  PngWriteState state;
  if (!state.png || !state.info)
    throw IoError(path.string() + ": cannot allocate PNG writer");
  state.file = std::fopen(path.string().c_str(), "wb");
  if (!state.file) throw IoError("cannot open " + path.string() + " for writing");
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * rowbytes);
  if (setjmp(png_jmpbuf(state.png)))
    throw IoError(path.string() + ": PNG write failed");
  png_init_io(state.png, state.file);
  png_set_IHDR(state.png, state.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(state.png, state.info);
  png_write_image(state.png, rows.data());
  png_write_end(state.png, nullptr);
  if (std::fclose(state.file) != 0) {
    state.file = nullptr;
    throw IoError("write failed: " + path.string());
  }
  state.file = nullptr;
}

std::uint32_t read_be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

std::string lowercase_ext(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<fs::path> list_image_files(const fs::path& dir) {
  if (!fs::exists(dir)) throw FileNotFound("directory not found: " + dir.string());
  if (!fs::is_directory(dir)) throw FileNotFound(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lowercase_ext(entry.path());
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png")
      files.push_back(entry.path());
  }
  if (files.empty()) throw EmptyDirectory("no image files in " + dir.string());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

}  // namespace

GrayFrame load_gray_frame(const fs::path& path) {
  DecodedImage img = decode_any(path);
  if (img.channels != 1)
    throw ColorInGrayStream(path.string() + ": color image in a grayscale stream");
  GrayFrame frame;
  frame.width = img.width;
  frame.height = img.height;
  frame.data = std::move(img.pixels);
  return frame;
}

RgbFrame load_rgb_frame(const fs::path& path) {
  DecodedImage img = decode_any(path);
  RgbFrame frame(img.width, img.height);
  if (img.channels == 3) {
    frame.data = std::move(img.pixels);
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      frame.data[3 * i] = img.pixels[i];
      frame.data[3 * i + 1] = img.pixels[i];
      frame.data[3 * i + 2] = img.pixels[i];
    }
  }
  return frame;
}

void save_frame(const GrayFrame& frame, const fs::path& path) {
  if (wants_png(path))
    save_png(frame.data.data(), frame.width, frame.height, 1, path);
  else
    save_pnm(frame.data.data(), frame.width, frame.height, 1, path);
}

void save_frame(const RgbFrame& frame, const fs::path& path) {
  if (wants_png(path))
    save_png(frame.data.data(), frame.width, frame.height, 3, path);
  else
    save_pnm(frame.data.data(), frame.width, frame.height, 3, path);
}

std::pair<int, int> probe_dimensions(const fs::path& path) {
  std::vector<std::uint8_t> bytes = read_file_prefix(path, 4096);
  if (bytes.empty()) throw MalformedImage(path.string() + ": empty file");
  switch (sniff_container(bytes, path)) {
    case Container::Pnm: {
      const PnmHeader header = parse_pnm_header(bytes, path);
      return {header.width, header.height};
    }
    case Container::Png: {
      // 8-byte signature, 8-byte chunk preamble, then IHDR width and height.
      if (bytes.size() < 24 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
        throw MalformedImage(path.string() + ": truncated PNG header");
      const std::uint32_t w = read_be32(bytes.data() + 16);
      const std::uint32_t h = read_be32(bytes.data() + 20);
      if (w < 1 || h < 1 || w > 65535 || h > 65535)
        throw MalformedImage(path.string() + ": dimensions out of range");
      return {static_cast<int>(w), static_cast<int>(h)};
    }
  }
  throw MalformedImage(path.string() + ": unrecognized image format");
}

SequenceManifest scan_sequences(const fs::path& ir_dir, const fs::path& vis_dir,
                                double frame_rate_hint) {
  SequenceManifest manifest;
  manifest.ir_paths = list_image_files(ir_dir);
  manifest.vis_paths = list_image_files(vis_dir);
  if (manifest.ir_paths.size() != manifest.vis_paths.size())
    throw FrameCountMismatch("IR stream has " + std::to_string(manifest.ir_paths.size()) +
                             " frames, visible stream has " +
                             std::to_string(manifest.vis_paths.size()));
  const auto [width, height] = probe_dimensions(manifest.ir_paths.front());
  for (const auto* stream : {&manifest.ir_paths, &manifest.vis_paths}) {
    for (const fs::path& path : *stream) {
      const auto [w, h] = probe_dimensions(path);
      if (w != width || h != height)
        throw DimensionMismatch(path.string() + ": " + std::to_string(w) + "x" +
                                std::to_string(h) + " differs from expected " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
  }
  manifest.frame_rate_hint = frame_rate_hint;
  manifest.width = width;
  manifest.height = height;
  manifest.frame_count = manifest.ir_paths.size();
  return manifest;
}

}  // namespace nightfuse
