#include "aiot/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "aiot/error.hpp"

namespace aiot {
namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  long width = 0;
  long height = 0;
  long maxval = 0;
  std::size_t data_offset = 0;
};

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* field) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 30)) throw Error(ErrorCode::MalformedHeader, std::string(field) + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::MalformedHeader, std::string("missing ") + field);
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

PnmHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::MalformedHeader, "expected P5 or P6 magic");
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  PnmHeader h;
  h.kind = static_cast<char>(bytes[1]);
  h.width = reader.number("width");
  h.height = reader.number("height");
  h.maxval = reader.number("maxval");
  if (h.width < 1 || h.height < 1) throw Error(ErrorCode::MalformedHeader, "zero dimension");
  if (h.maxval != 255) {
    throw Error(ErrorCode::MaxvalUnsupported, "maxval " + std::to_string(h.maxval) + " (only 255)");
  }
  // Exactly one whitespace byte separates maxval from the raster.
  if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
    throw Error(ErrorCode::MalformedHeader, "missing separator before raster");
  }
  h.data_offset = reader.pos() + 1;
  return h;
}

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes);
  if (h.kind != '5') throw Error(ErrorCode::MalformedHeader, "not a P5 image");
  const auto count = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.data_offset < count) {
    throw Error(ErrorCode::TruncatedPixels,
                "expected " + std::to_string(count) + " pixels, got " + std::to_string(bytes.size() - h.data_offset));
  }
  GrayImage img(h.height, h.width);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset), count, img.data());
  return img;
}

GrayImage load_image(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes);
  if (h.kind == '5') return load_pgm(bytes);
  const auto count = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (bytes.size() - h.data_offset < 3 * count) throw Error(ErrorCode::TruncatedPixels, "short P6 raster");
  GrayImage img(h.height, h.width);
  const auto* rgb = bytes.data() + h.data_offset;
  for (std::size_t i = 0; i < count; ++i) {
    img.data()[i] = to_grayscale(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return img;
}

Bytes write_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), img.data(), img.data() + img.size());
  return out;
}

SymbolSequence flatten(const GrayImage& img) {
  SymbolSequence seq;
  seq.alphabet_bound = 256;
  seq.symbols.assign(img.data(), img.data() + img.size());
  return seq;
}

GrayImage unflatten(std::span<const std::uint32_t> symbols, Eigen::Index width, Eigen::Index height) {
  if (static_cast<Eigen::Index>(symbols.size()) != width * height) {
    throw Error(ErrorCode::DimensionMismatch, "symbol count does not match image dimensions");
  }
  GrayImage img(height, width);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] > 255) throw Error(ErrorCode::LevelOutOfRange, "symbol exceeds 8 bits");
    img.data()[i] = static_cast<std::uint8_t>(symbols[i]);
  }
  return img;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace aiot
