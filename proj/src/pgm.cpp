#include "ngbmp/pgm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "ngbmp/errors.hpp"

namespace ngbmp {

namespace {

// Reads the next header token, skipping whitespace and '#' comments that
// run to end of line.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      // keep skipping
    } else {
      break;
    }
    ch = in.get();
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  // ch now holds the single whitespace byte terminating the token, which
  // PGM counts as part of the header. Nothing to push back.
  return tok;
}

long parse_positive(const std::string& tok, const char* what) {
  if (tok.empty()) throw IoError(std::string("pgm_read: missing ") + what);
  long value = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') throw IoError(std::string("pgm_read: malformed ") + what);
    value = value * 10 + (c - '0');
    if (value > 1000000) throw IoError(std::string("pgm_read: implausible ") + what);
  }
  if (value <= 0) throw IoError(std::string("pgm_read: nonpositive ") + what);
  return value;
}

}  // namespace

Eigen::MatrixXd pgm_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("pgm_read: cannot open " + path);

  const std::string magic = next_token(in);
  if (magic != "P5") throw IoError("pgm_read: not a binary PGM (magic '" + magic + "')");
  const long w = parse_positive(next_token(in), "width");
  const long h = parse_positive(next_token(in), "height");
  const long maxval = parse_positive(next_token(in), "maxval");
  if (maxval > 255) throw IoError("pgm_read: maxval above 255 is unsupported");
  // next_token consumed exactly one whitespace byte after maxval, so the
  // stream now sits at the first pixel.

  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError("pgm_read: truncated pixel data in " + path);
  }

  Eigen::MatrixXd image(h, w);
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) {
      image(i, j) = static_cast<double>(raw[static_cast<std::size_t>(i) * w + j]);
    }
  }
  return image;
}

void pgm_write(const std::string& path, const Eigen::MatrixXd& image) {
  if (image.size() == 0) throw DomainError("pgm_write: empty image");
  if (!image.allFinite()) throw DomainError("pgm_write: image has non-finite values");

  const long h = image.rows();
  const long w = image.cols();
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) {
      const double v = std::min(255.0, std::max(0.0, image(i, j)));
      raw[static_cast<std::size_t>(i) * w + j] = static_cast<std::uint8_t>(std::lround(v));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("pgm_write: cannot open " + path);
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("pgm_write: write failed for " + path);
}

}  // namespace ngbmp
