#ifndef NGBMP_PGM_HPP
#define NGBMP_PGM_HPP

#include <string>

#include <Eigen/Dense>

namespace ngbmp {

// Reads a binary (P5) PGM file with maxval at most 255 into an H x W matrix
// of pixel values in [0, 255]. Header comments (# ...) are honored. Throws
// IoError on missing files, wrong magic, maxval over 255, or truncated
// pixel data.
Eigen::MatrixXd pgm_read(const std::string& path);

// Writes an image as binary (P5) PGM with maxval 255. Values are clamped to
// [0, 255] and rounded to the nearest integer. Throws IoError when the file
// cannot be written and DomainError on empty or non-finite input.
void pgm_write(const std::string& path, const Eigen::MatrixXd& image);

}  // namespace ngbmp

#endif  // NGBMP_PGM_HPP
