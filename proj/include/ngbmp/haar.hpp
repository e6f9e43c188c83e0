#ifndef NGBMP_HAAR_HPP
#define NGBMP_HAAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ngbmp/estimator.hpp"

namespace ngbmp {

// One analysis level of the 2x2 orthonormal Haar transform. All four bands
// have identical dimensions (H/2 x W/2).
struct HaarBands {
  Eigen::MatrixXd ll;  // average band
  Eigen::MatrixXd lh;  // horizontal detail
  Eigen::MatrixXd hl;  // vertical detail
  Eigen::MatrixXd hh;  // diagonal detail
};

// Splits an even-sided image into four half-resolution subbands. The 2x2
// block [[a,b],[c,d]] maps to
//   ll = (a+b+c+d)/2, lh = (a-b+c-d)/2, hl = (a+b-c-d)/2, hh = (a-b-c+d)/2,
// which is orthonormal: total energy is preserved exactly. Throws
// OddDimensionError unless both sides are positive and even.
HaarBands haar_forward(const Eigen::MatrixXd& image);

// Exact inverse of haar_forward. Throws DomainError if the four bands are
// empty or their dimensions disagree.
Eigen::MatrixXd haar_inverse(const HaarBands& bands);

// Result of magnitude thresholding one detail band.
struct ThresholdResult {
  Eigen::MatrixXd band;  // input with all but the kept entries zeroed
  int kept = 0;          // nonzero count after thresholding
  double rate = 0.0;     // kept / band size
};

// Keeps the ceil(keep_fraction * count) largest-magnitude entries and zeros
// the rest. Ties at the cut go to the lower storage-order index. Entries
// that are exactly zero are never counted as kept, so the realized rate can
// fall below keep_fraction on sparse input. Requires 0 < keep_fraction <= 1.
ThresholdResult threshold_detail(const Eigen::MatrixXd& band, double keep_fraction);

// Per-band outcome of a multiscale recovery run.
struct BandRecovery {
  std::string name;      // "lh", "hl" or "hh"
  int n = 0;             // band length after vectorization
  int m = 0;             // measurement count
  int nnz_target = 0;    // nonzeros in the thresholded band
  double realized_rate = 0.0;
  double nmse_db = 0.0;  // recovered vs thresholded band; NaN when skipped
  double p_hat = 0.0;
  double sigma2_hat = 0.0;
  int iterations = 0;
  bool skipped = false;  // true when the thresholded band was all zero
};

struct MultiscaleResult {
  Eigen::MatrixXd reconstructed;
  std::vector<BandRecovery> bands;  // lh, hl, hh in that order
  double image_nmse_db = 0.0;       // reconstructed vs the original image
  double recover_time_s = 0.0;      // summed recover() wall time over bands
};

struct MultiscaleOptions {
  int m_per_band = 0;           // measurements per detail band, in [1, band length]
  double snr_db = 25.0;         // measurement SNR; +infinity for noiseless
  double keep_fraction = 0.05;  // threshold level for the detail bands
  int passes = 5;
  double tail_prob = 1e-3;
  int max_bootstrap_iter = 10;
  int threads = 1;              // band-level parallelism (the bands are independent)
};

// Full compressed-measurement pipeline on one image: Haar analysis, detail
// thresholding, per-band random real-valued measurement at the requested
// SNR, sparse recovery with bootstrapped hyperparameters (p seeded from
// keep_fraction / 2), and synthesis. The average band passes through
// untouched. Bands whose thresholded version is all zero are skipped and
// reconstructed as zero.
//
// Per-band randomness derives from mix_seed(seed, 2 * band_index) for the
// matrix and mix_seed(seed, 2 * band_index + 1) for the noise, so results
// do not depend on scheduling.
MultiscaleResult multiscale_recover(const Eigen::MatrixXd& image,
                                    const MultiscaleOptions& opt,
                                    std::uint64_t seed);

}  // namespace ngbmp

#endif  // NGBMP_HAAR_HPP
