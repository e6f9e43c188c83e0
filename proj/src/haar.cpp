#include "ngbmp/haar.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "ngbmp/datagen.hpp"
#include "ngbmp/errors.hpp"
#include "ngbmp/parallel.hpp"
#include "ngbmp/rng.hpp"

namespace ngbmp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

HaarBands haar_forward(const Eigen::MatrixXd& image) {
  const Index h = image.rows();
  const Index w = image.cols();
  if (h <= 0 || w <= 0 || h % 2 != 0 || w % 2 != 0) {
    throw OddDimensionError("haar_forward: image sides must be positive and even");
  }
  const Index hr = h / 2;
  const Index hc = w / 2;
  HaarBands b;
  b.ll.resize(hr, hc);
  b.lh.resize(hr, hc);
  b.hl.resize(hr, hc);
  b.hh.resize(hr, hc);
  for (Index j = 0; j < hc; ++j) {
    for (Index i = 0; i < hr; ++i) {
      const double a = image(2 * i, 2 * j);
      const double bb = image(2 * i, 2 * j + 1);
      const double c = image(2 * i + 1, 2 * j);
      const double d = image(2 * i + 1, 2 * j + 1);
      b.ll(i, j) = (a + bb + c + d) / 2.0;
      b.lh(i, j) = (a - bb + c - d) / 2.0;
      b.hl(i, j) = (a + bb - c - d) / 2.0;
      b.hh(i, j) = (a - bb - c + d) / 2.0;
    }
  }
  return b;
}

Eigen::MatrixXd haar_inverse(const HaarBands& bands) {
  const Index r = bands.ll.rows();
  const Index c = bands.ll.cols();
  if (r <= 0 || c <= 0) {
    throw DomainError("haar_inverse: empty bands");
  }
  auto matches = [&](const MatrixXd& m) { return m.rows() == r && m.cols() == c; };
  if (!matches(bands.lh) || !matches(bands.hl) || !matches(bands.hh)) {
    throw DomainError("haar_inverse: band dimensions disagree");
  }
  MatrixXd image(2 * r, 2 * c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) {
      const double ll = bands.ll(i, j);
      const double lh = bands.lh(i, j);
      const double hl = bands.hl(i, j);
      const double hh = bands.hh(i, j);
      // The block transform matrix is symmetric orthogonal, so it is its
      // own inverse.
      image(2 * i, 2 * j) = (ll + lh + hl + hh) / 2.0;
      image(2 * i, 2 * j + 1) = (ll - lh + hl - hh) / 2.0;
      image(2 * i + 1, 2 * j) = (ll + lh - hl - hh) / 2.0;
      image(2 * i + 1, 2 * j + 1) = (ll - lh - hl + hh) / 2.0;
    }
  }
  return image;
}

ThresholdResult threshold_detail(const Eigen::MatrixXd& band, double keep_fraction) {
  if (!std::isfinite(keep_fraction) || keep_fraction <= 0.0 || keep_fraction > 1.0) {
    throw DomainError("threshold_detail: keep_fraction must lie in (0, 1]");
  }
  const Index count = band.size();
  if (count == 0) {
    throw DomainError("threshold_detail: empty band");
  }
  const Index keep =
      std::min(count, static_cast<Index>(std::ceil(keep_fraction * static_cast<double>(count))));

  Eigen::Map<const VectorXd> flat(band.data(), count);
  std::vector<Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Index{0});
  // Stable sort on descending magnitude keeps equal-magnitude entries in
  // ascending storage order, which settles ties at the cut.
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(flat(a)) > std::abs(flat(b)); });

  ThresholdResult out;
  out.band = MatrixXd::Zero(band.rows(), band.cols());
  Eigen::Map<VectorXd> kept(out.band.data(), count);
  for (Index rank = 0; rank < keep; ++rank) {
    const Index i = order[static_cast<std::size_t>(rank)];
    if (flat(i) == 0.0) {
      break;  // only zeros remain beyond this rank; they are not "kept"
    }
    kept(i) = flat(i);
    ++out.kept;
  }
  out.rate = static_cast<double>(out.kept) / static_cast<double>(count);
  return out;
}

MultiscaleResult multiscale_recover(const Eigen::MatrixXd& image, const MultiscaleOptions& opt,
                                    std::uint64_t seed) {
  if (image.rows() != image.cols()) {
    throw DomainError("multiscale_recover: image must be square");
  }
  if (image.squaredNorm() <= 0.0) {
    throw DomainError("multiscale_recover: image is identically zero");
  }
  HaarBands analysis = haar_forward(image);  // also validates the side length
  const int n_band = static_cast<int>(analysis.ll.size());
  if (opt.m_per_band < 1 || opt.m_per_band > n_band) {
    throw DomainError("multiscale_recover: m_per_band must lie in [1, band length]");
  }
  if (std::isnan(opt.snr_db)) {
    throw DomainError("multiscale_recover: snr_db is NaN");
  }

  MultiscaleResult out;
  out.bands.resize(3);

  HaarBands synthesis = analysis;  // ll passes through; details replaced below
  const std::array<const char*, 3> names = {"lh", "hl", "hh"};
  const std::array<const MatrixXd*, 3> source = {&analysis.lh, &analysis.hl, &analysis.hh};
  const std::array<MatrixXd*, 3> target = {&synthesis.lh, &synthesis.hl, &synthesis.hh};
  std::array<double, 3> band_time{};

  parallel_for(
      3,
      [&](std::size_t b) {
        BandRecovery& rec = out.bands[b];
        rec.name = names[b];
        rec.n = n_band;
        rec.m = opt.m_per_band;

        ThresholdResult thr = threshold_detail(*source[b], opt.keep_fraction);
        rec.nnz_target = thr.kept;
        rec.realized_rate = thr.rate;
        if (thr.kept == 0) {
          rec.skipped = true;
          rec.nmse_db = std::numeric_limits<double>::quiet_NaN();
          target[b]->setZero();
          return;
        }
        Eigen::Map<const VectorXd> want(thr.band.data(), n_band);

        const MatrixXcd phi =
            gen_matrix(opt.m_per_band, n_band, mix_seed(seed, 2 * static_cast<uint64_t>(b)), true);
        const VectorXcd clean = phi * want.cast<Complex>();
        const NoisyObservation obs =
            add_noise(clean, opt.snr_db, mix_seed(seed, 2 * static_cast<uint64_t>(b) + 1), true);

        RecoverOptions ropt;
        ropt.p_init = opt.keep_fraction / 2.0;
        ropt.passes = opt.passes;
        ropt.tail_prob = opt.tail_prob;
        ropt.max_bootstrap_iter = opt.max_bootstrap_iter;

        const auto t0 = std::chrono::steady_clock::now();
        const RecoveryResult res = recover(phi, obs.y, ropt);
        band_time[b] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const VectorXd got = res.x_ammse.real();
        *target[b] = Eigen::Map<const MatrixXd>(got.data(), source[b]->rows(), source[b]->cols());
        rec.nmse_db = 10.0 * std::log10((got - want).squaredNorm() / want.squaredNorm());
        rec.p_hat = res.p_hat;
        rec.sigma2_hat = res.sigma2_hat;
        rec.iterations = res.iterations;
      },
      opt.threads);

  out.recover_time_s = band_time[0] + band_time[1] + band_time[2];
  out.reconstructed = haar_inverse(synthesis);
  out.image_nmse_db =
      10.0 * std::log10((out.reconstructed - image).squaredNorm() / image.squaredNorm());
  return out;
}

}  // namespace ngbmp
