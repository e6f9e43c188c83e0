// End-to-end acceptance checks for the recovery library. Each criterion
// prints exactly one [PASS]/[FAIL] line with its elapsed time and the
// measured numbers it was judged on; the process exit code is the number of
// failed criteria. Run with --only 3,7 to restrict to a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ngbmp/baselines.hpp"
#include "ngbmp/bench.hpp"
#include "ngbmp/datagen.hpp"
#include "ngbmp/estimator.hpp"
#include "ngbmp/haar.hpp"
#include "ngbmp/model.hpp"
#include "ngbmp/recursive.hpp"
#include "ngbmp/rng.hpp"
#include "ngbmp/search.hpp"
#include "ngbmp/types.hpp"

using namespace ngbmp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Signal draw that retries until at least one entry is active, so NMSE
// references are never zero.
SparseSignal draw_nonempty(int n, double p, const SignalModel& model, uint64_t seed) {
  for (uint64_t attempt = 0; attempt < 100; ++attempt) {
    SparseSignal x = gen_signal(n, p, model, mix_seed(seed, attempt));
    if (!x.support.empty()) return x;
  }
  throw DomainError("draw_nonempty: no active entry in 100 attempts");
}

// blue_estimate orders coefficients by sorted index; the recursive state
// keeps commit order.
VectorXcd to_commit_order(const VectorXcd& sorted_coef, const SupportSet& s,
                          const std::vector<int>& order) {
  VectorXcd out(sorted_coef.size());
  const auto& idx = s.indices();
  for (size_t k = 0; k < order.size(); ++k) {
    const auto it = std::lower_bound(idx.begin(), idx.end(), order[k]);
    out(static_cast<int>(k)) = sorted_coef(static_cast<int>(it - idx.begin()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. The order-recursive engine reproduces the direct metric for every
//    candidate at every level of deep chains, and its running coefficients
//    reproduce the direct least-squares fit.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const int instances = 1000, m = 32, n = 64, depth = 16;
  const double tol = 1e-8;
  SignalModel model;  // gaussian amplitudes, mu 10, var 2
  double worst_metric = 0.0, worst_coef = 0.0;
  long metrics_checked = 0;

  for (int t = 0; t < instances; ++t) {
    const uint64_t base = mix_seed(0xAC1, static_cast<uint64_t>(t));
    const MatrixXcd phi = gen_matrix(m, n, mix_seed(base, 0));
    const SparseSignal x = draw_nonempty(n, 0.1, model, mix_seed(base, 1));
    const NoisyObservation obs = add_noise(phi * x.values, 15.0, mix_seed(base, 2));
    const ProblemInstance inst(phi, obs.y, obs.sigma2, 0.1);
    const PrecomputeCache cache = precompute(phi, obs.y);

    // Level 1: singleton metrics straight from the cache.
    int first = -1;
    double first_nu = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi1 = std::norm(cache.phi_h_y()(i)) / cache.col_energy()(i);
      const double fast = (xi1 - cache.y_energy()) / inst.sigma2 +
                          log_support_prior(1, inst.p, n);
      const double slow = metric_direct(inst, SupportSet({i}));
      worst_metric = std::max(worst_metric,
                              std::abs(fast - slow) / (std::abs(slow) + 1e-12));
      ++metrics_checked;
      if (first < 0 || fast > first_nu) {
        first = i;
        first_nu = fast;
      }
    }

    RecursiveState st(cache, first, depth);
    for (int level = 2; level <= depth; ++level) {
      int pick = -1;
      double pick_nu = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!st.viable(cache, i)) continue;
        const double fast = st.candidate_metric(cache, i, inst.sigma2, inst.p);
        const double slow = metric_direct(inst, st.support().with(i));
        worst_metric = std::max(worst_metric,
                                std::abs(fast - slow) / (std::abs(slow) + 1e-12));
        ++metrics_checked;
        if (pick < 0 || fast > pick_nu) {
          pick = i;
          pick_nu = fast;
        }
      }
      st.commit(cache, pick);
      const SupportSet s = st.support();
      const VectorXcd want = to_commit_order(blue_estimate(phi, obs.y, s), s, st.committed());
      const double rel = (VectorXcd(st.coefficients()) - want).norm() / (want.norm() + 1e-12);
      worst_coef = std::max(worst_coef, rel);
    }
  }

  const double dt = seconds_since(t0);
  Outcome out;
  out.pass = worst_metric <= tol && worst_coef <= tol && dt <= 60.0;
  out.detail = std::to_string(instances) + " instances, " +
               std::to_string(metrics_checked) + " metrics; worst metric rel " +
               fmt(worst_metric) + ", worst coef rel " + fmt(worst_coef) +
               ", budget 60s";
  return out;
}

// ---------------------------------------------------------------------------
// 2. On instances small enough to enumerate every support, the greedy MAP
//    support matches the enumerated argmax nearly always, and the mixture
//    estimate's NMSE sits within 1 dB of the enumerated mixture's NMSE.
Outcome criterion2() {
  const int trials = 200, m = 8, n = 12;
  const double p = 0.15, snr_db = 25.0;
  SignalModel model;
  int map_match = 0;
  std::vector<std::pair<VectorXcd, VectorXcd>> greedy_pairs, exact_pairs;

  for (int t = 0; t < trials; ++t) {
    const uint64_t base = mix_seed(0xAC2, static_cast<uint64_t>(t));
    const MatrixXcd phi = gen_matrix(m, n, mix_seed(base, 0));
    const SparseSignal x = draw_nonempty(n, p, model, mix_seed(base, 1));
    const NoisyObservation obs = add_noise(phi * x.values, snr_db, mix_seed(base, 2));
    const ProblemInstance inst(phi, obs.y, obs.sigma2, p);

    RecoverOptions opt;
    opt.p = p;
    opt.sigma2 = obs.sigma2;
    const RecoveryResult r = recover(phi, obs.y, opt);
    if (r.s_map == exhaustive_map(inst, n)) ++map_match;
    greedy_pairs.emplace_back(x.values, r.x_ammse);
    exact_pairs.emplace_back(x.values, exhaustive_mmse(inst, n));
  }

  const double greedy_nmse = nmse_db(greedy_pairs);
  const double exact_nmse = nmse_db(exact_pairs);
  const double rate = 100.0 * map_match / trials;

  Outcome out;
  out.pass = map_match >= (trials * 85) / 100 &&
             std::abs(greedy_nmse - exact_nmse) <= 1.0;
  out.detail = "map match " + fmt(rate, "%.1f") + "% (need 85%), greedy " +
               fmt(greedy_nmse, "%.2f") + " dB vs enumerated " +
               fmt(exact_nmse, "%.2f") + " dB (gap limit 1 dB)";
  return out;
}

// ---------------------------------------------------------------------------
// 3. The selected-support sequence of the repeated search depends on neither
//    the noise variance nor the activity rate when both move together as
//    (sigma2, p) -> (7 sigma2, p/3). Exact equality required.
Outcome criterion3() {
  const int instances = 100, m = 32, n = 64;
  SignalModel model;
  int identical = 0;

  for (int t = 0; t < instances; ++t) {
    const uint64_t base = mix_seed(0xAC3, static_cast<uint64_t>(t));
    const MatrixXcd phi = gen_matrix(m, n, mix_seed(base, 0));
    const SparseSignal x = draw_nonempty(n, 0.06, model, mix_seed(base, 1));
    const NoisyObservation obs = add_noise(phi * x.values, 15.0, mix_seed(base, 2));
    const PrecomputeCache cache = precompute(phi, obs.y);

    const ProblemInstance a(phi, obs.y, obs.sigma2, 0.06);
    const ProblemInstance b(phi, obs.y, 7.0 * obs.sigma2, 0.02);
    SearchConfig cfg;
    cfg.max_support = 8;
    cfg.passes = 5;
    const DominantSet da = repeated_search(a, cache, cfg);
    const DominantSet db = repeated_search(b, cache, cfg);

    bool same = da.size() == db.size();
    for (int k = 0; same && k < da.size(); ++k)
      same = da.entries()[static_cast<size_t>(k)].support ==
             db.entries()[static_cast<size_t>(k)].support;
    if (same) ++identical;
  }

  Outcome out;
  out.pass = identical == instances;
  out.detail = std::to_string(identical) + "/" + std::to_string(instances) +
               " identical support sequences (zero tolerance)";
  return out;
}

// Shared sweep runner for criteria 4 and 5.
std::vector<ResultRow> run_sweep(const std::vector<double>& snr_grid, int trials,
                                 uint64_t seed, SignalModel::Kind kind) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::snr_sweep;
  cfg.snr_grid = snr_grid;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.signal.kind = kind;
  return run_experiment(cfg);
}

double row_nmse(const std::vector<ResultRow>& rows, const std::string& method,
                double snr_db) {
  for (const ResultRow& r : rows)
    if (r.method == method && r.snr_db == snr_db) return r.nmse_db;
  throw DomainError("row_nmse: missing row");
}

// ---------------------------------------------------------------------------
// 4. Benchmark-scale sweep: error is nonincreasing in SNR (1 dB jitter
//    allowed), reaches -20 dB at SNR 20, and stays at least 2 dB ahead of
//    matching pursuit (given the true sparsity) from 10 dB up.
Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> grid = {0.0, 10.0, 20.0, 30.0};
  const std::vector<ResultRow> rows =
      run_sweep(grid, 100, 0xAC4, SignalModel::Kind::gaussian_iid);

  std::string curve;
  bool monotone = true, beats_omp = true;
  double prev = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double g = row_nmse(rows, "ngbmp", grid[i]);
    const double o = row_nmse(rows, "omp", grid[i]);
    if (i > 0 && g > prev + 1.0) monotone = false;
    if (grid[i] >= 10.0 && g > o - 2.0) beats_omp = false;
    prev = g;
    curve += (i ? " " : "") + fmt(grid[i], "%.0f") + ":" + fmt(g, "%.1f") + "/" +
             fmt(o, "%.1f");
  }
  const double at20 = row_nmse(rows, "ngbmp", 20.0);
  const double dt = seconds_since(t0);

  Outcome out;
  out.pass = monotone && at20 <= -20.0 && beats_omp && dt <= 1800.0;
  out.detail = "snr:ours/omp dB " + curve + "; monotone " +
               (monotone ? "yes" : "NO") + ", -20 dB at 20 " +
               (at20 <= -20.0 ? "yes" : "NO") + ", 2 dB ahead of omp " +
               (beats_omp ? "yes" : "NO") + ", budget 1800s";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Absolute error anchors at SNR 20 with bootstrapped hyperparameters:
//    gaussian amplitudes -31.1 +/- 3 dB, per-index uniform amplitudes
//    -30 +/- 3 dB, 200 trials each. If an anchor is missed at 20 dB the
//    criterion reports the achieved value and the lowest scanned SNR where
//    the anchor level is reached instead.
Outcome criterion5() {
  struct Anchor {
    const char* name;
    SignalModel::Kind kind;
    double center;
    uint64_t seed;
  };
  const std::vector<Anchor> anchors = {
      {"gaussian", SignalModel::Kind::gaussian_iid, -31.1, 0xAC51},
      {"uniform", SignalModel::Kind::uniform_noniid, -30.0, 0xAC52},
  };
  const double half_width = 3.0;
  const std::vector<double> scan = {22.0, 24.0, 26.0, 28.0, 30.0};

  Outcome out;
  out.pass = true;
  for (const Anchor& a : anchors) {
    const std::vector<ResultRow> rows = run_sweep({20.0}, 200, a.seed, a.kind);
    const double got = row_nmse(rows, "ngbmp", 20.0);
    const double hi = a.center + half_width;
    std::string part = std::string(a.name) + " " + fmt(got, "%.2f") + " dB (band " +
                       fmt(a.center - half_width, "%.1f") + ".." + fmt(hi, "%.1f") + ")";
    if (std::abs(got - a.center) <= half_width) {
      part += " anchor met at 20 dB";
    } else {
      // Qualified path: find the first scanned SNR reaching the anchor level.
      double met_at = std::numeric_limits<double>::quiet_NaN();
      for (double snr : scan) {
        const std::vector<ResultRow> probe = run_sweep({snr}, 200, a.seed, a.kind);
        if (row_nmse(probe, "ngbmp", snr) <= hi) {
          met_at = snr;
          break;
        }
      }
      if (std::isnan(met_at)) {
        out.pass = false;
        part += " anchor NOT met up to 30 dB";
      } else {
        part += " anchor level reached at " + fmt(met_at, "%.0f") + " dB (qualified)";
      }
    }
    out.detail += (out.detail.empty() ? "" : "; ") + part;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 6. Bootstrapped hyperparameters land within a factor of two of the truth
//    in at least 90% of trials, and the bootstrap settles in few rounds.
Outcome criterion6() {
  const int trials = 200, m = 256, n = 1024;
  const double p = 0.01, snr_db = 20.0;
  SignalModel model;
  int joint_ok = 0, p_ok = 0, s2_ok = 0;
  std::vector<int> iters;

  for (int t = 0; t < trials; ++t) {
    const uint64_t base = mix_seed(0xAC6, static_cast<uint64_t>(t));
    const MatrixXcd phi = gen_matrix(m, n, mix_seed(base, 0));
    const SparseSignal x = draw_nonempty(n, p, model, mix_seed(base, 1));
    const NoisyObservation obs = add_noise(phi * x.values, snr_db, mix_seed(base, 2));
    const RecoveryResult r = recover(phi, obs.y, {});
    const bool pf = r.p_hat >= 0.5 * p && r.p_hat <= 2.0 * p;
    const bool sf = r.sigma2_hat >= 0.5 * obs.sigma2 && r.sigma2_hat <= 2.0 * obs.sigma2;
    p_ok += pf;
    s2_ok += sf;
    joint_ok += pf && sf;
    iters.push_back(r.iterations);
  }

  std::sort(iters.begin(), iters.end());
  const double median_iters =
      (iters[trials / 2 - 1] + iters[trials / 2]) / 2.0;

  Outcome out;
  out.pass = joint_ok >= (trials * 90) / 100 && median_iters <= 5.0;
  out.detail = "factor-2 joint " + fmt(100.0 * joint_ok / trials, "%.1f") +
               "% (rate " + fmt(100.0 * p_ok / trials, "%.1f") + "%, variance " +
               fmt(100.0 * s2_ok / trials, "%.1f") +
               "%; need 90%), median rounds " + fmt(median_iters, "%.1f") +
               " (limit 5)";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Doubling the column count at fixed depth and measurement count roughly
//    doubles the recovery wall time (linear-in-N work per level).
Outcome criterion7() {
  const int m = 128, depth = 10, warmup = 3, timed = 40;
  SignalModel model;
  double mean_time[2] = {0.0, 0.0};
  const int sizes[2] = {512, 1024};

  for (int which = 0; which < 2; ++which) {
    const int n = sizes[which];
    double total = 0.0;
    for (int t = 0; t < warmup + timed; ++t) {
      const uint64_t base =
          mix_seed(0xAC7, static_cast<uint64_t>(n * 1000 + t));
      const MatrixXcd phi = gen_matrix(m, n, mix_seed(base, 0));
      const SparseSignal x = draw_nonempty(n, 8.0 / n, model, mix_seed(base, 1));
      const NoisyObservation obs = add_noise(phi * x.values, 20.0, mix_seed(base, 2));
      RecoverOptions opt;
      opt.p = 8.0 / n;
      opt.sigma2 = obs.sigma2;
      opt.max_support = depth;
      opt.passes = 1;
      const auto t0 = std::chrono::steady_clock::now();
      const RecoveryResult r = recover(phi, obs.y, opt);
      const double dt = seconds_since(t0);
      if (r.s_map.empty()) throw DomainError("criterion7: empty recovery");
      if (t >= warmup) total += dt;
    }
    mean_time[which] = total / timed;
  }

  const double ratio = mean_time[1] / mean_time[0];
  Outcome out;
  out.pass = ratio >= 1.5 && ratio <= 3.0;
  out.detail = "mean recover() " + fmt(1e3 * mean_time[0], "%.2f") + " ms at N=512, " +
               fmt(1e3 * mean_time[1], "%.2f") + " ms at N=1024, ratio " +
               fmt(ratio, "%.2f") + " (band 1.5..3.0)";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Image pipeline: the transform round-trips losslessly and preserves
//    energy; compressed measurement of the synthetic test image at a quarter
//    of the band length recovers it to -15 dB across 5 seeds.
Outcome criterion8() {
  // Transform identities on a deterministic random image.
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Eigen::MatrixXd img(64, 64);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) img(i, j) = u(rng);
  const HaarBands b = haar_forward(img);
  const double round_trip = (haar_inverse(b) - img).cwiseAbs().maxCoeff();
  const double band_energy = b.ll.squaredNorm() + b.lh.squaredNorm() +
                             b.hl.squaredNorm() + b.hh.squaredNorm();
  const double energy_rel =
      std::abs(band_energy - img.squaredNorm()) / img.squaredNorm();

  // End-to-end multiscale recovery of the built-in piecewise-constant image.
  const Eigen::MatrixXd test = make_test_image(32);
  MultiscaleOptions opt;
  opt.m_per_band = 64;  // quarter of the 16x16 band length
  opt.snr_db = 25.0;
  double ratio_sum = 0.0;
  std::string per_seed;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const MultiscaleResult res = multiscale_recover(test, opt, seed);
    ratio_sum += std::pow(10.0, res.image_nmse_db / 10.0);
    per_seed += (seed > 1 ? "," : "") + fmt(res.image_nmse_db, "%.1f");
  }
  const double agg = 10.0 * std::log10(ratio_sum / 5.0);

  Outcome out;
  out.pass = round_trip <= 1e-12 && energy_rel <= 1e-10 && agg <= -15.0;
  out.detail = "round trip " + fmt(round_trip) + " (limit 1e-12), energy rel " +
               fmt(energy_rel) + " (limit 1e-10), image error " + fmt(agg, "%.2f") +
               " dB over seeds [" + per_seed + "] (limit -15)";
  return out;
}

// ---------------------------------------------------------------------------
// 9. Reruns with the same master seed produce byte-identical CSV output.
Outcome criterion9() {
  const auto csv_of = [](const ExperimentConfig& cfg) {
    std::ostringstream s;
    write_csv(run_experiment(cfg), s);
    return s.str();
  };

  ExperimentConfig sweep;
  sweep.kind = ExperimentKind::snr_sweep;
  sweep.m = 32;
  sweep.n = 64;
  sweep.p = 0.05;
  sweep.snr_grid = {10.0, 20.0};
  sweep.trials = 3;
  sweep.seed = 97;
  const bool sweep_same = csv_of(sweep) == csv_of(sweep);

  ExperimentConfig image;
  image.kind = ExperimentKind::image;
  image.trials = 2;
  image.snr_db = 25.0;
  image.seed = 5;
  const bool image_same = csv_of(image) == csv_of(image);

  Outcome out;
  out.pass = sweep_same && image_same;
  out.detail = std::string("sweep rerun ") + (sweep_same ? "identical" : "DIFFERS") +
               ", image rerun " + (image_same ? "identical" : "DIFFERS");
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.push_back(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--only 1,2,...]\n", argv[0]);
      return 64;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "recursive metrics and coefficients match direct evaluation", criterion1},
      {2, "greedy search tracks the enumerated posterior", criterion2},
      {3, "support selection ignores matched reweighting", criterion3},
      {4, "benchmark sweep trend and matching-pursuit margin", criterion4},
      {5, "absolute error anchors at SNR 20", criterion5},
      {6, "bootstrapped hyperparameters land near the truth", criterion6},
      {7, "recovery time scales linearly in the column count", criterion7},
      {8, "image transform identities and multiscale recovery", criterion8},
      {9, "seeded reruns are byte-identical", criterion9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    std::printf("[%s] %d. %s (%.1fs) %s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.title, dt, out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
