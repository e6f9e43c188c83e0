#ifndef NGBMP_BENCH_HPP
#define NGBMP_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ngbmp/datagen.hpp"

namespace ngbmp {

enum class ExperimentKind {
  snr_sweep,         // NMSE vs SNR at fixed sparsity rate
  p_sweep,           // NMSE vs sparsity rate at fixed SNR
  hyper_robustness,  // sensitivity of the bootstrap to its starting rate
  image,             // multiscale image recovery
};

// Everything a benchmark run needs. Parsed from a JSON document where each
// field maps to a key of the same name; the CLI can override any field
// afterwards.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::snr_sweep;
  int m = 256;
  int n = 1024;
  double p = 0.005;              // activity rate for snr_sweep / hyper_robustness
  std::vector<double> p_grid;    // p_sweep grid; empty picks the default grid
  double snr_db = 20.0;          // SNR for p_sweep / hyper_robustness / image
  std::vector<double> snr_grid;  // snr_sweep grid; empty picks the default grid
  int trials = 100;
  int passes = 5;                // repeated-search passes D
  double tail_prob = 1e-3;
  double p_init = 0.003;         // bootstrap starting rate
  std::uint64_t seed = 1;
  SignalModel signal;
  std::string output;            // CSV path; empty means the caller decides
  int threads = 1;               // trial-level parallelism; 0 = hardware count
  bool timing = false;           // write measured times; off keeps CSVs seed-stable
  std::string image_input;       // PGM path; empty uses the built-in test image
  std::string image_output;      // optional reconstruction dump (first trial)
  int m_per_band = 0;            // image experiment; 0 means band length / 4
  double keep_fraction = 0.05;   // image experiment threshold level

  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

// Fills in grid defaults: snr {0,10,20,30}, p {0.002,0.005,0.01,0.02,0.05}.
ExperimentConfig normalized(ExperimentConfig cfg);

// One CSV row: a (grid point, method) aggregate over all trials.
struct ResultRow {
  std::string experiment;
  std::string method;
  int m = 0;
  int n = 0;
  double p = 0.0;
  double snr_db = 0.0;
  int trials = 0;
  double nmse_db = 0.0;
  double mean_time_s = 0.0;         // as written: zero unless timing is enabled
  double measured_time_s = 0.0;     // always the real measurement; not in the CSV
  double support_exact_rate = 0.0;  // NaN where support identity is not meaningful
  double p_hat_mean = 0.0;          // NaN for methods without a rate estimate
  double sigma2_hat_mean = 0.0;     // NaN for methods without a noise estimate
  std::uint64_t seed = 0;
};

// Parses a JSON config document (text or file). Unknown keys are rejected
// by name. The "snr_db" value and "snr_grid" entries accept the string
// "inf" for noiseless runs.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

// Runs every grid point of the experiment and returns the rows in
// deterministic order (grid order, then method). Results depend only on
// the config, never on thread scheduling.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Fixed, versioned CSV schema.
std::string csv_header();
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// Convenience: run and write to cfg.output (or stdout when empty).
// Returns the rows.
std::vector<ResultRow> run_and_write(const ExperimentConfig& cfg);

// Piecewise-constant grayscale test image (values in [0, 255]) with one
// block-aligned and one misaligned rectangle, so the detail bands are
// sparse but not empty. Side must be even and at least 16.
Eigen::MatrixXd make_test_image(int side);

}  // namespace ngbmp

#endif  // NGBMP_BENCH_HPP
