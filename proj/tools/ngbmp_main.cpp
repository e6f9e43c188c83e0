// Command-line front end: seeded benchmark sweeps, multiscale image
// recovery, and one-off recovery of a problem instance from a JSON file.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ngbmp/bench.hpp"
#include "ngbmp/errors.hpp"
#include "ngbmp/estimator.hpp"

namespace {

using ngbmp::ConfigError;
using ngbmp::ExperimentConfig;
using ngbmp::ExperimentKind;
using ngbmp::SignalModel;

double parse_snr(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("snr value must be a number or \"inf\", got '" + text + "'");
  }
}

// Raw storage for every overridable flag. One instance is shared by all
// subcommands; only the parsed subcommand reads it back.
struct FlagValues {
  std::string config_path;
  int m = 0, n = 0, trials = 0, passes = 0, threads = 0, m_per_band = 0;
  double p = 0, tail_prob = 0, p_init = 0, keep_fraction = 0;
  std::string snr_db;  // string so "inf" works
  std::vector<double> p_grid;
  std::vector<std::string> snr_grid;
  std::uint64_t seed = 0;
  std::string output, image_input, image_output;
  bool timing = false;
  std::string signal_kind;
  double mu = 0, var = 0;
  std::vector<double> mu_range, var_range, amplitudes;
};

void add_common_flags(CLI::App* cmd, FlagValues& v) {
  cmd->add_option("--config", v.config_path, "JSON config file; flags override its values");
  cmd->add_option("--M", v.m, "measurement count");
  cmd->add_option("--N", v.n, "signal length");
  cmd->add_option("--p", v.p, "activity rate");
  cmd->add_option("--p_grid", v.p_grid, "activity-rate grid");
  cmd->add_option("--snr_db", v.snr_db, "SNR in dB, or \"inf\"");
  cmd->add_option("--snr_grid", v.snr_grid, "SNR grid in dB (entries may be \"inf\")");
  cmd->add_option("--trials", v.trials, "trials per grid point");
  cmd->add_option("--D", v.passes, "repeated-search passes");
  cmd->add_option("--tail_prob", v.tail_prob, "tail mass behind the chain depth");
  cmd->add_option("--p_init", v.p_init, "bootstrap starting rate");
  cmd->add_option("--seed", v.seed, "master seed");
  cmd->add_option("--output", v.output, "CSV output path (default: stdout)");
  cmd->add_option("--threads", v.threads, "worker threads (0 = hardware count)");
  cmd->add_flag("--timing", v.timing, "write measured wall times into the CSV");
  cmd->add_option("--signal_kind", v.signal_kind,
                  "gaussian_iid | uniform_noniid | custom_amplitudes");
  cmd->add_option("--signal_mu", v.mu, "active-amplitude mean (gaussian_iid)");
  cmd->add_option("--signal_var", v.var, "active-amplitude variance (gaussian_iid)");
  cmd->add_option("--signal_mu_range", v.mu_range, "per-index mean range (uniform_noniid)")
      ->expected(2);
  cmd->add_option("--signal_var_range", v.var_range, "per-index variance range (uniform_noniid)")
      ->expected(2);
  cmd->add_option("--signal_amplitudes", v.amplitudes, "amplitude table (custom_amplitudes)");
  cmd->add_option("--image_input", v.image_input, "input PGM (default: built-in test image)");
  cmd->add_option("--image_output", v.image_output, "write the first reconstruction as PGM");
  cmd->add_option("--M_per_band", v.m_per_band, "measurements per detail band");
  cmd->add_option("--keep_fraction", v.keep_fraction, "detail threshold level");
}

// File first, then every flag the user actually passed, then the kind the
// subcommand dictates.
ExperimentConfig build_config(const CLI::App& cmd, const FlagValues& v, ExperimentKind kind) {
  ExperimentConfig cfg;
  if (cmd.count("--config")) cfg = ngbmp::parse_config_file(v.config_path);
  if (cmd.count("--M")) cfg.m = v.m;
  if (cmd.count("--N")) cfg.n = v.n;
  if (cmd.count("--p")) cfg.p = v.p;
  if (cmd.count("--p_grid")) cfg.p_grid = v.p_grid;
  if (cmd.count("--snr_db")) cfg.snr_db = parse_snr(v.snr_db);
  if (cmd.count("--snr_grid")) {
    cfg.snr_grid.clear();
    for (const std::string& s : v.snr_grid) cfg.snr_grid.push_back(parse_snr(s));
  }
  if (cmd.count("--trials")) cfg.trials = v.trials;
  if (cmd.count("--D")) cfg.passes = v.passes;
  if (cmd.count("--tail_prob")) cfg.tail_prob = v.tail_prob;
  if (cmd.count("--p_init")) cfg.p_init = v.p_init;
  if (cmd.count("--seed")) cfg.seed = v.seed;
  if (cmd.count("--output")) cfg.output = v.output;
  if (cmd.count("--threads")) cfg.threads = v.threads;
  if (cmd.count("--timing")) cfg.timing = v.timing;
  if (cmd.count("--signal_kind")) {
    if (v.signal_kind == "gaussian_iid") {
      cfg.signal.kind = SignalModel::Kind::gaussian_iid;
    } else if (v.signal_kind == "uniform_noniid") {
      cfg.signal.kind = SignalModel::Kind::uniform_noniid;
    } else if (v.signal_kind == "custom_amplitudes") {
      cfg.signal.kind = SignalModel::Kind::custom_amplitudes;
    } else {
      throw ConfigError("unknown signal kind: " + v.signal_kind);
    }
  }
  if (cmd.count("--signal_mu")) cfg.signal.mu = v.mu;
  if (cmd.count("--signal_var")) cfg.signal.var = v.var;
  if (cmd.count("--signal_mu_range")) {
    cfg.signal.mu_lo = v.mu_range[0];
    cfg.signal.mu_hi = v.mu_range[1];
  }
  if (cmd.count("--signal_var_range")) {
    cfg.signal.var_lo = v.var_range[0];
    cfg.signal.var_hi = v.var_range[1];
  }
  if (cmd.count("--signal_amplitudes")) cfg.signal.amplitudes = v.amplitudes;
  if (cmd.count("--image_input")) cfg.image_input = v.image_input;
  if (cmd.count("--image_output")) cfg.image_output = v.image_output;
  if (cmd.count("--M_per_band")) cfg.m_per_band = v.m_per_band;
  if (cmd.count("--keep_fraction")) cfg.keep_fraction = v.keep_fraction;
  cfg.kind = kind;
  return cfg;
}

// --- one-off recovery from a problem file ------------------------------

ngbmp::VectorXcd parse_cvector(const nlohmann::json& doc, const std::string& re_key,
                               const std::string& im_key) {
  if (!doc.contains(re_key)) throw ConfigError("problem file: missing " + re_key);
  const std::vector<double> re = doc.at(re_key).get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (doc.contains(im_key)) {
    im = doc.at(im_key).get<std::vector<double>>();
    if (im.size() != re.size()) {
      throw ConfigError("problem file: " + im_key + " length differs from " + re_key);
    }
  }
  ngbmp::VectorXcd v(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) v(i) = ngbmp::Complex(re[i], im[i]);
  return v;
}

ngbmp::MatrixXcd parse_cmatrix(const nlohmann::json& doc) {
  if (!doc.contains("phi_re")) throw ConfigError("problem file: missing phi_re");
  const auto& re = doc.at("phi_re");
  if (!re.is_array() || re.empty() || !re[0].is_array()) {
    throw ConfigError("problem file: phi_re must be an array of rows");
  }
  const std::size_t rows = re.size();
  const std::size_t cols = re[0].size();
  const bool has_im = doc.contains("phi_im");
  ngbmp::MatrixXcd phi(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::vector<double> row = re[i].get<std::vector<double>>();
    if (row.size() != cols) throw ConfigError("problem file: ragged phi_re rows");
    std::vector<double> imrow(cols, 0.0);
    if (has_im) {
      imrow = doc.at("phi_im")[i].get<std::vector<double>>();
      if (imrow.size() != cols) throw ConfigError("problem file: ragged phi_im rows");
    }
    for (std::size_t j = 0; j < cols; ++j) phi(i, j) = ngbmp::Complex(row[j], imrow[j]);
  }
  return phi;
}

struct RecoverFlags {
  std::string input, output;
  double p = 0, sigma2 = 0, p_init = 0, tail_prob = 0;
  int passes = 0, max_support = 0;
};

int run_single_recover(const CLI::App& cmd, const RecoverFlags& f) {
  std::ifstream in(f.input);
  if (!in) throw ConfigError("cannot open problem file: " + f.input);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("problem file is not valid JSON: ") + e.what());
  }

  const ngbmp::MatrixXcd phi = parse_cmatrix(doc);
  const ngbmp::VectorXcd y = parse_cvector(doc, "y_re", "y_im");
  if (y.size() != phi.rows()) throw ConfigError("problem file: y length differs from phi rows");

  ngbmp::RecoverOptions opt;
  if (cmd.count("--p")) opt.p = f.p;
  if (cmd.count("--sigma2")) opt.sigma2 = f.sigma2;
  if (cmd.count("--p_init")) opt.p_init = f.p_init;
  if (cmd.count("--D")) opt.passes = f.passes;
  if (cmd.count("--tail_prob")) opt.tail_prob = f.tail_prob;
  if (cmd.count("--max_support")) opt.max_support = f.max_support;

  const ngbmp::RecoveryResult res = ngbmp::recover(phi, y, opt);

  nlohmann::json out;
  out["s_map"] = res.s_map.indices();
  out["p_hat"] = res.p_hat;
  out["sigma2_hat"] = res.sigma2_hat;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  out["dropped_supports"] = res.dropped_supports;
  auto dump_vec = [&](const char* key, const ngbmp::VectorXcd& v, bool imag) {
    std::vector<double> parts(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) parts[i] = imag ? v(i).imag() : v(i).real();
    out[key] = parts;
  };
  dump_vec("x_ammse_re", res.x_ammse, false);
  dump_vec("x_ammse_im", res.x_ammse, true);
  dump_vec("x_map_re", res.x_map, false);
  dump_vec("x_map_im", res.x_map, true);

  const std::string text = out.dump(2);
  if (f.output.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream os(f.output, std::ios::trunc);
    if (!os) throw ngbmp::IoError("cannot open output file: " + f.output);
    os << text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-signal recovery benchmarks"};
  app.require_subcommand(1);

  FlagValues v;

  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo recovery benchmarks");
  bench->require_subcommand(1);
  CLI::App* bench_snr = bench->add_subcommand("snr", "NMSE vs SNR sweep");
  CLI::App* bench_p = bench->add_subcommand("p", "NMSE vs activity-rate sweep");
  CLI::App* bench_robust =
      bench->add_subcommand("robust", "bootstrap sensitivity to its starting rate");
  CLI::App* image = app.add_subcommand("image", "image experiments");
  image->require_subcommand(1);
  CLI::App* image_recover = image->add_subcommand("recover", "multiscale recovery of an image");
  add_common_flags(bench_snr, v);
  add_common_flags(bench_p, v);
  add_common_flags(bench_robust, v);
  add_common_flags(image_recover, v);

  RecoverFlags rf;
  CLI::App* single = app.add_subcommand("recover", "recover one instance from a JSON problem file");
  single->add_option("--input", rf.input, "problem JSON with phi_re/phi_im and y_re/y_im")
      ->required();
  single->add_option("--output", rf.output, "result JSON path (default: stdout)");
  single->add_option("--p", rf.p, "known activity rate");
  single->add_option("--sigma2", rf.sigma2, "known noise variance");
  single->add_option("--p_init", rf.p_init, "bootstrap starting rate");
  single->add_option("--D", rf.passes, "repeated-search passes");
  single->add_option("--tail_prob", rf.tail_prob, "tail mass behind the chain depth");
  single->add_option("--max_support", rf.max_support, "chain depth override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bench_snr->parsed()) {
      ngbmp::run_and_write(build_config(*bench_snr, v, ExperimentKind::snr_sweep));
    } else if (bench_p->parsed()) {
      ngbmp::run_and_write(build_config(*bench_p, v, ExperimentKind::p_sweep));
    } else if (bench_robust->parsed()) {
      ngbmp::run_and_write(build_config(*bench_robust, v, ExperimentKind::hyper_robustness));
    } else if (image_recover->parsed()) {
      ngbmp::run_and_write(build_config(*image_recover, v, ExperimentKind::image));
    } else if (single->parsed()) {
      return run_single_recover(*single, rf);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ngbmp::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
