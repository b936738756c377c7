// tabdrw — command-line front end for the TAB-DRW tabular watermarking
// library: embed / detect / attack / sweep / bound / calibrate / fidelity /
// synth / trace. All reports are JSON (stdout or --report file); grids are
// additionally emitted as CSV. Exit codes signal operational errors only —
// the detection verdict lives in the report.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tabdrw/tabdrw.hpp"

using nlohmann::json;
using namespace tabdrw;

namespace {

std::uint64_t parse_key(const std::string& s) {
  try {
    return std::stoull(s, nullptr, 0);  // base 0: decimal or 0x-hex
  } catch (const std::exception&) {
    throw CLI::ValidationError("--key", "expected a decimal or 0x-hex 64-bit integer");
  }
}

Table load_table(const std::string& path, const std::string& schema_path) {
  if (schema_path.empty()) return read_csv(path);
  return read_csv(path, read_schema_file(schema_path));
}

std::vector<int> resolve_columns(const Table& t, const std::string& spec) {
  std::vector<int> cols;
  if (spec.empty()) return cols;
  std::stringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ',')) cols.push_back(t.column_index(name));
  return cols;
}

void emit_report(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
  }
}

GaussianSpec::Cov parse_cov(const std::string& s, double& rho) {
  if (s == "identity") return GaussianSpec::Cov::identity;
  if (s.rfind("ar1:", 0) == 0) {
    rho = std::stod(s.substr(4));
    return GaussianSpec::Cov::ar1;
  }
  if (s == "ar1") return GaussianSpec::Cov::ar1;
  throw CLI::ValidationError("--cov", "expected 'identity', 'ar1' or 'ar1:<rho>'");
}

struct EmbedFlags {
  std::string key_str;
  double gamma = 0.5, delta = 0.5;
  std::string columns;
  bool privacy = false;
  bool no_postprocess = false;
  std::string bit_mode = "gray2";

  void attach(CLI::App* cmd, bool key_required = true) {
    auto* k = cmd->add_option("--key", key_str, "watermark key (decimal or 0x-hex)");
    if (key_required) k->required();
    cmd->add_option("--gamma", gamma, "soft quantile cap in [0,1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--delta", delta, "imaginary shrink factor in [-1,1]")
        ->check(CLI::Range(-1.0, 1.0));
    cmd->add_option("--columns", columns, "comma-separated watermark column names (default: all numeric)");
    cmd->add_flag("--privacy", privacy, "privacy-enhanced variant (keyed column permutation)");
    cmd->add_flag("--no-postprocess", no_postprocess, "skip rounding/clipping");
    cmd->add_option("--bit-mode", bit_mode, "gray2 (default) or gray1")
        ->check(CLI::IsMember({"gray2", "gray1"}));
  }

  EmbedConfig config(const Table& t) const {
    EmbedConfig cfg;
    cfg.key = parse_key(key_str);
    cfg.gamma = gamma;
    cfg.delta = delta;
    cfg.watermark_columns = resolve_columns(t, columns);
    cfg.privacy = privacy;
    cfg.postprocess = !no_postprocess;
    cfg.bit_mode = bit_mode == "gray1" ? BitMode::gray1 : BitMode::gray2;
    return cfg;
  }
};

json null_to_json(const NullStats& null) {
  json j{{"mu_nwm", null.mu_nwm},
         {"sigma_nwm", null.sigma_nwm},
         {"source", null.source == NullStats::Source::theoretical ? "theoretical" : "monte_carlo"}};
  for (const auto& [alpha, q] : null.critical_values)
    j["critical_values"][std::to_string(alpha)] = q;
  return j;
}

NullStats null_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  NullStats s;
  s.mu_nwm = j.at("mu_nwm");
  s.sigma_nwm = j.at("sigma_nwm");
  s.source = j.value("source", "monte_carlo") == "theoretical"
                 ? NullStats::Source::theoretical
                 : NullStats::Source::monte_carlo;
  if (j.contains("critical_values"))
    for (const auto& [k, v] : j["critical_values"].items())
      s.critical_values[std::stod(k)] = double(v);
  return s;
}

AttackKind parse_attack_kind(const std::string& s) {
  if (s == "row_del") return AttackKind::row_del;
  if (s == "col_del") return AttackKind::col_del;
  if (s == "cell_del") return AttackKind::cell_del;
  if (s == "g_noise") return AttackKind::g_noise;
  if (s == "c_noise") return AttackKind::c_noise;
  if (s == "a_noise") return AttackKind::a_noise;
  if (s == "truncation") return AttackKind::truncation;
  if (s == "quantization") return AttackKind::quantization;
  if (s == "resample") return AttackKind::resample;
  if (s == "shuffle") return AttackKind::shuffle;
  throw std::runtime_error("unknown attack kind: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TAB-DRW frequency-domain watermarking for mixed-type tabular data"};
  app.require_subcommand(1);

  // ---- synth -------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic Gaussian table as CSV");
  GaussianSpec gspec;
  std::string synth_cov = "identity", synth_out;
  synth->add_option("--rows", gspec.n_rows, "row count")->required();
  synth->add_option("--cols", gspec.p, "column count")->required();
  synth->add_option("--cov", synth_cov, "identity | ar1 | ar1:<rho>");
  synth->add_option("--seed", gspec.seed, "PRNG seed");
  synth->add_option("--out", synth_out, "output CSV path")->required();
  synth->callback([&] {
    gspec.cov = parse_cov(synth_cov, gspec.rho);
    write_csv(generate(gspec), synth_out);
  });

  // ---- embed -------------------------------------------------------------
  auto* emb = app.add_subcommand("embed", "embed a watermark into a CSV table");
  EmbedFlags emb_flags;
  std::string emb_in, emb_schema, emb_out, emb_report, emb_state_out;
  std::uint64_t emb_seed = 0;
  emb->add_option("--in", emb_in, "input CSV")->required()->check(CLI::ExistingFile);
  emb->add_option("--schema", emb_schema, "sidecar schema file")->check(CLI::ExistingFile);
  emb_flags.attach(emb);
  emb->add_option("--out", emb_out, "watermarked CSV path")->required();
  emb->add_option("--report", emb_report, "report JSON path (default: stdout)");
  emb->add_option("--state-out", emb_state_out, "write the fitted transform state (frozen re-detection)");
  emb->add_option("--seed", emb_seed, "recorded in the report");
  emb->callback([&] {
    Table t = load_table(emb_in, emb_schema);
    EmbedConfig cfg = emb_flags.config(t);
    EmbedResult res = embed(t, cfg);
    write_csv(res.table, emb_out);
    if (!emb_state_out.empty()) write_transform_state(res.state, emb_state_out);

    const int m = (res.state.p() - 1) / 2;
    std::vector<long> hist(m + 1, 0);
    double mean_s = 0.0;
    for (const auto& s : res.report.modified_sets) {
      ++hist[s.size()];
      mean_s += double(s.size());
    }
    mean_s /= double(std::max<std::size_t>(1, res.report.modified_sets.size()));
    json j{{"command", "embed"},
           {"seed", emb_seed},
           {"gamma", cfg.gamma},
           {"delta", cfg.delta},
           {"privacy", cfg.privacy},
           {"bit_mode", emb_flags.bit_mode},
           {"n_rows", t.rows()},
           {"p", res.state.p()},
           {"m", m},
           {"modified_set_size_histogram", hist},
           {"mean_modified_per_row", mean_s},
           {"rounded_cells", res.report.rounded_cells},
           {"rounding_magnitude_mean", res.report.rounding_magnitude_mean},
           {"clipping_ratio",
            double(res.report.clipped_cells) / double(std::max<std::size_t>(1, t.rows() * res.state.p()))},
           {"output", emb_out}};
    emit_report(j, emb_report);
  });

  // ---- detect ------------------------------------------------------------
  auto* det = app.add_subcommand("detect", "test a CSV table for a watermark");
  EmbedFlags det_flags;
  std::string det_in, det_schema, det_report, det_null = "theoretical", det_state;
  double det_threshold = 6.0;
  std::uint64_t det_seed = 0;
  det->add_option("--in", det_in, "input CSV")->required()->check(CLI::ExistingFile);
  det->add_option("--schema", det_schema, "sidecar schema file")->check(CLI::ExistingFile);
  det_flags.attach(det);
  det->add_option("--null", det_null, "'theoretical' or a calibration JSON file");
  det->add_option("--threshold", det_threshold, "decision threshold on Z (default 6)");
  det->add_option("--state", det_state, "frozen transform state file (idealized setting)")
      ->check(CLI::ExistingFile);
  det->add_option("--report", det_report, "report JSON path (default: stdout)");
  det->add_option("--seed", det_seed, "recorded in the report");
  det->callback([&] {
    Table t = load_table(det_in, det_schema);
    EmbedConfig cfg = det_flags.config(t);
    DetectOptions opt;
    TransformState frozen;
    if (!det_state.empty()) {
      frozen = read_transform_state(det_state);
      opt.frozen = &frozen;
    }
    const int p = opt.frozen ? opt.frozen->p() : int(resolve_watermark_columns(t, cfg).size());
    NullStats null = det_null == "theoretical" ? theoretical_null((p - 1) / 2)
                                               : null_from_json_file(det_null);
    DetectionReport rep = detect(t, cfg.key, cfg, null, det_threshold, opt);
    const double t_mean =
        std::accumulate(rep.t_counts.begin(), rep.t_counts.end(), 0.0) / double(rep.n_rows);
    json j{{"command", "detect"}, {"seed", det_seed},
           {"z", rep.z},           {"decision", rep.decision},
           {"n_rows", rep.n_rows}, {"m", rep.m},
           {"t_mean", t_mean},     {"threshold", rep.threshold},
           {"transform_mode", opt.frozen ? "frozen" : "refit"},
           {"null", null_to_json(null)}};
    emit_report(j, det_report);
  });

  // ---- attack ------------------------------------------------------------
  auto* atk = app.add_subcommand("attack", "apply a post-processing or adaptive attack");
  std::string atk_in, atk_schema, atk_out, atk_kind, atk_target, atk_reference, atk_attacker_key;
  AttackSpec aspec;
  int atk_n_keys = 10;
  double atk_gamma = 0.5, atk_delta = 0.5;
  atk->add_option("--in", atk_in, "input CSV")->required()->check(CLI::ExistingFile);
  atk->add_option("--schema", atk_schema, "sidecar schema file")->check(CLI::ExistingFile);
  atk->add_option("--kind", atk_kind,
                  "row_del|col_del|cell_del|g_noise|c_noise|a_noise|truncation|quantization|"
                  "resample|shuffle|adv_row_del|rewatermark")
      ->required();
  atk->add_option("--frac", aspec.frac, "fraction for row_del/cell_del/g_noise/c_noise/adv_row_del");
  atk->add_option("--count", aspec.count, "column count for col_del");
  atk->add_option("--sigma", aspec.sigma, "noise level for a_noise");
  atk->add_option("--bins", aspec.bins, "bin count for quantization");
  atk->add_option("--target", atk_target, "categorical target column for resample");
  atk->add_option("--attacker-key", atk_attacker_key, "attacker key for adv_row_del");
  atk->add_option("--n-keys", atk_n_keys, "rewatermark rounds");
  atk->add_option("--gamma", atk_gamma, "rewatermark gamma");
  atk->add_option("--delta", atk_delta, "rewatermark delta");
  atk->add_option("--reference", atk_reference, "reference CSV of unwatermarked rows")
      ->check(CLI::ExistingFile);
  atk->add_option("--seed", aspec.rng_seed, "attack PRNG seed");
  atk->add_option("--out", atk_out, "output CSV path")->required();
  atk->callback([&] {
    Table t = load_table(atk_in, atk_schema);
    Table attacked;
    if (atk_kind == "adv_row_del") {
      if (atk_attacker_key.empty()) throw std::runtime_error("adv_row_del needs --attacker-key");
      attacked = adaptive_row_deletion(t, parse_key(atk_attacker_key), aspec.frac, aspec.rng_seed);
    } else if (atk_kind == "rewatermark") {
      attacked = rewatermark_attack(t, atk_n_keys, atk_gamma, atk_delta, aspec.rng_seed);
    } else {
      aspec.kind = parse_attack_kind(atk_kind);
      aspec.target_col = atk_target;
      Table ref;
      ReplacementSource src;
      if (!atk_reference.empty()) {
        ref = load_table(atk_reference, atk_schema);
        src.reference = &ref;
      }
      attacked = apply_attack(t, aspec, src);
    }
    write_csv(attacked, atk_out);
  });

  // ---- sweep -------------------------------------------------------------
  auto* swp = app.add_subcommand("sweep", "attack x strength robustness grid");
  std::string swp_config, swp_out, swp_report;
  swp->add_option("--config", swp_config, "sweep config JSON")->required()->check(CLI::ExistingFile);
  swp->add_option("--out", swp_out, "grid CSV path (default: stdout)");
  swp->add_option("--report", swp_report, "grid JSON path");
  swp->callback([&] {
    std::ifstream in(swp_config);
    json cfg_j;
    in >> cfg_j;
    GaussianSpec gs;
    gs.n_rows = cfg_j.value("rows", 5000);
    gs.p = cfg_j.value("cols", 11);
    double rho = 0.4;
    gs.cov = parse_cov(cfg_j.value("cov", "identity"), rho);
    gs.rho = rho;
    const int trials = cfg_j.value("trials", 20);
    const std::uint64_t seed = cfg_j.value("seed", std::uint64_t(1));
    EmbedConfig ecfg;
    ecfg.gamma = cfg_j.value("gamma", 0.5);
    ecfg.delta = cfg_j.value("delta", 0.5);
    ecfg.key = parse_key(cfg_j.value("key", std::string("1")));
    ecfg.privacy = cfg_j.value("privacy", false);

    json grid = json::array();
    std::ostringstream csv;
    csv << "attack,strength,mean_z,std_z\n";
    json attacks = cfg_j.at("attacks");
    attacks.insert(attacks.begin(), json{{"kind", "none"}});
    for (const auto& a : attacks) {
      const std::string kind = a.at("kind");
      std::vector<double> zs;
      for (int trial = 0; trial < trials; ++trial) {
        Prng trial_rng = keyed_prng(seed, "sweep");
        const std::uint64_t tseed = trial_rng.derive(trial).next();
        gs.seed = tseed;
        Table t = generate(gs);
        Table wm = embed(t, ecfg).table;
        Table attacked;
        if (kind == "none") {
          attacked = wm;
        } else if (kind == "adv_row_del") {
          attacked = adaptive_row_deletion(wm, a.value("attacker_key", std::uint64_t(12345)),
                                           a.value("frac", 0.1), tseed + 1);
        } else if (kind == "rewatermark") {
          attacked = rewatermark_attack(wm, a.value("n_keys", 10), ecfg.gamma, ecfg.delta, tseed + 1);
        } else {
          AttackSpec sp;
          sp.kind = parse_attack_kind(kind);
          sp.frac = a.value("frac", 0.1);
          sp.count = a.value("count", 2);
          sp.sigma = a.value("sigma", 0.1);
          sp.bins = a.value("bins", 10);
          sp.target_col = a.value("target", std::string());
          sp.rng_seed = tseed + 1;
          GaussianSpec ref_spec = gs;
          ref_spec.seed = tseed + 2;
          Table ref = generate(ref_spec);
          ReplacementSource src{&ref};
          attacked = apply_attack(wm, sp, src);
        }
        const int p = int(resolve_watermark_columns(attacked, ecfg).size());
        zs.push_back(detect(attacked, ecfg.key, ecfg, theoretical_null((p - 1) / 2)).z);
      }
      double mean = std::accumulate(zs.begin(), zs.end(), 0.0) / double(zs.size());
      double var = 0.0;
      for (double z : zs) var += (z - mean) * (z - mean);
      const double sd = std::sqrt(var / double(zs.size()));
      const double strength = a.value("frac", a.value("sigma", a.value("n_keys", 0.0)));
      csv << kind << "," << strength << "," << mean << "," << sd << "\n";
      grid.push_back(json{{"attack", kind}, {"strength", strength}, {"mean_z", mean}, {"std_z", sd}});
    }
    if (swp_out.empty())
      std::cout << csv.str();
    else
      std::ofstream(swp_out) << csv.str();
    if (!swp_report.empty()) emit_report(json{{"command", "sweep"}, {"seed", seed}, {"grid", grid}}, swp_report);
  });

  // ---- bound -------------------------------------------------------------
  auto* bnd = app.add_subcommand("bound", "closed-form robustness bounds as CSV");
  BoundParams bprm;
  std::string bnd_sigmas = "0.1,0.5,1.0";
  bool bnd_sample_size = false;
  double bnd_alpha = 0.001, bnd_beta = 0.01;
  bnd->add_option("--n", bprm.n_rows, "row count N");
  bnd->add_option("--p", bprm.p, "watermark column count p");
  bnd->add_option("--gamma", bprm.gamma, "gamma");
  bnd->add_option("--delta", bprm.delta, "delta");
  bnd->add_option("--sigmas", bnd_sigmas, "comma-separated noise levels");
  bnd->add_option("--lambda-min", bprm.lambda_min, "smallest covariance eigenvalue");
  bnd->add_option("--lambda-max", bprm.lambda_max, "largest covariance eigenvalue");
  bnd->add_flag("--sample-size", bnd_sample_size, "emit minimum sample sizes instead of Z bounds");
  bnd->add_option("--alpha", bnd_alpha, "significance level (sample-size mode)");
  bnd->add_option("--beta", bnd_beta, "type-II error target (sample-size mode)");
  bnd->callback([&] {
    std::stringstream ss(bnd_sigmas);
    std::string tok;
    std::cout << (bnd_sample_size ? "sigma,min_rows\n" : "sigma,z_lower_bound\n");
    while (std::getline(ss, tok, ',')) {
      bprm.sigma = std::stod(tok);
      if (bnd_sample_size)
        std::cout << bprm.sigma << "," << sample_size_bound(bnd_alpha, bnd_beta, bprm) << "\n";
      else
        std::cout << bprm.sigma << "," << z_lower_bound(bprm) << "\n";
    }
  });

  // ---- calibrate ---------------------------------------------------------
  auto* cal = app.add_subcommand("calibrate", "Monte-Carlo null calibration on Gaussian tables");
  int cal_tables = 100, cal_rows = 1000, cal_cols = 11;
  long cal_resamples = 100000;
  std::string cal_key = "1", cal_out, cal_cov = "identity";
  std::uint64_t cal_seed = 0;
  cal->add_option("--tables", cal_tables, "number of null tables");
  cal->add_option("--rows", cal_rows, "rows per table");
  cal->add_option("--cols", cal_cols, "columns per table");
  cal->add_option("--cov", cal_cov, "identity | ar1 | ar1:<rho>");
  cal->add_option("--resamples", cal_resamples, "bootstrap resamples");
  cal->add_option("--key", cal_key, "detection key used during calibration");
  cal->add_option("--seed", cal_seed, "PRNG seed");
  cal->add_option("--out", cal_out, "null-stats JSON path (default: stdout)");
  cal->callback([&] {
    GaussianSpec gs;
    gs.n_rows = cal_rows;
    gs.p = cal_cols;
    double rho = 0.4;
    gs.cov = parse_cov(cal_cov, rho);
    gs.rho = rho;
    EmbedConfig cfg;
    cfg.key = parse_key(cal_key);
    NullStats null = calibrate_null(
        [&](int i) {
          GaussianSpec s = gs;
          s.seed = keyed_prng(cal_seed, "calibrate-tables").derive(i).next();
          return generate(s);
        },
        cal_tables, cal_rows, cal_resamples, cfg.key, cfg, cal_seed);
    json j = null_to_json(null);
    j["command"] = "calibrate";
    j["seed"] = cal_seed;
    emit_report(j, cal_out);
  });

  // ---- fidelity ----------------------------------------------------------
  auto* fid = app.add_subcommand("fidelity", "Density/Corr fidelity metrics between two CSVs");
  std::string fid_real, fid_synth, fid_schema, fid_report;
  std::uint64_t fid_seed = 0;
  fid->add_option("--real", fid_real, "reference CSV")->required()->check(CLI::ExistingFile);
  fid->add_option("--synth", fid_synth, "comparison CSV")->required()->check(CLI::ExistingFile);
  fid->add_option("--schema", fid_schema, "sidecar schema for both files")->check(CLI::ExistingFile);
  fid->add_option("--report", fid_report, "report JSON path (default: stdout)");
  fid->add_option("--seed", fid_seed, "recorded in the report");
  fid->callback([&] {
    Table a = load_table(fid_real, fid_schema);
    Table b = load_table(fid_synth, fid_schema);
    FidelityReport rep = fidelity_report(a, b);
    json j{{"command", "fidelity"},
           {"seed", fid_seed},
           {"density", rep.density},
           {"corr", rep.corr},
           {"mean_abs_corr_change", rep.mean_abs_corr_change},
           {"per_column_distances", rep.per_column_distances},
           {"skipped_pairs", rep.skipped_pairs}};
    emit_report(j, fid_report);
  });

  // ---- trace -------------------------------------------------------------
  auto* trc = app.add_subcommand("trace", "per-row rank/bit debug view");
  EmbedFlags trc_flags;
  std::string trc_in, trc_schema, trc_report;
  std::size_t trc_row = 0;
  std::uint64_t trc_seed = 0;
  trc->add_option("--in", trc_in, "input CSV")->required()->check(CLI::ExistingFile);
  trc->add_option("--schema", trc_schema, "sidecar schema file")->check(CLI::ExistingFile);
  trc_flags.attach(trc);
  trc->add_option("--row", trc_row, "row index to trace")->required();
  trc->add_option("--report", trc_report, "report JSON path (default: stdout)");
  trc->add_option("--seed", trc_seed, "recorded in the report");
  trc->callback([&] {
    Table t = load_table(trc_in, trc_schema);
    EmbedConfig cfg = trc_flags.config(t);
    if (trc_row >= t.rows()) throw std::runtime_error("--row out of range");
    TransformState tmpl;
    tmpl.columns = resolve_watermark_columns(t, cfg);
    if (cfg.privacy) tmpl.permutation = derive_permutation(cfg.key, int(tmpl.columns.size()));
    auto [z, state] = fit_transform(t, tmpl);
    const int p = state.p();
    const int m = (p - 1) / 2;
    RankContext ctx = rank_context(z, cfg.key, cfg.privacy);
    const double r = ctx.normalized_ranks[trc_row];
    const int level = cfg.bit_mode == BitMode::gray2 ? (m + 1) / 2 : m;
    json j{{"command", "trace"},
           {"seed", trc_seed},
           {"row", trc_row},
           {"subset", ctx.subset},
           {"score", ctx.scores[trc_row]},
           {"normalized_rank", r},
           {"leaf_bin", rank_bin(r, level)},
           {"bits", bits_for_rank(r, m, cfg.bit_mode)},
           {"m", m}};
    emit_report(j, trc_report);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
