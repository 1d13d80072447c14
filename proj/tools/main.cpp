// bosonpp: experiment runner for the boson point-process laboratory.
// Subcommands: audit, cgf, rate, clt, lln, sample, normal.
// Exit codes: 0 ok, 2 config validation, 3 tolerance failure, 4 internal.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bosonlab/bosonlab.hpp"

namespace bl = bosonlab;
using bl::json;

namespace {

struct Runner {
  bl::ExperimentConfig cfg;
  bl::BuiltExperiment exp;
  std::string out_dir;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();

  void emit(const std::string& name, const std::string& body) {
    std::filesystem::create_directories(out_dir);
    bl::write_text_file(out_dir + "/" + name, body);
    outputs.push_back(name);
  }

  void finish(const std::string& command) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    json m;
    m["command"] = command;
    m["config_hash"] = bl::config_hash(cfg);
    m["version"] = BOSONLAB_VERSION;
    m["seed"] = cfg.seed;
    m["outputs"] = outputs;
    m["wall_clock_ms"] = ms;
    std::filesystem::create_directories(out_dir);
    bl::write_text_file(out_dir + "/manifest.json", m.dump(2) + "\n");
  }
};

std::string flag(double v) { return std::isfinite(v) ? "1" : "0"; }

int cmd_audit(Runner& r) {
  if (r.cfg.kappas.empty()) throw bl::ConfigError("kappas", "required");
  const auto rep =
      bl::lemma_audit(r.exp.grid, r.exp.model, r.exp.profile, r.cfg.kappas);
  json j;
  j["kappas"] = rep.kappas;
  j["k2l_eig_min"] = rep.k2l_eig_min;
  j["k2l_eig_max"] = rep.k2l_eig_max;
  j["k2l_ok"] = rep.k2l_ok;
  j["trace_residual"] = rep.trace_residual;
  j["trace_ok"] = rep.trace_ok;
  j["lf_identity_residual"] = rep.lf_identity_residual;
  j["lf_ok"] = rep.lf_ok;
  j["k2lf_norm_distances"] = rep.k2lf_norm_distances;
  j["k2lf_fitted_order"] = rep.k2lf_fitted_order;
  j["k2lf_ok"] = rep.k2lf_ok;
  j["khs_values"] = rep.khs_values;
  j["khs_fitted_exponent"] = rep.khs_fitted_exponent;
  j["khs_ok"] = rep.khs_ok;
  j["fmp_sup_bounds"] = rep.fmp_sup_bounds;
  j["all_ok"] = rep.all_ok();
  r.emit("audit.json", j.dump(2) + "\n");
  r.finish("audit");
  return rep.all_ok() ? 0 : 3;
}

int cmd_cgf(Runner& r) {
  if (r.cfg.kappas.empty()) throw bl::ConfigError("kappas", "required");
  if (r.cfg.t_panel.empty()) throw bl::ConfigError("t_panel", "required");
  bl::CsvWriter csv({"kappa", "t", "value", "finite_flag"});
  json meta;
  for (double k : r.cfg.kappas) {
    const auto c = bl::finite_cgf_curve(r.exp.grid, r.exp.model, r.exp.profile,
                                        k, r.cfg.t_panel);
    meta["poles"][bl::fmt_num(k)] = bl::json_num(c.pole);
    for (std::size_t i = 0; i < c.t_values.size(); ++i)
      csv.append_row({bl::fmt_num(k), bl::fmt_num(c.t_values[i]),
                      bl::fmt_num(c.values[i]), flag(c.values[i])});
  }
  const auto lim = bl::limit_cgf_curve(r.exp.grid, r.exp.model, r.exp.profile,
                                       r.cfg.t_panel);
  meta["poles"]["inf"] = bl::json_num(lim.pole);
  for (std::size_t i = 0; i < lim.t_values.size(); ++i)
    csv.append_row({"inf", bl::fmt_num(lim.t_values[i]),
                    bl::fmt_num(lim.values[i]), flag(lim.values[i])});
  const auto study = bl::cgf_convergence_study(
      r.exp.grid, r.exp.model, r.exp.profile, r.cfg.kappas, r.cfg.t_panel);
  bl::CsvWriter conv({"kappa", "t", "p_kappa", "p_limit", "abs_err"});
  for (const auto& row : study.rows)
    conv.append_row({bl::fmt_num(row.kappa), bl::fmt_num(row.t),
                     bl::fmt_num(row.p_kappa), bl::fmt_num(row.p_limit),
                     bl::fmt_num(row.abs_err)});
  for (std::size_t i = 0; i < study.t_panel.size(); ++i)
    meta["fitted_order"][bl::fmt_num(study.t_panel[i])] =
        bl::json_num(study.fitted_order[i]);
  r.emit("cgf.csv", csv.body);
  r.emit("cgf_convergence.csv", conv.body);
  r.emit("cgf_meta.json", meta.dump(2) + "\n");
  r.finish("cgf");
  return 0;
}

int cmd_rate(Runner& r) {
  if (r.cfg.s_grid.empty()) throw bl::ConfigError("s_grid", "required");
  const auto tab =
      bl::rate_function(r.exp.grid, r.exp.model, r.exp.profile, r.cfg.s_grid);
  bl::CsvWriter csv({"s", "I", "finite_flag"});
  for (std::size_t i = 0; i < tab.s_values.size(); ++i)
    csv.append_row({bl::fmt_num(tab.s_values[i]), bl::fmt_num(tab.I_values[i]),
                    flag(tab.I_values[i])});
  json meta;
  meta["s_star"] = tab.s_star;
  meta["pole"] = bl::json_num(tab.pole);
  meta["inf_region_boundary"] = tab.left_boundary;
  r.emit("rate.csv", csv.body);
  r.emit("rate_meta.json", meta.dump(2) + "\n");
  r.finish("rate");
  return 0;
}

int cmd_clt(Runner& r) {
  if (r.cfg.kappas.empty()) throw bl::ConfigError("kappas", "required");
  bl::CsvWriter csv({"kappa", "n", "mean", "var", "skew", "kurt", "ks"});
  std::uint64_t stream = 0;
  for (double k : r.cfg.kappas) {
    const auto rep =
        bl::clt_experiment(r.exp.grid, r.exp.model, r.exp.profile, k,
                           r.cfg.n_samples, {r.cfg.seed, stream++});
    csv.append_row({bl::fmt_num(rep.kappa), std::to_string(rep.n_samples),
                    bl::fmt_num(rep.z.mean), bl::fmt_num(rep.z.variance),
                    bl::fmt_num(rep.z.skewness),
                    bl::fmt_num(rep.z.excess_kurtosis), bl::fmt_num(rep.ks)});
  }
  r.emit("clt.csv", csv.body);
  r.finish("clt");
  return 0;
}

int cmd_lln(Runner& r) {
  if (r.cfg.kappas.empty()) throw bl::ConfigError("kappas", "required");
  const auto rows =
      bl::lln_experiment(r.exp.grid, r.exp.model, r.exp.profile, r.cfg.kappas,
                         r.cfg.n_samples, {r.cfg.seed, 0});
  bl::CsvWriter csv(
      {"kappa", "n", "mean", "mean_se", "theory_mean", "l2_error"});
  for (const auto& row : rows)
    csv.append_row({bl::fmt_num(row.kappa), std::to_string(row.n_samples),
                    bl::fmt_num(row.mean), bl::fmt_num(row.mean_se),
                    bl::fmt_num(row.theory_mean), bl::fmt_num(row.l2_error)});
  r.emit("lln.csv", csv.body);
  r.finish("lln");
  return 0;
}

int cmd_sample(Runner& r) {
  const auto variant = r.cfg.variant == "superposition"
                           ? bl::SampleVariant::Superposition
                           : bl::SampleVariant::ShiftedField;
  bl::CsvWriter csv({"draw_index", "total_count", "pair_count_f"});
  const bool want_bin =
      std::find(r.cfg.formats.begin(), r.cfg.formats.end(), "bin") !=
      r.cfg.formats.end();
  std::string bin;
  for (std::size_t i = 0; i < r.cfg.n_samples; ++i) {
    const auto xi = bl::sample_measure(r.exp.measure, r.exp.model, r.exp.grid,
                                       {r.cfg.seed, i}, variant);
    csv.append_row({std::to_string(i), std::to_string(xi.total()),
                    bl::fmt_num(xi.pair_with(r.exp.profile))});
    if (want_bin)
      for (int c : xi.counts) {
        const auto v = static_cast<std::uint32_t>(c);
        bin.append(reinterpret_cast<const char*>(&v), sizeof(v));
      }
  }
  r.emit("samples.csv", csv.body);
  if (want_bin) r.emit("counts.bin", bin);
  r.finish("sample");
  return 0;
}

int cmd_normal(Runner& r) {
  if (r.cfg.phase != "normal")
    throw bl::ConfigError("model.phase", "the normal subcommand needs phase "
                          "\"normal\"");
  if (r.cfg.kappas.empty()) throw bl::ConfigError("kappas", "required");
  if (r.cfg.t_panel.empty()) throw bl::ConfigError("t_panel", "required");
  bl::CsvWriter csv({"kappa", "t", "value", "finite_flag"});
  bl::CGFCurve largest;
  for (double k : r.cfg.kappas) {
    const auto c = bl::normal_phase_cgf(r.exp.grid, r.exp.model, r.exp.profile,
                                        k, r.cfg.t_panel);
    for (std::size_t i = 0; i < c.t_values.size(); ++i)
      csv.append_row({bl::fmt_num(k), bl::fmt_num(c.t_values[i]),
                      bl::fmt_num(c.values[i]), flag(c.values[i])});
    largest = c;
  }
  r.emit("normal_cgf.csv", csv.body);
  if (!r.cfg.s_grid.empty()) {
    const auto proxy = bl::numeric_legendre(largest, r.cfg.s_grid);
    bl::CsvWriter pr({"s", "I_proxy_finite_kappa"});
    for (std::size_t i = 0; i < r.cfg.s_grid.size(); ++i)
      pr.append_row({bl::fmt_num(r.cfg.s_grid[i]), bl::fmt_num(proxy[i])});
    r.emit("normal_rate_proxy.csv", pr.body);
  }
  r.finish("normal");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boson point-process laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "path to the JSON config")
      ->required();
  app.add_option("--out", out_override, "output directory override");
  auto* seed_opt = app.add_option("--seed", seed_override, "seed override");
  app.add_option("--override", overrides, "dotted-path overrides key=value");
  std::vector<std::string> names = {"audit", "cgf",    "rate", "clt",
                                    "lln",   "sample", "normal"};
  for (const auto& n : names)
    app.add_subcommand(n, "run the " + n + " pipeline")->fallthrough();
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "config: cannot open " << config_path << "\n";
      return 2;
    }
    json raw = json::parse(is, nullptr, false);
    if (raw.is_discarded()) {
      std::cerr << "config: invalid JSON in " << config_path << "\n";
      return 2;
    }
    for (const auto& kv : overrides) bl::apply_override(raw, kv);
    if (!out_override.empty()) raw["output"]["directory"] = out_override;
    if (seed_opt->count() > 0) raw["mc"]["seed"] = seed_override;

    Runner r;
    r.cfg = bl::config_from_json(raw);
    r.exp = bl::build_experiment(r.cfg, /*enforce_resolution_guard=*/sub !=
                                            "audit" && sub != "normal" &&
                                            sub != "sample" && sub != "rate");
    r.out_dir = r.cfg.out_dir;
    if (sub == "audit") return cmd_audit(r);
    if (sub == "cgf") return cmd_cgf(r);
    if (sub == "rate") return cmd_rate(r);
    if (sub == "clt") return cmd_clt(r);
    if (sub == "lln") return cmd_lln(r);
    if (sub == "sample") return cmd_sample(r);
    if (sub == "normal") return cmd_normal(r);
    return 4;
  } catch (const bl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal fault: " << e.what() << "\n";
    return 4;
  }
}
