// lpcalc: synthesis, block decompositions, paraproducts, remainder scaling
// experiments and identity/decay checks on the periodic torus.
//
// Exit codes: 0 success/pass, 1 usage error, 2 assumption or numeric
// precondition failure, 3 tolerance failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lp/besov.hpp"
#include "lp/calculus.hpp"
#include "lp/io.hpp"
#include "lp/paraproduct.hpp"
#include "lp/verify.hpp"

namespace {

using nlohmann::ordered_json;

// JSON config files mirror the flags of a subcommand; values are injected
// only for options absent from the command line, so flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;
  lp::require(!args.empty() && args[0].rfind("--", 0) != 0, lp::errc::io_error,
              "--config needs a subcommand");
  std::ifstream in(config_path);
  lp::require(in.good(), lp::errc::io_error, "cannot open config file " + config_path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  lp::require(!j.is_discarded() && j.is_object(), lp::errc::io_error,
              "config file must hold a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto scalar = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  std::vector<std::string> inject;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string flag = "--" + it.key();
    if (given(flag)) continue;
    inject.push_back(flag);
    if (it.value().is_array())
      for (const auto& v : it.value()) inject.push_back(scalar(v));
    else
      inject.push_back(scalar(it.value()));
  }
  args.insert(args.begin() + 1, inject.begin(), inject.end());
  return args;
}

ordered_json resolved_config(const CLI::App* app) {
  ordered_json j;
  for (const CLI::Option* opt : app->get_options({})) {
    if (opt->get_lnames().empty()) continue;
    std::string name = opt->get_lnames()[0];
    if (opt->count() > 0) {
      j[name] = opt->results().size() == 1 ? ordered_json(opt->results()[0])
                                           : ordered_json(opt->results());
    }
  }
  j["version"] = lp::version();
  return j;
}

void write_json(const std::string& path, const ordered_json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  lp::require(out.good(), lp::errc::io_error, "cannot open " + path);
  out << j.dump(2) << "\n";
}

struct SynthOpts {
  double alpha = 0.6;
  std::uint64_t seed = 42;
  int grid = 16384;
  int dim = 1;
  int modes = -1;
  std::string gen = "lacunary";
  std::string out = "field.pfld";
  std::string desc;
};

int cmd_synth(const SynthOpts& o, const ordered_json& config) {
  lp::DyadicPartition part = lp::make_partition(o.dim, o.grid);
  int j_top = o.modes > 0 ? o.modes : part.j_max();
  lp::Field f = o.gen == "dense" ? lp::synth_dense(o.alpha, o.seed, j_top, part)
                                 : lp::synth_lacunary(o.alpha, o.seed, j_top, part);
  std::string desc = o.desc.empty() ? config.dump() : o.desc;
  lp::write_pfld(f, o.out, desc);
  std::printf("besov_norm(alpha=%g) = %.12g\n", o.alpha, lp::besov_norm(f, o.alpha, part));
  return 0;
}

int cmd_blocks(const std::string& in, const std::string& csv, const std::string& fit_json,
               int j_lo, int j_hi, const ordered_json& config) {
  lp::Field f = lp::read_pfld(in);
  lp::DyadicPartition part = lp::make_partition(f.dim(), f.n());
  lp::BlockSequence seq = lp::lp_decompose(f, part);
  std::vector<double> norms;
  for (int j = 0; j < seq.size(); ++j) norms.push_back(seq.block_norm(j));
  if (!csv.empty()) lp::write_decay_csv(csv, norms, 0, "config: " + config.dump());
  if (!fit_json.empty()) {
    int hi = j_hi > 0 ? j_hi : seq.size() - 1;
    std::vector<double> xs, ys;
    for (int j = std::max(0, j_lo); j <= std::min(hi, seq.size() - 1); ++j) {
      if (norms[static_cast<std::size_t>(j)] < 1e-14) continue;
      xs.push_back(j);
      ys.push_back(std::log2(norms[static_cast<std::size_t>(j)]));
    }
    lp::require(xs.size() >= 4, lp::errc::insufficient_scales, "not enough usable blocks to fit");
    lp::LineFit lf = lp::least_squares(xs, ys);
    write_json(fit_json, ordered_json{{"slope", lf.slope},
                                      {"intercept", lf.intercept},
                                      {"r2", lf.r2},
                                      {"j_min", static_cast<int>(xs.front())},
                                      {"j_max", static_cast<int>(xs.back())}});
  }
  std::printf("decomposed %d blocks, band %.1f\n", seq.size(), f.band());
  return 0;
}

int cmd_paraproduct(const std::string& fpath, const std::string& gpath, const std::string& kind,
                    const std::string& out, const ordered_json& config) {
  lp::Field f = lp::read_pfld(fpath);
  lp::Field g = lp::read_pfld(gpath);
  lp::DyadicPartition part = lp::make_partition(f.dim(), f.n());
  lp::Field r = kind == "resonant" ? lp::resonant(f, g, part) : lp::paraproduct(f, g, part);
  lp::write_pfld(r, out, config.dump());
  std::printf("%s written, sup-norm %.12g\n", kind.c_str(), r.max_abs());
  return 0;
}

int cmd_remainder(lp::ScalingParams p, const std::string& csv, const std::string& json,
                  const ordered_json& config) {
  lp::ScalingReport rep = lp::run_scaling(p);
  std::string word;
  for (std::size_t i = 0; i < rep.regs.size(); ++i) word += static_cast<char>('1' + i);
  if (!csv.empty())
    lp::write_samples_csv(csv, rep.formula, word, rep.expected, rep.samples,
                          "config: " + config.dump());
  if (!json.empty()) write_json(json, lp::scaling_report_json(rep, config));
  std::printf("%s expected %.3f fitted %.4f tolerance %.2f -> %s\n", rep.formula.c_str(),
              rep.expected, rep.median_slope, rep.tolerance, rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley / paraproduct calculus on the periodic torus"};
  app.require_subcommand(1);

  // synth
  SynthOpts so;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic field with given regularity");
  synth->add_option("--alpha", so.alpha, "target regularity (positive, non-integer)");
  synth->add_option("--seed", so.seed, "PRNG seed");
  synth->add_option("--grid", so.grid, "grid size per axis (power of two)");
  synth->add_option("--dim", so.dim, "dimension (1 or 2)")->check(CLI::Range(1, 2));
  synth->add_option("--modes", so.modes, "top dyadic scale (default: grid maximum)");
  synth->add_option("--gen", so.gen, "generator: lacunary | dense")
      ->check(CLI::IsMember({"lacunary", "dense"}));
  synth->add_option("--out", so.out, "output PFLD path");
  synth->add_option("--desc", so.desc, "description stored in the file header");

  // blocks
  std::string b_in, b_csv, b_fit;
  int b_jlo = 0, b_jhi = -1;
  CLI::App* blocks = app.add_subcommand("blocks", "dyadic block norms of a field");
  blocks->add_option("--in", b_in, "input PFLD")->required();
  blocks->add_option("--csv", b_csv, "write per-block sup norms CSV");
  blocks->add_option("--fit", b_fit, "write fitted decay slope JSON");
  blocks->add_option("--jlo", b_jlo, "first block for the fit");
  blocks->add_option("--jhi", b_jhi, "last block for the fit");

  // paraproduct
  std::string p_f, p_g, p_kind = "para", p_out = "out.pfld";
  CLI::App* para = app.add_subcommand("paraproduct", "paraproduct or resonant product of two fields");
  para->add_option("--f", p_f, "low-frequency factor PFLD")->required();
  para->add_option("--g", p_g, "high-frequency factor PFLD")->required();
  para->add_option("--kind", p_kind, "para | resonant")
      ->check(CLI::IsMember({"para", "resonant"}));
  para->add_option("--out", p_out, "output PFLD path");

  // remainder
  lp::ScalingParams rp;
  double r_alpha = -1, r_beta = -1, r_gamma = -1;
  std::string r_csv, r_json;
  CLI::App* rem = app.add_subcommand("remainder", "remainder scaling-exponent experiment");
  rem->add_option("--formula", rp.formula, "omega1 | omega2 | omega3 | omega_word")->required();
  rem->add_option("--alpha", r_alpha, "first regularity");
  rem->add_option("--beta", r_beta, "second regularity");
  rem->add_option("--gamma", r_gamma, "third regularity");
  rem->add_option("--regs", rp.regs, "explicit regularity list (for omega_word)");
  rem->add_option("--grid", rp.grid_n, "grid size");
  rem->add_option("--dim", rp.dim, "dimension")->check(CLI::Range(1, 2));
  rem->add_option("--seeds", rp.seeds, "number of seeds");
  rem->add_option("--seed0", rp.seed0, "first seed");
  rem->add_option("--modes", rp.j_top, "synthesis scales");
  rem->add_option("--gen", rp.generator, "lacunary | dense")
      ->check(CLI::IsMember({"lacunary", "dense"}));
  rem->add_option("--rlo", rp.sample.r_lo, "coarsest scale bin");
  rem->add_option("--rhi", rp.sample.r_hi, "finest scale bin");
  rem->add_option("--base-points", rp.sample.base_points, "base points per bin");
  rem->add_option("--disps", rp.sample.disps, "displacements per base point");
  rem->add_option("--drop", rp.drop_extremes, "bins dropped at each end of the fit");
  rem->add_option("--jobs", rp.jobs, "worker threads");
  rem->add_option("--tol", rp.tolerance, "slope tolerance (default per formula)");
  rem->add_option("--csv", r_csv, "write sample CSV");
  rem->add_option("--json", r_json, "write fit report JSON");

  // check
  std::string c_identity, c_decay, c_json;
  lp::IdentityParams ip;
  lp::DecayParams dp;
  std::vector<double> c_regs;
  std::vector<int> c_k;
  double c_tol = -1;
  std::string c_gen = "dense";
  int c_grid = 0, c_n = 3, c_pairs = 100, c_ktop = 2;
  std::uint64_t c_seed = 20260810;
  CLI::App* check = app.add_subcommand("check", "exact identity or decay-rate check");
  check->add_option("--identity", c_identity,
                    "bony | wdofd | explicit_c | lmm1 | lmm2 | reorg | leibniz");
  check->add_option("--decay", c_decay, "c_kj | r_seq | d_kj | moment_block");
  std::string c_word;
  check->add_option("--n", c_n, "word length");
  check->add_option("--word", c_word, "word label, e.g. 12 or 123 (sets the length)");
  check->add_option("--regs", c_regs, "component regularities");
  check->add_option("--k", c_k, "multiindex for decay targets");
  check->add_option("--ktop", c_ktop, "largest |k| for identity checks");
  check->add_option("--pairs", c_pairs, "random evaluation pairs");
  check->add_option("--seed", c_seed, "seed");
  int c_seeds = 5;
  check->add_option("--seeds", c_seeds, "number of seeds (decay targets)");
  check->add_option("--grid", c_grid, "grid size (default: 4096 identity, 16384 decay)");
  check->add_option("--gen", c_gen, "lacunary | dense")
      ->check(CLI::IsMember({"lacunary", "dense"}));
  check->add_option("--tol", c_tol, "tolerance (default: 1e-8 identity, 0.15 decay)");
  check->add_option("--json", c_json, "write report JSON");

  // fit
  std::string f_csv, f_json;
  int f_drop = 2;
  CLI::App* fit = app.add_subcommand("fit", "fit a scaling exponent from a sample CSV");
  fit->add_option("--csv", f_csv, "input sample CSV")->required();
  fit->add_option("--json", f_json, "output JSON");
  fit->add_option("--drop", f_drop, "bins dropped at each end");

  for (CLI::App* sub : {synth, blocks, para, rem, check, fit})
    sub->add_option("--config", "JSON config mirroring the flags; flags override")
        ->type_name("FILE")
        ->expected(0);  // consumed before parsing; listed here for --help only

  std::vector<std::string> args;
  try {
    args = merge_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const lp::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(so, resolved_config(synth));
    if (*blocks) return cmd_blocks(b_in, b_csv, b_fit, b_jlo, b_jhi, resolved_config(blocks));
    if (*para) return cmd_paraproduct(p_f, p_g, p_kind, p_out, resolved_config(para));
    if (*rem) {
      if (rp.regs.empty()) {
        if (r_alpha > 0) rp.regs.push_back(r_alpha);
        if (r_beta > 0) rp.regs.push_back(r_beta);
        if (r_gamma > 0) rp.regs.push_back(r_gamma);
      }
      return cmd_remainder(rp, r_csv, r_json, resolved_config(rem));
    }
    if (*check) {
      lp::require(c_identity.empty() != c_decay.empty(), lp::errc::unknown_identity,
                  "pass exactly one of --identity / --decay");
      ordered_json config = resolved_config(check);
      if (!c_word.empty()) c_n = static_cast<int>(c_word.size());
      if (!c_identity.empty()) {
        ip.n_components = c_n;
        ip.regs = c_regs;
        ip.k_top = c_ktop;
        ip.pairs = c_pairs;
        ip.seed = c_seed;
        ip.generator = c_gen;
        if (c_grid > 0) ip.grid_n = c_grid;
        double tol = c_tol > 0 ? c_tol : (c_identity == "bony" ? 1e-10 : 1e-8);
        lp::IdentityReport rep = lp::run_identity_suite(c_identity, ip);
        if (!c_json.empty()) write_json(c_json, lp::identity_report_json(rep, tol, config));
        std::printf("identity %s residual %.3e tolerance %.1e -> %s\n", rep.id.c_str(),
                    rep.max_rel_residual, tol, rep.max_rel_residual <= tol ? "pass" : "FAIL");
        return rep.max_rel_residual <= tol ? 0 : 3;
      }
      dp.regs = c_regs.empty() && !c_word.empty() ? lp::default_regs(c_n) : c_regs;
      dp.seeds = c_seeds;
      dp.seed0 = c_seed;
      dp.generator = c_gen;
      if (c_grid > 0) dp.grid_n = c_grid;
      if (c_tol > 0) dp.tolerance = c_tol;
      if (!c_k.empty()) dp.k = c_k.size() > 1 ? lp::MultiIndex{c_k[0], c_k[1]}
                                              : lp::MultiIndex{c_k[0]};
      lp::DecayReport rep = lp::run_decay_suite(c_decay, dp);
      if (!c_json.empty()) write_json(c_json, lp::decay_report_json(rep, config));
      std::printf("decay %s expected %.3f fitted %.4f -> %s\n", rep.target.c_str(),
                  rep.expected_slope, rep.median_slope, rep.pass ? "pass" : "FAIL");
      return rep.pass ? 0 : 3;
    }
    if (*fit) {
      std::ifstream in(f_csv);
      lp::require(in.good(), lp::errc::io_error, "cannot open " + f_csv);
      std::vector<lp::RemainderSample> samples;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("formula,", 0) == 0) continue;
        lp::RemainderSample s;
        char formula[64], word[64];
        double alpha_total;
        if (std::sscanf(line.c_str(), "%63[^,],%63[^,],%lf,%lf,%lf,%lf,%d", formula, word,
                        &alpha_total, &s.x0, &s.hnorm, &s.abs_omega, &s.scale_bin) == 7)
          samples.push_back(s);
      }
      lp::ScalingFit sf = lp::fit_exponent(samples, f_drop);
      write_json(f_json, lp::to_json(sf));
      return 0;
    }
  } catch (const lp::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == lp::errc::unknown_identity ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
