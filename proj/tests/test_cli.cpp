// End-to-end checks of the command-line tool: exit-code contract,
// reproducibility of outputs, and basic file formats.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "[ok]  " : "[FAIL]", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& args) {
  std::string cmd = std::string(LPCALC_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  fs::path dir = fs::temp_directory_path() / "lpcalc_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  // synthesis: determinism and the non-integer guard
  expect(run("synth --alpha 0.6 --seed 42 --grid 4096 --modes 8 --out " + at("a.pfld")) == 0,
         "synth exits 0");
  std::string first = slurp(at("a.pfld"));
  expect(run("synth --alpha 0.6 --seed 42 --grid 4096 --modes 8 --out " + at("a.pfld")) == 0,
         "synth twice exits 0");
  expect(slurp(at("a.pfld")) == first, "same command gives identical files");
  expect(!slurp(at("a.pfld")).empty(), "field file is nonempty");
  expect(run("synth --alpha 2.0 --seed 1 --grid 4096 --out " + at("c.pfld")) == 2,
         "integer regularity exits 2");
  expect(run("synth --alpha 0.6 --seed 1 --grid 100 --out " + at("c.pfld")) == 2,
         "bad grid exits 2");

  // blocks
  expect(run("blocks --in " + at("a.pfld") + " --csv " + at("blocks.csv") + " --fit " +
             at("blocks.json")) == 0,
         "blocks exits 0");
  std::string csv = slurp(at("blocks.csv"));
  expect(csv.find("j,sup_norm") != std::string::npos, "blocks CSV has the right header");
  expect(slurp(at("blocks.json")).find("\"slope\"") != std::string::npos,
         "blocks fit JSON has a slope");

  // paraproduct of two synthetic fields
  expect(run("synth --alpha 0.7 --seed 7 --grid 4096 --modes 8 --out " + at("g.pfld")) == 0,
         "second synth exits 0");
  expect(run("paraproduct --f " + at("a.pfld") + " --g " + at("g.pfld") + " --out " +
             at("pp.pfld")) == 0,
         "paraproduct exits 0");
  expect(run("paraproduct --f " + at("a.pfld") + " --g " + at("g.pfld") +
             " --kind resonant --out " + at("rs.pfld")) == 0,
         "resonant exits 0");

  // remainder experiment: pass, reproducibility, guard
  std::string rem = "remainder --formula omega1 --alpha 0.7 --grid 4096 --modes 9 --seeds 2 "
                    "--base-points 24 --rhi 9 --csv " +
                    at("samples.csv") + " --json " + at("fit.json");
  expect(run(rem) == 0, "remainder omega1 passes");
  std::string csv1 = slurp(at("samples.csv"));
  std::string json1 = slurp(at("fit.json"));
  expect(run(rem) == 0, "remainder rerun passes");
  expect(slurp(at("samples.csv")) == csv1 && slurp(at("fit.json")) == json1,
         "remainder outputs are byte-identical across runs");
  expect(csv1.find("formula,word,alpha_total,x,h,abs_omega,scale_bin") != std::string::npos,
         "sample CSV header matches the schema");
  expect(json1.find("\"git_describe\"") != std::string::npos, "report embeds the tool version");
  expect(run("remainder --formula omega2 --alpha 0.5 --beta 0.5 --grid 4096 --seeds 1") == 2,
         "integer regularity sum exits 2");

  // fit from CSV reproduces a slope
  expect(run("fit --csv " + at("samples.csv") + " --json " + at("refit.json")) == 0,
         "fit exits 0");
  expect(slurp(at("refit.json")).find("\"slope\"") != std::string::npos, "fit JSON has a slope");

  // checks: pass, tolerance contract, unknown identity
  expect(run("check --identity bony --grid 2048 --pairs 40 --json " + at("bony.json")) == 0,
         "bony check exits 0");
  expect(slurp(at("bony.json")).find("\"pass\": true") != std::string::npos,
         "bony report records the pass");
  expect(run("check --identity wdofd --n 2 --grid 2048 --json " + at("wdofd.json")) == 0,
         "wdofd check exits 0");
  expect(run("check --identity nosuch") == 1, "unknown identity exits 1");
  expect(run("check --decay moment_block --grid 8192 --regs 0.7 --k 1 --json " +
             at("decay.json")) == 0,
         "moment decay check exits 0");

  // config file mirrors flags; flags override the file
  {
    std::ofstream cfg(at("cfg.json"));
    cfg << "{\"alpha\": 2.0, \"seed\": 5, \"grid\": 4096, \"modes\": 8, \"out\": \""
        << at("cfg_out.pfld") << "\"}\n";
  }
  expect(run("synth --config " + at("cfg.json")) == 2, "config-file alpha guard fires");
  expect(run("synth --config " + at("cfg.json") + " --alpha 0.8") == 0,
         "command-line flag overrides the config file");

  expect(run("") == 1, "missing subcommand exits 1");

  fs::remove_all(dir);
  if (failures) {
    std::printf("%d CLI checks failed\n", failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}
