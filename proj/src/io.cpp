#include "lp/io.hpp"

#include <bit>
#include <fstream>

#include <nlohmann/json.hpp>

namespace lp {

static_assert(std::endian::native == std::endian::little,
              "PFLD doubles are written in host order and declared little-endian");

void write_pfld(const Field& f, const std::string& path, const std::string& desc) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  out.write("PFLD0001", 8);
  nlohmann::ordered_json header{{"d", f.dim()}, {"n", f.n()}, {"band", f.band()}, {"desc", desc}};
  std::string htext = header.dump();
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.put('\n');
  out.write(reinterpret_cast<const char*>(f.samples().data()),
            static_cast<std::streamsize>(f.samples().size() * sizeof(double)));
  require(out.good(), errc::io_error, "write to " + path + " failed");
}

Field read_pfld(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::string(magic, 8) == "PFLD0001", errc::io_error,
          path + " is not a PFLD file");
  std::string htext;
  std::getline(in, htext);
  require(in.good(), errc::io_error, "truncated PFLD header in " + path);
  nlohmann::json header = nlohmann::json::parse(htext, nullptr, false);
  require(!header.is_discarded(), errc::io_error, "bad PFLD header in " + path);
  int dim = header.at("d").get<int>();
  int n = header.at("n").get<int>();
  double band = header.at("band").get<double>();
  std::size_t total = dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
  std::vector<double> samples(total);
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  require(in.gcount() == static_cast<std::streamsize>(total * sizeof(double)), errc::io_error,
          "truncated PFLD payload in " + path);
  return Field::from_samples(dim, n, std::move(samples), band);
}

const char* version() {
#ifdef LP_VERSION
  return LP_VERSION;
#else
  return "unknown";
#endif
}

}  // namespace lp
