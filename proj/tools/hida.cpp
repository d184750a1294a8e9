// Command line front end: one command per invocation, one JSON document out.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hida/driver.hpp"

namespace {

int parse_sign(const std::string& s) {
  if (s == "+" || s == "1" || s == "+1" || s == "plus") return 1;
  if (s == "-" || s == "-1" || s == "minus") return -1;
  if (s == "0" || s == "none") return 0;
  hida::fail(hida::ErrorKind::Validation, "sign must be +1, -1 or 0");
}

int exit_code(hida::ErrorKind k) {
  switch (k) {
    case hida::ErrorKind::Validation: return 2;
    case hida::ErrorKind::Fixture: return 3;
    case hida::ErrorKind::Numerical: return 4;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  hida::JobConfig c;
  std::string sign = "0";
  CLI::App app{"p-adic Hida families from overconvergent modular symbols"};
  app.add_option("command", c.command, "manin | family | charpoly | qexp | linv | adjoint-linv | twovarL | hida-disc | verify-fixtures")
      ->required();
  app.add_option("--p", c.p, "odd prime");
  app.add_option("--N", c.N, "tame level, prime to p");
  app.add_option("--m", c.m, "branch of weight space, 0..p-2");
  app.add_option("--M", c.M, "p-adic precision (0: preset)");
  app.add_option("--L", c.L, "w-adic precision (0: preset)");
  app.add_option("--sign", sign, "+1, -1 or 0 (no sign projection)");
  app.add_option("--seed", c.seed, "seed for the random starting symbols");
  app.add_option("--primes_bound,--primes-bound", c.primes_bound, "largest prime for Hecke data (0: preset)");
  app.add_option("--killer_spec,--killers", c.killer_spec, "e.g. U5:-1,0,1;T2:-3,1 (monic, lowest degree first)");
  app.add_option("--cache_dir,--cache-dir", c.cache_dir, "symbol cache; '-' disables; default $HIDA_CACHE_DIR or .hida-cache");
  app.add_option("--output_path,--output,-o", c.output_path, "write the document here instead of stdout");
  app.add_option("--threads", c.threads, "worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    c.sign = parse_sign(sign);
    bool ok = true;
    auto doc = hida::run_command(c, &ok);
    std::string text = hida::render(doc);
    if (c.output_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(c.output_path);
      if (!os) hida::fail(hida::ErrorKind::Validation, "cannot write " + c.output_path);
      os << text;
    }
    return ok ? 0 : 3;
  } catch (const hida::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
