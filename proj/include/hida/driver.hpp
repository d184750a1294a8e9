// Batch driver behind the `hida` command line tool.
#pragma once

#include <string>
#include <vector>

#include "hida/fixtures.hpp"
#include "hida/lfunc.hpp"
#include "json.hpp"

namespace hida {

using json = nlohmann::ordered_json;

struct JobConfig {
  u64 p = 0;
  u64 N = 1;
  int m = 0;
  int M = 0;  // 0: preset for (p, N, command)
  int L = 0;
  int sign = 0;
  u64 seed = 1;
  u64 primes_bound = 0;  // 0: preset
  std::string killer_spec;
  std::string command;
  std::string cache_dir;  // empty: $HIDA_CACHE_DIR, else ".hida-cache"; "-" disables
  std::string output_path;
  int threads = 1;
};

extern const std::vector<std::string> kCommands;

// Fills presets and checks the invariants; throws Validation.
JobConfig validated(JobConfig c);
std::string cache_key(const JobConfig& c);
std::string resolve_cache_dir(const JobConfig& c);

struct Family {
  std::shared_ptr<const ManinData> md;
  std::vector<FamilySymbol> basis;
  int target_rank = 0;
  int ordinary_rank = 0;
};
// Ranks come from classical symbols of weight m + 2 over F_p; the basis is
// read from the cache when present and written there otherwise.
Family run_family(const JobConfig& c);

// The structured document for c.command. verify-fixtures sets *ok.
json run_command(const JobConfig& c, bool* ok = nullptr);
// Checks every fixture section, or only the named ones.
json verify_fixtures(const JobConfig& base, bool* ok, const std::vector<std::string>& only = {});
// Indented text with scalar arrays kept on one line.
std::string render(const json& doc);

// Document pieces: base-p digits, least significant first.
json padic_json(const PadicNum& x, int n = -1);
json series_json(const TruncSeries& f, const std::string& var);
json qp_series_json(const QpSeries& f, const std::string& var);

// Mismatch messages; empty means agreement mod (p^P, deg D).
std::vector<std::string> compare_k_series(const SeriesTable& want, int P, int D,
                                          const TruncSeries& got);
std::vector<std::string> compare_ks(const SeriesTable& want, int P, int D, const KSSeries& got);
std::vector<std::string> compare_padic(const PadicNum& want, int P, const PadicNum& got);

}  // namespace hida
