// Reference tables bundled under data/ and a parser for their series syntax.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hida/arith.hpp"

namespace hida {

struct FixtureSection {
  std::string name;
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  i64 get_int(const std::string& key) const;
  // "P D" pairs such as `prec = 11 12`; a single number gives D = 0.
  std::pair<int, int> get_prec(const std::string& key) const;
};

// Directory holding fixtures.txt: $HIDA_DATA_DIR, else the build-time path.
std::string data_dir();
std::vector<FixtureSection> load_fixtures(const std::string& path = "");
const FixtureSection& find_section(const std::vector<FixtureSection>& all, const std::string& name);

// Coefficient (i, j) of x^i y^j, reduced mod p^P. The first variable is k
// or T, the second s.
using SeriesTable = std::map<std::pair<int, int>, u64>;
SeriesTable parse_series(const std::string& text, u64 p, int P);
PadicNum parse_padic(const std::string& text, u64 p, int P);

}  // namespace hida
