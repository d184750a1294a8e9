#include "hida/fixtures.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef HIDA_DATA_DIR
#define HIDA_DATA_DIR "data"
#endif

namespace hida {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

class SeriesParser {
 public:
  SeriesParser(const std::string& s, u64 p, int P)
      : s_(s), p_(p), P_(P), mod_(PadicContext::get(p).pow(P)) {}

  SeriesTable run() {
    SeriesTable out;
    skip();
    if (pos_ == s_.size()) fail(ErrorKind::Fixture, "empty series");
    for (;;) {
      term(out);
      skip();
      if (pos_ == s_.size()) break;
      expect('+');
    }
    for (auto it = out.begin(); it != out.end();)
      it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
  }

 private:
  const std::string& s_;
  u64 p_;
  int P_;
  u64 mod_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(ErrorKind::Fixture, std::string("expected '") + c + "' in series: " + s_);
    ++pos_;
  }
  i64 number() {
    skip();
    std::size_t st = pos_;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
    if (st == pos_) fail(ErrorKind::Fixture, "expected a number in series: " + s_);
    return std::stoll(s_.substr(st, pos_ - st));
  }
  int exponent() {
    if (!peek('^')) return 1;
    ++pos_;
    return (int)number();
  }
  // c, cp^e or p^e
  u64 atom() {
    u64 c = 1;
    bool any = false;
    skip();
    if (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
      c = reduce_signed(number(), mod_);
      any = true;
    }
    if (peek('p')) {
      ++pos_;
      int e = exponent();
      c = e >= P_ ? 0 : mulmod(c, PadicContext::get(p_).pow(e), mod_);
      any = true;
    }
    if (!any) fail(ErrorKind::Fixture, "bad coefficient in series: " + s_);
    return c;
  }
  u64 coefficient() {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == 'k' || s_[pos_] == 's' || s_[pos_] == 'T')) return 1;
    if (peek('(')) {
      ++pos_;
      u64 c = atom();
      while (peek('+')) {
        ++pos_;
        c = addmod(c, atom(), mod_);
      }
      expect(')');
      return c;
    }
    return atom();
  }
  std::pair<int, int> monomial() {
    int i = 0, j = 0;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) break;
      char v = s_[pos_];
      if (v == 'k' || v == 'T') {
        ++pos_;
        i += exponent();
      } else if (v == 's') {
        ++pos_;
        j += exponent();
      } else {
        break;
      }
    }
    return {i, j};
  }
  void term(SeriesTable& out) {
    u64 c = coefficient();
    auto ij = monomial();
    out[ij] = addmod(out[ij], c, mod_);
  }
};

}  // namespace

const std::string& FixtureSection::get(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorKind::Fixture, "section [" + name + "] has no key " + key);
  return it->second;
}

i64 FixtureSection::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  i64 x = std::strtoll(v.c_str(), &end, 10);
  if (*end) fail(ErrorKind::Fixture, "section [" + name + "]: " + key + " is not an integer");
  return x;
}

std::pair<int, int> FixtureSection::get_prec(const std::string& key) const {
  std::istringstream is(get(key));
  int a = 0, b = 0;
  if (!(is >> a)) fail(ErrorKind::Fixture, "section [" + name + "]: bad " + key);
  is >> b;
  return {a, b};
}

std::string data_dir() {
  if (const char* d = std::getenv("HIDA_DATA_DIR"); d && *d) return d;
  return HIDA_DATA_DIR;
}

std::vector<FixtureSection> load_fixtures(const std::string& path) {
  std::string file = path.empty() ? data_dir() + "/fixtures.txt" : path;
  std::ifstream in(file);
  if (!in) fail(ErrorKind::Fixture, "cannot open " + file);
  std::vector<FixtureSection> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Fixture, file + ":" + std::to_string(lineno) + ": bad header");
      out.push_back({line.substr(1, line.size() - 2), {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || out.empty())
      fail(ErrorKind::Fixture, file + ":" + std::to_string(lineno) + ": expected key = value");
    out.back().kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

const FixtureSection& find_section(const std::vector<FixtureSection>& all, const std::string& name) {
  for (auto& s : all)
    if (s.name == name) return s;
  fail(ErrorKind::Fixture, "no fixture section [" + name + "]");
}

SeriesTable parse_series(const std::string& text, u64 p, int P) {
  if (P < 1 || P > PadicContext::get(p).cap)
    fail(ErrorKind::Fixture, "fixture precision out of range");
  return SeriesParser(text, p, P).run();
}

PadicNum parse_padic(const std::string& text, u64 p, int P) {
  auto t = parse_series(text, p, P);
  for (auto& [ij, c] : t)
    if (ij != std::make_pair(0, 0)) fail(ErrorKind::Fixture, "expected a constant: " + text);
  return PadicNum::from_residue(p, t.count({0, 0}) ? t[{0, 0}] : 0, P);
}

}  // namespace hida
