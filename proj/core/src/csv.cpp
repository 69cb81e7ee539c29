#include "drexp/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace drexp {

namespace {

void strip_bom(std::string& s) {
  if (s.size() >= 3 && s[0] == '\xEF' && s[1] == '\xBB' && s[2] == '\xBF') s.erase(0, 3);
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_value(const std::string& token, std::size_t row) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    std::ostringstream os;
    os << "row " << row << ": cannot parse value \"" << token << "\"";
    throw InputError(os.str());
  }
  return v;
}

}  // namespace

Observations load_observations_csv(std::istream& in, const ModelFamily& family) {
  std::vector<double> values;
  std::vector<std::size_t> rows;
  std::string line;
  std::size_t row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1) strip_bom(line);
    strip_cr(line);
    const std::string token = trimmed(line);
    if (token.empty()) continue;  // tolerate blank lines (incl. trailing one)
    if (first_content && token == "x") {
      first_content = false;
      continue;
    }
    first_content = false;
    values.push_back(parse_value(token, row));
    rows.push_back(row);
  }
  if (values.empty()) throw InputError("no observations in input");
  if (family.is_pareto()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 1.0)) {
        std::ostringstream os;
        os << "row " << rows[i] << ": value " << values[i]
           << " outside Pareto support (x > 1)";
        throw InputError(os.str());
      }
    }
  }
  return Observations(std::move(values));
}

Observations load_observations_csv(const std::filesystem::path& path,
                                   const ModelFamily& family) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path.string());
  return load_observations_csv(in, family);
}

void write_observations_csv(std::ostream& out, const Observations& obs) {
  out << "x\n";
  char buf[64];
  for (double v : obs.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

}  // namespace drexp
