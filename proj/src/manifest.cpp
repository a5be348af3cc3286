#include "wafergp/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "wafergp/error.hpp"

namespace wafergp {

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

bool Manifest::has(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw Error("manifest-missing-key", "manifest has no key '" + key + "'");
}

std::vector<std::string> Manifest::argv() const {
  std::vector<std::string> out;
  for (int i = 0;; ++i) {
    const std::string key = "argv." + std::to_string(i);
    if (!has(key)) break;
    out.push_back(get(key));
  }
  return out;
}

void Manifest::write(std::ostream& out) const {
  out << "# run manifest\n";
  for (const auto& [k, v] : entries_) {
    out << k << " = " << v << '\n';
  }
}

void Manifest::write_file(const std::string& path) const {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("io", "cannot open '" + tmp.string() + "' for writing");
    write(out);
  }
  fs::rename(tmp, target);
}

Manifest Manifest::parse(std::istream& in) {
  Manifest m;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find(" = ");
    if (sep == std::string::npos) {
      throw Error("manifest-malformed",
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    m.entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
  }
  return m;
}

Manifest Manifest::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open '" + path + "' for reading");
  return parse(in);
}

}  // namespace wafergp
