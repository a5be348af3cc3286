#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wafergp {

/// Ordered key-value record written next to every CLI output. Replaying the
/// stored argv tokens reproduces the outputs byte for byte.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  /// Value for `key`; throws "manifest-missing-key" when absent.
  const std::string& get(const std::string& key) const;

  /// Keys "argv.0", "argv.1", ... in index order.
  std::vector<std::string> argv() const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void write(std::ostream& out) const;
  /// Atomic write (temp file + rename).
  void write_file(const std::string& path) const;

  static Manifest parse(std::istream& in);
  static Manifest parse_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace wafergp
