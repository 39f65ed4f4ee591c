#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgqa::cli {

// Flat key=value configuration. Later sources override earlier ones:
// defaults, config file, KGQA_OUT, --set, --out.
class Config {
 public:
  Config();

  // Relative paths inside the file resolve against the file's directory.
  void load_file(const std::string& path);
  void set(const std::string& assignment);  // "key=value"
  void put(const std::string& key, std::string value);

  bool has(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  std::string get(const std::string& key) const;  // "" when unset
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// argv without the program name. Returns the process exit status:
// 0 success, 1 runtime failure, 2 usage or configuration error,
// 3 missing upstream artifact.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgqa::cli
