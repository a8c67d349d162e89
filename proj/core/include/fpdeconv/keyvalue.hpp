#pragma once

// Flat "key = value" text used for configs and run metadata sidecars.
// '#' starts a comment; blank lines are ignored; keys keep insertion order.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fpdeconv {

class KeyValueDocument {
 public:
  // Throws ConfigError naming `source` and the line on malformed input.
  static KeyValueDocument parse(std::istream& in, const std::string& source = "<input>");

  // Replaces an existing key in place, otherwise appends.
  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, unsigned long long value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return get(key).has_value(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace fpdeconv
