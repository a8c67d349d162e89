#include "fpdeconv/keyvalue.hpp"

#include <array>
#include <charconv>
#include <string_view>

#include "fpdeconv/errors.hpp"

namespace fpdeconv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

KeyValueDocument KeyValueDocument::parse(std::istream& in, const std::string& source) {
  KeyValueDocument doc;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_number) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_number) + ": empty key");
    doc.set(std::string(key), std::string(value));
  }
  return doc;
}

void KeyValueDocument::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

void KeyValueDocument::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValueDocument::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void KeyValueDocument::set(const std::string& key, unsigned long long value) {
  set(key, std::to_string(value));
}
void KeyValueDocument::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

std::optional<std::string> KeyValueDocument::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void KeyValueDocument::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

}  // namespace fpdeconv
