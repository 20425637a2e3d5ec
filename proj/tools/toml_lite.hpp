#pragma once

// Reader for the flat TOML subset used by run configurations: [section]
// headers, scalar `key = value` pairs (quoted strings, numbers, booleans)
// and # comments. Lookups use dotted field paths ("compute.n_max") and all
// errors carry that path, so a bad config fails with a message naming the
// offending field.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace tomllite {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Table {
 public:
  Table() = default;

  static Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config file " + path);
    Table t;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = strip_comment(line, path, lineno);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw ParseError(where(path, lineno) + "unterminated section header");
        section = trim(s.substr(1, s.size() - 2));
        if (section.empty())
          throw ParseError(where(path, lineno) + "empty section name");
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ParseError(where(path, lineno) + "expected `key = value`");
      std::string key = trim(s.substr(0, eq));
      std::string value = trim(s.substr(eq + 1));
      if (key.empty())
        throw ParseError(where(path, lineno) + "empty key");
      if (value.empty())
        throw ParseError(where(path, lineno) + "empty value for " + key);
      Raw raw;
      if (value.front() == '"') {
        if (value.size() < 2 || value.back() != '"')
          throw ParseError(where(path, lineno) + "unterminated string for " +
                           key);
        raw.text = value.substr(1, value.size() - 2);
        raw.quoted = true;
      } else {
        raw.text = value;
      }
      std::string full = section.empty() ? key : section + "." + key;
      if (!t.kv_.emplace(full, raw).second)
        throw ParseError(where(path, lineno) + "duplicate key " + full);
    }
    return t;
  }

  bool has(const std::string& path) const { return kv_.count(path) > 0; }

  bool is_string(const std::string& path) const {
    auto it = kv_.find(path);
    return it != kv_.end() && it->second.quoted;
  }

  std::string str(const std::string& path) const {
    const Raw& r = get(path);
    if (!r.quoted)
      throw ParseError(path + ": expected a quoted string, got `" + r.text +
                       "`");
    return r.text;
  }

  std::string str_or(const std::string& path, const std::string& dflt) const {
    return has(path) ? str(path) : dflt;
  }

  double num(const std::string& path) const {
    const Raw& r = get(path);
    if (r.quoted) throw ParseError(path + ": expected a number, got a string");
    const char* begin = r.text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + r.text.size())
      throw ParseError(path + ": expected a number, got `" + r.text + "`");
    return v;
  }

  double num_or(const std::string& path, double dflt) const {
    return has(path) ? num(path) : dflt;
  }

  long long integer(const std::string& path) const {
    double v = num(path);
    long long i = static_cast<long long>(v);
    if (double(i) != v)
      throw ParseError(path + ": expected an integer, got `" + get(path).text +
                       "`");
    return i;
  }

  long long integer_or(const std::string& path, long long dflt) const {
    return has(path) ? integer(path) : dflt;
  }

  bool flag_or(const std::string& path, bool dflt) const {
    if (!has(path)) return dflt;
    const Raw& r = get(path);
    if (r.quoted || (r.text != "true" && r.text != "false"))
      throw ParseError(path + ": expected true or false, got `" + r.text +
                       "`");
    return r.text == "true";
  }

 private:
  struct Raw {
    std::string text;
    bool quoted = false;
  };

  const Raw& get(const std::string& path) const {
    auto it = kv_.find(path);
    if (it == kv_.end()) throw ParseError(path + ": missing required field");
    return it->second;
  }

  static std::string where(const std::string& path, int lineno) {
    return path + ":" + std::to_string(lineno) + ": ";
  }

  static std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  // drop everything from the first '#' that sits outside a quoted string
  static std::string strip_comment(const std::string& line,
                                   const std::string& path, int lineno) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    if (in_string)
      throw ParseError(where(path, lineno) + "unterminated string");
    return line;
  }

  std::map<std::string, Raw> kv_;
};

}  // namespace tomllite
