#include "autotest/validators.hpp"

#include <array>
#include <utility>

namespace autotest {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Splits on a single separator char.
std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

bool valid_ymd(int y, int m, int d) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int limit = kDays[static_cast<std::size_t>(m - 1)];
  if (m == 2 && leap(y)) limit = 29;
  return d <= limit;
}

bool valid_year_field(std::string_view s) {
  return all_digits(s) && (s.size() == 2 || s.size() == 4);
}

int expand_year(std::string_view s) {
  const int y = to_int(s);
  return s.size() == 2 ? 2000 + y : y;
}

bool valid_day_or_month_field(std::string_view s) {
  return all_digits(s) && s.size() <= 2;
}

bool valid_time(std::string_view t) {
  // hh:mm[:ss[.frac]]
  if (t.size() < 5 || !is_digit(t[0]) || !is_digit(t[1]) || t[2] != ':' ||
      !is_digit(t[3]) || !is_digit(t[4])) {
    return false;
  }
  if (to_int(t.substr(0, 2)) > 23 || to_int(t.substr(3, 2)) > 59) return false;
  std::string_view rest = t.substr(5);
  if (rest.empty()) return true;
  if (rest.size() < 3 || rest[0] != ':' || !is_digit(rest[1]) ||
      !is_digit(rest[2]) || to_int(rest.substr(1, 2)) > 60) {
    return false;
  }
  rest = rest.substr(3);
  if (rest.empty()) return true;
  return rest[0] == '.' && all_digits(rest.substr(1));
}

bool valid_iso_date(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  auto y = d.substr(0, 4), m = d.substr(5, 2), day = d.substr(8, 2);
  return all_digits(y) && all_digits(m) && all_digits(day) &&
         valid_ymd(to_int(y), to_int(m), to_int(day));
}

bool valid_hostname(std::string_view host) {
  if (host == "localhost") return true;
  auto labels = split(host, '.');
  if (labels.size() < 2) return false;
  for (auto label : labels) {
    if (label.empty() || label.size() > 63 || label.front() == '-' ||
        label.back() == '-') {
      return false;
    }
    for (char c : label) {
      if (!is_alnum(c) && c != '-') return false;
    }
  }
  const auto tld = labels.back();
  for (char c : tld) {
    if (is_digit(c)) return validate_ipv4(host);
  }
  return true;
}

}  // namespace

bool validate_date(std::string_view v) {
  if (valid_iso_date(v)) return true;
  for (char sep : {'/', '-', '.'}) {
    auto parts = split(v, sep);
    if (parts.size() != 3) continue;
    // yyyy/mm/dd
    if (parts[0].size() == 4 && all_digits(parts[0]) &&
        valid_day_or_month_field(parts[1]) &&
        valid_day_or_month_field(parts[2]) &&
        valid_ymd(to_int(parts[0]), to_int(parts[1]), to_int(parts[2]))) {
      return true;
    }
    if (!valid_year_field(parts[2]) || !valid_day_or_month_field(parts[0]) ||
        !valid_day_or_month_field(parts[1])) {
      continue;
    }
    const int y = expand_year(parts[2]);
    const int a = to_int(parts[0]);
    const int b = to_int(parts[1]);
    // Month-first or day-first, whichever is a real calendar date.
    if (valid_ymd(y, a, b) || valid_ymd(y, b, a)) return true;
  }
  return false;
}

bool validate_iso_timestamp(std::string_view v) {
  if (v.size() < 16 || !valid_iso_date(v.substr(0, 10))) return false;
  if (v[10] != 't' && v[10] != 'T' && v[10] != ' ') return false;
  std::string_view time = v.substr(11);
  // Optional zone suffix: z, +hh:mm, -hh:mm
  if (!time.empty() && (time.back() == 'z' || time.back() == 'Z')) {
    time.remove_suffix(1);
  } else if (time.size() > 6) {
    auto zone = time.substr(time.size() - 6);
    if ((zone[0] == '+' || zone[0] == '-') && is_digit(zone[1]) &&
        is_digit(zone[2]) && zone[3] == ':' && is_digit(zone[4]) &&
        is_digit(zone[5])) {
      time.remove_suffix(6);
    }
  }
  return valid_time(time);
}

bool validate_url(std::string_view v) {
  std::string_view rest;
  for (std::string_view scheme : {"http://", "https://", "ftp://"}) {
    if (v.substr(0, scheme.size()) == scheme) {
      rest = v.substr(scheme.size());
      break;
    }
  }
  if (rest.empty()) return false;
  for (char c : rest) {
    if (c == ' ' || c == '\t' || c == '"' || c == '<' || c == '>') {
      return false;
    }
  }
  std::size_t host_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, host_end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (!all_digits(port) || port.size() > 5) return false;
    authority = authority.substr(0, colon);
  }
  return valid_hostname(authority);
}

bool validate_email(std::string_view v) {
  auto at = v.find('@');
  if (at == std::string_view::npos || at == 0 ||
      v.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  auto local = v.substr(0, at);
  auto domain = v.substr(at + 1);
  if (local.front() == '.' || local.back() == '.') return false;
  for (char c : local) {
    if (!is_alnum(c) && std::string_view("._%+-").find(c) ==
                            std::string_view::npos) {
      return false;
    }
  }
  auto labels = split(domain, '.');
  if (labels.size() < 2) return false;
  for (auto label : labels) {
    if (label.empty() || label.front() == '-' || label.back() == '-') {
      return false;
    }
    for (char c : label) {
      if (!is_alnum(c) && c != '-') return false;
    }
  }
  const auto tld = labels.back();
  if (tld.size() < 2) return false;
  for (char c : tld) {
    if (is_digit(c) || c == '-') return false;
  }
  return true;
}

bool validate_ipv4(std::string_view v) {
  auto parts = split(v, '.');
  if (parts.size() != 4) return false;
  for (auto p : parts) {
    if (!all_digits(p) || p.size() > 3) return false;
    if (p.size() > 1 && p[0] == '0') return false;
    if (to_int(p) > 255) return false;
  }
  return true;
}

bool validate_uuid(std::string_view v) {
  static constexpr std::array<std::size_t, 5> kGroups = {8, 4, 4, 4, 12};
  auto parts = split(v, '-');
  if (parts.size() != kGroups.size()) return false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != kGroups[i]) return false;
    for (char c : parts[i]) {
      if (!is_hex(c)) return false;
    }
  }
  return true;
}

bool luhn_checksum_ok(std::string_view digits) {
  int sum = 0;
  bool dbl = false;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    int d = *it - '0';
    if (dbl) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    sum += d;
    dbl = !dbl;
  }
  return sum % 10 == 0;
}

bool validate_credit_card(std::string_view v) {
  std::string digits;
  char sep = 0;
  char prev = 0;
  for (char c : v) {
    if (is_digit(c)) {
      digits.push_back(c);
    } else if (c == ' ' || c == '-') {
      // One consistent separator, never doubled or leading.
      if (prev == 0 || !is_digit(prev)) return false;
      if (sep != 0 && sep != c) return false;
      sep = c;
    } else {
      return false;
    }
    prev = c;
  }
  if (prev != 0 && !is_digit(prev)) return false;
  if (digits.size() < 13 || digits.size() > 19) return false;
  return luhn_checksum_ok(digits);
}

bool validate_upc_a(std::string_view v) {
  if (v.size() != 12 || !all_digits(v)) return false;
  int odd = 0;
  int even = 0;
  for (std::size_t i = 0; i < 11; ++i) {
    (i % 2 == 0 ? odd : even) += v[i] - '0';
  }
  const int check = (10 - (3 * odd + even) % 10) % 10;
  return check == v[11] - '0';
}

namespace {

const std::vector<std::pair<std::string, ValidatorFn>>& registry() {
  static const std::vector<std::pair<std::string, ValidatorFn>> kRegistry = {
      {"date", &validate_date},
      {"iso_timestamp", &validate_iso_timestamp},
      {"url", &validate_url},
      {"email", &validate_email},
      {"ipv4", &validate_ipv4},
      {"uuid", &validate_uuid},
      {"credit_card", &validate_credit_card},
      {"upc_a", &validate_upc_a},
  };
  return kRegistry;
}

}  // namespace

const std::vector<std::string>& validator_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
  }();
  return kNames;
}

ValidatorFn find_validator(std::string_view name) {
  for (const auto& [n, fn] : registry()) {
    if (n == name) return fn;
  }
  return nullptr;
}

}  // namespace autotest
