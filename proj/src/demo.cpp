#include "autotest/demo.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>

#include "autotest/common.hpp"
#include "autotest/validators.hpp"
#include "json.hpp"

namespace autotest {

using json = nlohmann::json;

namespace {

const std::map<std::string, std::vector<std::string>>& vocabularies() {
  static const std::map<std::string, std::vector<std::string>> v{
      {"month",
       {"january", "february", "march", "april", "may", "june", "july",
        "august", "september", "october", "november", "december", "jan",
        "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov",
        "dec"}},
      {"weekday",
       {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
        "sunday", "mon", "tue", "tues", "wed", "thu", "thur", "thurs", "fri",
        "sat", "sun"}},
      {"city",
       {"seattle", "boston", "chicago", "houston", "phoenix", "denver",
        "atlanta", "miami", "dallas", "portland", "austin", "detroit",
        "memphis", "baltimore", "milwaukee", "albuquerque", "tucson",
        "fresno", "sacramento", "omaha", "oakland", "minneapolis", "tulsa",
        "cleveland", "wichita", "honolulu", "anaheim", "tampa", "pittsburgh",
        "cincinnati", "toledo", "buffalo", "madison", "orlando", "richmond",
        "spokane", "boise", "reno", "tacoma", "savannah"}},
      {"country",
       {"france", "germany", "italy", "spain", "portugal", "canada", "mexico",
        "brazil", "argentina", "chile", "peru", "japan", "china", "india",
        "russia", "egypt", "kenya", "nigeria", "morocco", "norway", "sweden",
        "finland", "denmark", "poland", "austria", "belgium", "netherlands",
        "ireland", "greece", "turkey", "iran", "iraq", "israel", "thailand",
        "vietnam", "indonesia", "australia", "zealand", "colombia",
        "venezuela"}},
      {"color",
       {"red", "blue", "green", "yellow", "orange", "purple", "pink", "brown",
        "black", "white", "gray", "grey", "cyan", "magenta", "violet",
        "indigo", "maroon", "navy", "teal", "olive", "beige", "turquoise",
        "lavender", "crimson"}},
      {"fruit",
       {"apple", "banana", "cherry", "grape", "lemon", "lime", "mango",
        "melon", "peach", "pear", "plum", "kiwi", "papaya", "guava", "apricot",
        "fig", "date", "coconut", "pineapple", "strawberry", "blueberry",
        "raspberry", "watermelon", "pomegranate"}},
      {"animal",
       {"dog", "cat", "horse", "cow", "sheep", "goat", "pig", "lion", "tiger",
        "bear", "wolf", "fox", "deer", "rabbit", "mouse", "rat", "squirrel",
        "elephant", "giraffe", "zebra", "monkey", "gorilla", "kangaroo",
        "koala", "panda", "otter", "beaver", "moose", "camel", "donkey"}},
      {"first_name",
       {"james", "mary", "john", "patricia", "robert", "jennifer", "michael",
        "linda", "william", "elizabeth", "david", "barbara", "richard",
        "susan", "joseph", "jessica", "thomas", "sarah", "charles", "karen",
        "christopher", "nancy", "daniel", "lisa", "matthew", "betty",
        "anthony", "margaret", "mark", "sandra", "donald", "ashley", "steven",
        "kimberly", "paul", "emily", "andrew", "donna", "joshua", "michelle"}},
  };
  return v;
}

const std::vector<std::string>& state_codes() {
  static const std::vector<std::string> v{
      "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
      "HI", "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD",
      "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
      "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC",
      "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};
  return v;
}

const std::vector<std::string>& formatted_domains() {
  static const std::vector<std::string> v{
      "date_us", "date_iso", "timestamp", "url",    "email",  "ipv4",
      "uuid",    "movie_id", "patients",  "code",   "credit_card", "phone"};
  return v;
}

std::string pick(Rng& rng, const std::vector<std::string>& xs) {
  return xs[rng.uniform_index(xs.size())];
}

int between(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));
}

std::string printf_str(const char* fmt, auto... args) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string lower_word(Rng& rng, int lo, int hi) {
  std::string s;
  const int n = between(rng, lo, hi);
  for (int i = 0; i < n; ++i) s += static_cast<char>('a' + rng.uniform_index(26));
  return s;
}

std::string hex_digits(Rng& rng, int n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < n; ++i) s += digits[rng.uniform_index(16)];
  return s;
}

std::string credit_card(Rng& rng) {
  std::string digits = "4";
  for (int i = 0; i < 14; ++i) digits += static_cast<char>('0' + rng.uniform_index(10));
  for (char check = '0'; check <= '9'; ++check) {
    if (luhn_checksum_ok(digits + check)) {
      digits += check;
      break;
    }
  }
  return digits.substr(0, 4) + " " + digits.substr(4, 4) + " " +
         digits.substr(8, 4) + " " + digits.substr(12, 4);
}

std::string formatted_value(Rng& rng, const std::string& domain) {
  static const std::vector<std::string> tlds{"com", "org", "net", "io", "edu"};
  if (domain == "date_us") {
    return printf_str("%d/%d/%d", between(rng, 1, 12), between(rng, 1, 28),
                      between(rng, 1950, 2024));
  }
  if (domain == "date_iso") {
    return printf_str("%04d-%02d-%02d", between(rng, 1950, 2024),
                      between(rng, 1, 12), between(rng, 1, 28));
  }
  if (domain == "timestamp") {
    return printf_str("%04d-%02d-%02dT%02d:%02d:%02dZ", between(rng, 2000, 2024),
                      between(rng, 1, 12), between(rng, 1, 28),
                      between(rng, 0, 23), between(rng, 0, 59),
                      between(rng, 0, 59));
  }
  if (domain == "url") {
    return "https://www." + lower_word(rng, 4, 10) + "." + pick(rng, tlds) +
           "/" + lower_word(rng, 3, 8);
  }
  if (domain == "email") {
    return lower_word(rng, 3, 8) + "." + lower_word(rng, 3, 8) + "@" +
           lower_word(rng, 4, 9) + "." + pick(rng, tlds);
  }
  if (domain == "ipv4") {
    return printf_str("%d.%d.%d.%d", between(rng, 1, 223), between(rng, 0, 255),
                      between(rng, 0, 255), between(rng, 1, 254));
  }
  if (domain == "uuid") {
    return hex_digits(rng, 8) + "-" + hex_digits(rng, 4) + "-4" +
           hex_digits(rng, 3) + "-a" + hex_digits(rng, 3) + "-" +
           hex_digits(rng, 12);
  }
  if (domain == "movie_id") return printf_str("tt%07d", between(rng, 0, 9999999));
  if (domain == "patients") return printf_str("%d patients", between(rng, 2, 999));
  if (domain == "code") {
    std::string s;
    s += static_cast<char>('A' + rng.uniform_index(26));
    s += static_cast<char>('A' + rng.uniform_index(26));
    return s + printf_str("-%04d", between(rng, 0, 9999));
  }
  if (domain == "credit_card") return credit_card(rng);
  if (domain == "phone") {
    return printf_str("(%03d) %03d-%04d", between(rng, 201, 989),
                      between(rng, 200, 999), between(rng, 0, 9999));
  }
  throw std::logic_error("unknown demo domain " + domain);
}

double gaussian(Rng& rng) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::shared_ptr<const EmbeddingSpace> toy_embedding(std::size_t dim,
                                                    std::uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0x656d62ULL));
  auto space = std::make_shared<EmbeddingSpace>();
  space->id = "toy";
  space->dimension = dim;
  for (const auto& [domain, words] : vocabularies()) {
    std::vector<double> center(dim);
    for (auto& x : center) x = 4.0 * gaussian(rng);
    for (const auto& w : words) {
      if (space->vectors.count(w)) continue;
      std::vector<double> v(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        // Rounded so the text file round-trips exactly.
        v[k] = std::round((center[k] + 0.3 * gaussian(rng)) * 1e4) / 1e4;
      }
      space->vectors.emplace(w, std::move(v));
    }
  }
  return space;
}

std::string cased(Rng& rng, const std::string& word) {
  // Mix of lower, Title and UPPER surface forms.
  const auto r = rng.uniform_index(3);
  std::string s = word;
  if (r == 1) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (r == 2) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

}  // namespace

std::vector<std::string> demo_domain_names(bool vocabulary_domains) {
  std::vector<std::string> names;
  if (vocabulary_domains) {
    for (const auto& [domain, _] : vocabularies()) names.push_back(domain);
    names.push_back("state");
  }
  for (const auto& d : formatted_domains()) names.push_back(d);
  return names;
}

DemoData make_demo_data(const DemoOptions& opts) {
  if (opts.min_length == 0 || opts.min_length > opts.max_length) {
    throw std::invalid_argument("bad demo column length range");
  }
  DemoData data;
  data.embedding = toy_embedding(opts.embedding_dim, opts.seed);
  Rng score_rng(splitmix64(opts.seed ^ 0x73636fULL));
  for (const auto& w : vocabularies().at("country")) {
    data.score_tables["country"][w] = 0.85 + 0.15 * score_rng.uniform01();
  }
  for (const auto& s : state_codes()) {
    data.score_tables["state"][casefold(s)] = 0.85 + 0.15 * score_rng.uniform01();
  }

  const auto names = demo_domain_names(opts.vocabulary_domains);
  Rng rng(opts.seed);
  for (std::size_t c = 0; c < opts.columns; ++c) {
    const std::string& domain = names[c % names.size()];
    const std::size_t len =
        opts.min_length + rng.uniform_index(opts.max_length - opts.min_length + 1);
    Column col;
    col.id = "col" + std::to_string(c);
    col.header = domain;
    const auto vocab = vocabularies().find(domain);
    const bool upper_case = rng.uniform_index(2) == 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (vocab != vocabularies().end()) {
        col.values.push_back(cased(rng, pick(rng, vocab->second)));
      } else if (domain == "state") {
        const auto s = pick(rng, state_codes());
        col.values.push_back(upper_case ? s : casefold(s));
      } else {
        col.values.push_back(formatted_value(rng, domain));
      }
    }
    data.corpus.add(std::move(col));
    data.domains.push_back(domain);
  }
  return data;
}

void write_demo_files(const DemoData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus_jsonl(data.corpus, dir / "corpus.jsonl");
  {
    std::ofstream out(dir / "embeddings.txt");
    std::vector<std::string> tokens;
    for (const auto& [t, _] : data.embedding->vectors) tokens.push_back(t);
    std::sort(tokens.begin(), tokens.end());
    for (const auto& t : tokens) {
      out << t;
      for (double x : data.embedding->vectors.at(t)) out << ' ' << format_real(x);
      out << '\n';
    }
  }
  json tables = json::array();
  for (const auto& [type, scores] : data.score_tables) {
    const auto file = "score_" + type + ".jsonl";
    std::ofstream out(dir / file);
    std::map<std::string, double> ordered(scores.begin(), scores.end());
    for (const auto& [v, s] : ordered) {
      out << json{{"value", v}, {"score", s}}.dump() << '\n';
    }
    tables.push_back({{"type", type}, {"path", file}});
  }
  const json config{
      {"version", 1},
      {"corpus", {{"path", "corpus.jsonl"}, {"format", "jsonl"}}},
      {"embeddings", json::array({{{"id", data.embedding->id},
                                   {"path", "embeddings.txt"},
                                   {"centroids", 60}}})},
      {"score_tables", tables},
      {"patterns", {{"top_k", 40}}},
      {"validators", "all"},
      {"seed", 7},
      {"workers", 1},
  };
  std::ofstream(dir / "config.json") << config.dump(2) << '\n';
}

}  // namespace autotest
