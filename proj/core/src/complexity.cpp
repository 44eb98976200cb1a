#include "syncomp/complexity.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace syncomp {

void ComplexityConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  const auto& w = isc_weights;
  if (!(w.sconj >= 0 && w.wh >= 0 && w.nonfinite >= 0 && w.nominal >= 0)) {
    throw std::invalid_argument("ISC weights must be non-negative");
  }
}

double syntactic_complexity(const TreeMetrics& metrics, const ComplexityConfig& config) {
  const double lambda = config.lambda;
  const double depth_term = (1.0 - lambda) * metrics.depth;
  if (metrics.head_count <= 0) return depth_term;
  return lambda * (static_cast<double>(metrics.length) / metrics.head_count) + depth_term;
}

namespace {

bool has_value(const Features& feats, const std::string& key, std::string_view wanted) {
  const auto it = feats.find(key);
  if (it == feats.end()) return false;
  std::string_view values = it->second;
  while (!values.empty()) {
    const auto comma = values.find(',');
    if (values.substr(0, comma) == wanted) return true;
    if (comma == std::string_view::npos) break;
    values.remove_prefix(comma + 1);
  }
  return false;
}

}  // namespace

double isc_score(const DepTree& tree, const ComplexityConfig& config) {
  int sconj = 0, wh = 0, nonfinite = 0, nominal = 0;
  for (const auto& t : tree.tokens) {
    if (t.upos == "SCONJ") ++sconj;
    if (has_value(t.feats, "PronType", "Int") || has_value(t.feats, "PronType", "Rel")) ++wh;
    if (t.upos == "VERB" || t.upos == "AUX") {
      const auto vf = t.feats.find("VerbForm");
      if (vf != t.feats.end() && vf->second != "Fin") ++nonfinite;
    }
    if (t.upos == "NOUN" || t.upos == "PROPN" || t.upos == "PRON") ++nominal;
  }
  const auto& w = config.isc_weights;
  return w.sconj * sconj + w.wh * wh + w.nonfinite * nonfinite + w.nominal * nominal;
}

const char* to_string(Role role) {
  return role == Role::kInitiator ? "initiator" : "follower";
}

Role role_from_string(const std::string& s) {
  if (s == "initiator") return Role::kInitiator;
  if (s == "follower") return Role::kFollower;
  throw std::invalid_argument("unknown role '" + s + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

void write_records_csv(std::ostream& os, const std::vector<ComplexityRecord>& records,
                       bool with_isc) {
  os << "dialogue_id,speaker,role,position,sc,length,heads,depth,branching";
  if (with_isc) os << ",isc";
  os << '\n';
  for (const auto& r : records) {
    for (const auto* field : {&r.dialogue_id, &r.speaker}) {
      if (field->find_first_of(",\r\n") != std::string::npos) {
        throw std::invalid_argument("identifier '" + *field + "' cannot be written to CSV");
      }
    }
    os << r.dialogue_id << ',' << r.speaker << ',' << to_string(r.role) << ',' << r.position
       << ',' << format_double(r.sc) << ',' << r.components.length << ','
       << r.components.head_count << ',' << r.components.depth << ','
       << format_double(r.components.branching_factor);
    if (with_isc) os << ',' << format_double(r.isc);
    os << '\n';
  }
}

namespace {

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw std::runtime_error("records CSV line " + std::to_string(line_no) +
                             ": bad number '" + s + "'");
  }
  return value;
}

}  // namespace

std::vector<ComplexityRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string base = "dialogue_id,speaker,role,position,sc,length,heads,depth,branching";
  const bool with_isc = line == base + ",isc";
  if (line != base && !with_isc) {
    throw std::runtime_error("records CSV: unexpected header '" + line + "'");
  }
  const std::size_t n_cols = with_isc ? 10 : 9;

  std::vector<ComplexityRecord> records;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != n_cols) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": expected " +
                               std::to_string(n_cols) + " columns");
    }
    ComplexityRecord r;
    r.dialogue_id = cols[0];
    r.speaker = cols[1];
    try {
      r.role = role_from_string(cols[2]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    r.position = parse_number<int>(cols[3], line_no);
    r.sc = parse_number<double>(cols[4], line_no);
    r.components.length = parse_number<int>(cols[5], line_no);
    r.components.head_count = parse_number<int>(cols[6], line_no);
    r.components.depth = parse_number<int>(cols[7], line_no);
    r.components.branching_factor = parse_number<double>(cols[8], line_no);
    if (with_isc) r.isc = parse_number<double>(cols[9], line_no);
    if (r.position < 1) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) +
                               ": position must be >= 1");
    }
    records.push_back(std::move(r));
  }

  std::map<std::pair<std::string, std::string>, int> totals;
  for (const auto& r : records) {
    auto& t = totals[{r.dialogue_id, r.speaker}];
    t = std::max(t, r.position);
  }
  for (auto& r : records) r.role_total = totals[{r.dialogue_id, r.speaker}];
  return records;
}

}  // namespace syncomp
