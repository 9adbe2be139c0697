#include "vote_audit/election_data.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "vote_audit/errors.hpp"

namespace vote_audit {
namespace {

constexpr std::size_t kColumns = 7;

std::string_view check_record(const DistrictRecord& r) {
  if (r.district_id.empty()) return "empty district_id";
  if (r.district_id.find_first_of("\r\n") != std::string::npos || r.name.find_first_of("\r\n") != std::string::npos)
    return "line breaks are not allowed in district_id or name";
  if (r.ballot_total < 0 || r.ballot_c1 < 0 || r.mail_total < 0 || r.mail_c1 < 0)
    return "counts must be non-negative";
  if (r.ballot_c1 > r.ballot_total) return "ballot votes for candidate exceed ballot total";
  if (r.mail_c1 > r.mail_total) return "mail votes for candidate exceed mail total";
  return {};
}

// Splits one CSV line; handles double-quoted fields with "" escapes.
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      if (!current.empty() || field_was_quoted) throw ParseError(line_no, "stray quote inside field");
      quoted = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
      field_was_quoted = false;
    } else {
      if (field_was_quoted) throw ParseError(line_no, "characters after closing quote");
      current.push_back(ch);
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

Count parse_count(const std::string& field, std::string_view column, std::size_t line_no) {
  Count value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  // from_chars accepts a leading '-', which we reject along with everything
  // else that is not a plain run of ASCII digits.
  const bool digits_only = !field.empty() && field.find_first_not_of("0123456789") == std::string::npos;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (!digits_only || ec != std::errc{} || ptr != last)
    throw ParseError(line_no, "bad integer in column " + std::string(column) + ": '" + field + "'");
  return value;
}

DistrictStatus parse_status(const std::string& token, std::size_t line_no) {
  if (token == "green") return DistrictStatus::green;
  if (token == "red") return DistrictStatus::red;
  if (token == "dubious") return DistrictStatus::dubious;
  throw ParseError(line_no, "unknown status token '" + token + "'");
}

void write_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char ch : field) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

}  // namespace

std::string_view to_string(DistrictStatus status) {
  switch (status) {
    case DistrictStatus::green: return "green";
    case DistrictStatus::red: return "red";
    case DistrictStatus::dubious: return "dubious";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  return variant == Variant::red_only ? "red_only" : "red_and_dubious";
}

double DistrictRecord::ballot_c1_percent() const noexcept {
  return ballot_total == 0 ? 0.0 : 100.0 * static_cast<double>(ballot_c1) / static_cast<double>(ballot_total);
}

double DistrictRecord::mail_c1_percent() const noexcept {
  return mail_total == 0 ? 0.0 : 100.0 * static_cast<double>(mail_c1) / static_cast<double>(mail_total);
}

void validate(const DistrictRecord& record) {
  if (auto reason = check_record(record); !reason.empty())
    throw ParseError(0, "district '" + record.district_id + "': " + std::string(reason));
}

ElectionDataset::ElectionDataset(std::vector<DistrictRecord> districts) : districts_(std::move(districts)) {
  std::unordered_set<std::string> seen;
  for (const auto& d : districts_) {
    validate(d);
    if (!seen.insert(d.district_id).second)
      throw ParseError(0, "duplicate district_id '" + d.district_id + "'");
    margin_ += d.c2() - d.c1();
  }
}

std::size_t ElectionDataset::count(DistrictStatus status) const noexcept {
  std::size_t n = 0;
  for (const auto& d : districts_) n += d.status == status ? 1 : 0;
  return n;
}

Partition partition(const ElectionDataset& dataset, Variant variant) {
  Partition out;
  for (const auto& d : dataset.districts()) {
    const bool contaminated = d.status == DistrictStatus::red ||
                              (variant == Variant::red_and_dubious && d.status == DistrictStatus::dubious);
    (contaminated ? out.red : out.green).push_back(d);
  }
  return out;
}

RedAggregate aggregate_red(std::span<const DistrictRecord> red) {
  if (red.empty()) throw InsufficientDataError("no contaminated districts to aggregate");
  RedAggregate agg;
  for (const auto& d : red) {
    agg.ballot_c1 += d.ballot_c1;
    agg.mail_total += d.mail_total;
    agg.mail_c1 += d.mail_c1;
  }
  return agg;
}

Count votes_needed(Count margin_official, WinRule rule) {
  if (margin_official <= 0)
    throw DomainError("candidate 2 does not lead; there is no result to reverse");
  return rule == WinRule::half_margin_rounded_up ? (margin_official + 1) / 2 : margin_official / 2 + 1;
}

Count reversal_threshold(const ElectionDataset& dataset, std::span<const DistrictRecord> red, WinRule rule) {
  const Count needed = votes_needed(dataset.margin_official(), rule);
  return aggregate_red(red).mail_c1 + needed;
}

ElectionDataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<DistrictRecord> records;
  std::unordered_set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (line != kCsvHeader) throw ParseError(line_no, "missing or malformed header; expected '" + std::string(kCsvHeader) + "'");
      have_header = true;
      continue;
    }
    if (line.empty()) continue;

    auto fields = split_fields(line, line_no);
    if (fields.size() != kColumns)
      throw ParseError(line_no, "missing column: expected " + std::to_string(kColumns) + " fields, found " +
                                    std::to_string(fields.size()));

    DistrictRecord r;
    r.district_id = std::move(fields[0]);
    r.name = std::move(fields[1]);
    r.ballot_total = parse_count(fields[2], "ballot_total", line_no);
    r.ballot_c1 = parse_count(fields[3], "ballot_c1", line_no);
    r.mail_total = parse_count(fields[4], "mail_total", line_no);
    r.mail_c1 = parse_count(fields[5], "mail_c1", line_no);
    r.status = parse_status(fields[6], line_no);

    if (auto reason = check_record(r); !reason.empty()) throw ParseError(line_no, std::string(reason));
    if (!seen.insert(r.district_id).second)
      throw ParseError(line_no, "duplicate district_id '" + r.district_id + "'");
    records.push_back(std::move(r));
  }
  if (!have_header) throw ParseError(1, "empty input; header required");
  return ElectionDataset(std::move(records));
}

ElectionDataset parse_dataset(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in);
}

ElectionDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const ElectionDataset& dataset) {
  out << kCsvHeader << '\n';
  for (const auto& d : dataset.districts()) {
    write_field(out, d.district_id);
    out << ',';
    write_field(out, d.name);
    out << ',' << d.ballot_total << ',' << d.ballot_c1 << ',' << d.mail_total << ',' << d.mail_c1 << ','
        << to_string(d.status) << '\n';
  }
}

std::string to_csv(const ElectionDataset& dataset) {
  std::ostringstream out;
  write_dataset(out, dataset);
  return out.str();
}

}  // namespace vote_audit
