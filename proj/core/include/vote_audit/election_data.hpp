#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vote_audit {

using Count = std::int64_t;

enum class DistrictStatus { green, red, dubious };

std::string_view to_string(DistrictStatus status);

/// Valid-vote counts for one district, split into ballot (in-person) and mail
/// votes, with candidate 1's share of each. Candidate 2 holds the remainder.
struct DistrictRecord {
  std::string district_id;
  std::string name;
  Count ballot_total = 0;
  Count ballot_c1 = 0;
  Count mail_total = 0;
  Count mail_c1 = 0;
  DistrictStatus status = DistrictStatus::green;

  Count ballot_c2() const noexcept { return ballot_total - ballot_c1; }
  Count mail_c2() const noexcept { return mail_total - mail_c1; }
  Count total() const noexcept { return ballot_total + mail_total; }
  Count c1() const noexcept { return ballot_c1 + mail_c1; }
  Count c2() const noexcept { return ballot_c2() + mail_c2(); }

  // Candidate-1 shares in percent; 0 when the corresponding total is 0.
  double ballot_c1_percent() const noexcept;
  double mail_c1_percent() const noexcept;

  bool operator==(const DistrictRecord&) const = default;
};

/// Throws ParseError (line 0) if a record breaks the count invariants.
void validate(const DistrictRecord& record);

/// An immutable, validated set of districts with unique ids.
class ElectionDataset {
public:
  ElectionDataset() = default;
  /// Validates every record and id uniqueness; throws ParseError.
  explicit ElectionDataset(std::vector<DistrictRecord> districts);

  std::span<const DistrictRecord> districts() const noexcept { return districts_; }
  std::size_t size() const noexcept { return districts_.size(); }

  /// Candidate 2 total minus candidate 1 total over all districts.
  Count margin_official() const noexcept { return margin_; }

  std::size_t count(DistrictStatus status) const noexcept;

  bool operator==(const ElectionDataset& other) const { return districts_ == other.districts_; }

private:
  std::vector<DistrictRecord> districts_;
  Count margin_ = 0;
};

/// Which districts are treated as contaminated.
enum class Variant {
  red_only,         ///< the court's sentence (dubious districts count as green)
  red_and_dubious,  ///< dubious districts join the contaminated set
};

std::string_view to_string(Variant variant);

struct Partition {
  std::vector<DistrictRecord> green;
  std::vector<DistrictRecord> red;
};

Partition partition(const ElectionDataset& dataset, Variant variant);

struct RedAggregate {
  Count ballot_c1 = 0;
  Count mail_total = 0;
  Count mail_c1 = 0;
};

/// Componentwise sums over the contaminated districts. Throws
/// InsufficientDataError on an empty list.
RedAggregate aggregate_red(std::span<const DistrictRecord> red);

enum class WinRule {
  half_margin_rounded_up,  ///< ceil(margin / 2): a tie suffices on even margins
  strict_win,              ///< floor(margin / 2) + 1
};

/// Additional candidate-1 mail votes needed in the red districts to overturn
/// the official margin. Throws DomainError if candidate 2 does not lead.
Count votes_needed(Count margin_official, WinRule rule = WinRule::half_margin_rounded_up);

/// Counted red-district candidate-1 mail votes plus votes_needed().
Count reversal_threshold(const ElectionDataset& dataset, std::span<const DistrictRecord> red,
                         WinRule rule = WinRule::half_margin_rounded_up);

// CSV dialect:
//   district_id,name,ballot_total,ballot_c1,mail_total,mail_c1,status
// LF or CRLF, trailing newline optional, double-quoted fields accepted.
inline constexpr std::string_view kCsvHeader =
    "district_id,name,ballot_total,ballot_c1,mail_total,mail_c1,status";

ElectionDataset parse_dataset(std::istream& in);
ElectionDataset parse_dataset(std::string_view text);
ElectionDataset load_dataset(const std::string& path);

void write_dataset(std::ostream& out, const ElectionDataset& dataset);
std::string to_csv(const ElectionDataset& dataset);

}  // namespace vote_audit
