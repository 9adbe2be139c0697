#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>

#include "support/test_support.hpp"
#include "vote_audit/election_data.hpp"
#include "vote_audit/errors.hpp"

using namespace vote_audit;
using vote_audit::testing::fixture_path;
using vote_audit::testing::make_district;

namespace {

std::string with_header(const std::string& body) { return std::string(kCsvHeader) + "\n" + body; }

// Returns the ParseError thrown by parsing `text`, or fails the test.
ParseError parse_failure(const std::string& text) {
  try {
    parse_dataset(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ParseError for:\n" << text;
  return ParseError(0, "");
}

}  // namespace

TEST(ParseDataset, SingleRow) {
  const auto ds = parse_dataset(with_header("10101,ExampleTown,1000,400,200,80,green\n"));
  ASSERT_EQ(ds.size(), 1u);
  const auto& d = ds.districts()[0];
  EXPECT_EQ(d.district_id, "10101");
  EXPECT_EQ(d.name, "ExampleTown");
  EXPECT_EQ(d.mail_c2(), 120);
  EXPECT_EQ(d.ballot_c2(), 600);
  EXPECT_EQ(d.total(), 1200);
  EXPECT_EQ(d.c1() + d.c2(), d.total());
  EXPECT_EQ(d.status, DistrictStatus::green);
}

TEST(ParseDataset, MailCountInversionNamesTheLine) {
  const auto e = parse_failure(with_header("a,A,10,5,200,80,green\nb,B,10,5,200,250,red\n"));
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.reason(), "mail votes for candidate exceed mail total");
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
}

TEST(ParseDataset, RejectsMalformedRows) {
  EXPECT_EQ(parse_failure(with_header("a,A,10,x5,20,8,green\n")).line(), 2u);
  EXPECT_NE(parse_failure(with_header("a,A,10,-5,20,8,green\n")).reason().find("bad integer"), std::string::npos);
  EXPECT_NE(parse_failure(with_header("a,A,10,5,20,8,blue\n")).reason().find("unknown status"), std::string::npos);
  EXPECT_NE(parse_failure(with_header("a,A,10,5,20,8\n")).reason().find("missing column"), std::string::npos);
  EXPECT_NE(parse_failure(with_header("a,A,10,5,20,8,green\na,B,1,1,1,1,red\n")).reason().find("duplicate"),
            std::string::npos);
  EXPECT_NE(parse_failure(with_header("a,A,10,11,20,8,green\n")).reason().find("ballot"), std::string::npos);
  EXPECT_EQ(parse_failure("id,name\n").line(), 1u);
  EXPECT_EQ(parse_failure("").line(), 1u);
  EXPECT_NE(parse_failure(with_header("a,\"A,10,5,20,8,green\n")).reason().find("unterminated"), std::string::npos);
  EXPECT_EQ(parse_failure(with_header("a,A,99999999999999999999,5,20,8,green\n")).line(), 2u);
}

TEST(ParseDataset, AcceptsDialectVariants) {
  const std::string lf = with_header("a,A,10,5,20,8,green\nb,B,30,9,0,0,dubious");
  const std::string crlf = std::string(kCsvHeader) + "\r\na,A,10,5,20,8,green\r\nb,B,30,9,0,0,dubious\r\n";
  const std::string quoted = with_header("\"a\",\"A\",10,5,20,8,green\n\"b\",B,30,9,0,0,dubious\n\n");
  const std::string bom = "\xEF\xBB\xBF" + lf;
  const auto ref = parse_dataset(lf);
  EXPECT_EQ(parse_dataset(crlf), ref);
  EXPECT_EQ(parse_dataset(quoted), ref);
  EXPECT_EQ(parse_dataset(bom), ref);
  EXPECT_EQ(ref.count(DistrictStatus::dubious), 1u);
}

TEST(ParseDataset, QuotedNamesWithCommas) {
  const auto ds = parse_dataset(with_header("x,\"Town, \"\"Upper\"\"\",10,5,20,8,red\n"));
  EXPECT_EQ(ds.districts()[0].name, "Town, \"Upper\"");
  EXPECT_EQ(parse_dataset(to_csv(ds)), ds);
}

TEST(Fixture, CountsAndPartitions) {
  const auto ds = load_dataset(fixture_path());
  EXPECT_EQ(ds.size(), 117u);
  EXPECT_EQ(ds.count(DistrictStatus::red), 11u);
  EXPECT_EQ(ds.count(DistrictStatus::dubious), 3u);
  EXPECT_EQ(ds.count(DistrictStatus::green), 103u);
  EXPECT_EQ(ds.margin_official(), 30863);

  const auto m11 = partition(ds, Variant::red_only);
  EXPECT_EQ(m11.green.size(), 106u);
  EXPECT_EQ(m11.red.size(), 11u);
  const auto m14 = partition(ds, Variant::red_and_dubious);
  EXPECT_EQ(m14.green.size(), 103u);
  EXPECT_EQ(m14.red.size(), 14u);

  const auto agg = aggregate_red(m11.red);
  EXPECT_EQ(agg.mail_c1, 34479);
  EXPECT_EQ(agg.mail_total, 77769);
  EXPECT_EQ(votes_needed(ds.margin_official()), 15432);
  EXPECT_EQ(reversal_threshold(ds, m11.red), 49911);
}

TEST(Partition, NeverDropsOrDuplicates) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ds = vote_audit::testing::random_dataset(rng);
    for (auto v : {Variant::red_only, Variant::red_and_dubious}) {
      const auto p = partition(ds, v);
      ASSERT_EQ(p.green.size() + p.red.size(), ds.size());
      std::vector<std::string> ids;
      for (const auto& d : p.green) ids.push_back(d.district_id);
      for (const auto& d : p.red) ids.push_back(d.district_id);
      std::sort(ids.begin(), ids.end());
      EXPECT_EQ(std::adjacent_find(ids.begin(), ids.end()), ids.end());
    }
  }
}

TEST(Partition, FlagIrrelevantWithoutDubious) {
  const ElectionDataset ds({make_district("a", 10, 5, 4, 2), make_district("b", 10, 5, 4, 2, DistrictStatus::red),
                            make_district("c", 10, 5, 4, 2)});
  const auto a = partition(ds, Variant::red_only);
  const auto b = partition(ds, Variant::red_and_dubious);
  EXPECT_EQ(a.green, b.green);
  EXPECT_EQ(a.red, b.red);
}

TEST(AggregateRed, SingleDistrictAndEmpty) {
  const std::vector<DistrictRecord> one{make_district("a", 10, 4, 6, 2, DistrictStatus::red)};
  const auto agg = aggregate_red(one);
  EXPECT_EQ(agg.ballot_c1, 4);
  EXPECT_EQ(agg.mail_total, 6);
  EXPECT_EQ(agg.mail_c1, 2);
  EXPECT_THROW(aggregate_red(std::vector<DistrictRecord>{}), InsufficientDataError);
}

TEST(AggregateRed, PermutationInvariant) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ds = vote_audit::testing::random_dataset(rng);
    std::vector<DistrictRecord> all(ds.districts().begin(), ds.districts().end());
    const auto ref = aggregate_red(all);
    std::shuffle(all.begin(), all.end(), rng);
    const auto shuffled = aggregate_red(all);
    EXPECT_EQ(shuffled.ballot_c1, ref.ballot_c1);
    EXPECT_EQ(shuffled.mail_total, ref.mail_total);
    EXPECT_EQ(shuffled.mail_c1, ref.mail_c1);
  }
}

TEST(ReversalThreshold, Arithmetic) {
  EXPECT_EQ(votes_needed(30863), 15432);
  EXPECT_EQ(votes_needed(2), 1);
  EXPECT_EQ(votes_needed(1), 1);
  EXPECT_EQ(votes_needed(2, WinRule::strict_win), 2);
  EXPECT_EQ(votes_needed(30863, WinRule::strict_win), 15432);
  EXPECT_THROW(votes_needed(0), DomainError);
  EXPECT_THROW(votes_needed(-5), DomainError);

  // margin 2 (candidate 2: 11, candidate 1: 9), red counted mail votes 10
  const ElectionDataset ds({make_district("g", 0, 0, 10, 0), make_district("r", 0, 0, 10, 9, DistrictStatus::red)});
  ASSERT_EQ(ds.margin_official(), 2);
  std::vector<DistrictRecord> red{ds.districts()[1]};
  red[0].mail_c1 = 10;
  EXPECT_EQ(reversal_threshold(ds, red), 11);
}

TEST(Percentages, GuardedAndBounded) {
  const auto zero = make_district("z", 0, 0, 0, 0);
  EXPECT_EQ(zero.ballot_c1_percent(), 0.0);
  EXPECT_EQ(zero.mail_c1_percent(), 0.0);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep)
    for (const auto& d : vote_audit::testing::random_dataset(rng).districts()) {
      EXPECT_GE(d.ballot_c1_percent(), 0.0);
      EXPECT_LE(d.ballot_c1_percent(), 100.0);
      EXPECT_GE(d.mail_c1_percent(), 0.0);
      EXPECT_LE(d.mail_c1_percent(), 100.0);
    }
}

TEST(RoundTrip, SerializeParseIsIdentity) {
  const auto fixture = load_dataset(fixture_path());
  EXPECT_EQ(parse_dataset(to_csv(fixture)), fixture);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const auto ds = vote_audit::testing::random_dataset(rng);
    const std::string once = to_csv(ds);
    const auto back = parse_dataset(once);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(to_csv(back), once);
  }
}

TEST(Dataset, ConstructorValidates) {
  EXPECT_THROW(ElectionDataset({make_district("a", 10, 5, 4, 2), make_district("a", 10, 5, 4, 2)}), ParseError);
  EXPECT_THROW(ElectionDataset({make_district("a", 10, 5, 4, 5)}), ParseError);
  EXPECT_THROW(ElectionDataset({make_district("", 10, 5, 4, 2)}), ParseError);
  EXPECT_THROW(ElectionDataset({make_district("a\nb", 10, 5, 4, 2)}), ParseError);
}
