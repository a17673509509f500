#include "triage/error.hpp"
#include "triage/ingest.hpp"
#include "triage/rng.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

using namespace triage;
using testing_support::corpus_dir;
using testing_support::corpus_resources;
using testing_support::TempDir;

namespace {

const SuffixList& suffixes() { return corpus_resources().suffixes; }
const KeywordList& keywords() { return corpus_resources().news_keywords; }

FeedEvent event(FeedKind kind, std::string line) {
    FeedEvent e;
    e.kind = kind;
    e.observed_at = record_timestamp(line).value_or(Timestamp{});
    e.raw_line = std::move(line);
    return e;
}

CandidateDomain candidate(std::string domain, Timestamp t) {
    return CandidateDomain{std::move(domain), FeedKind::registration, t, LifecycleStage::registered};
}

std::vector<CandidateDomain> replay_all(std::size_t batch, AdmissionFilter& filter, IngestCounters& counters) {
    std::vector<FeedEvent> events;
    for (auto [name, kind] : {std::pair{"registration", FeedKind::registration},
                              std::pair{"certificate", FeedKind::certificate}, std::pair{"social", FeedKind::social}}) {
        FeedReader reader(corpus_dir() / "feeds" / (std::string(name) + ".jsonl"), kind);
        while (!reader.done()) {
            auto b = reader.next_batch(batch);
            events.insert(events.end(), b.begin(), b.end());
        }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const FeedEvent& a, const FeedEvent& b) { return a.observed_at < b.observed_at; });
    std::vector<CandidateDomain> out;
    for (std::size_t i = 0; i < events.size(); i += batch) {
        std::vector<FeedEvent> chunk(events.begin() + static_cast<std::ptrdiff_t>(i),
                                     events.begin() + static_cast<std::ptrdiff_t>(std::min(events.size(), i + batch)));
        auto got = ingest_batch(chunk, suffixes(), keywords(), filter, counters);
        out.insert(out.end(), got.begin(), got.end());
    }
    return out;
}

}  // namespace

TEST(Ingest, RegistrationLineYieldsRegisteredCandidate) {
    const auto c = parse_feed_event(
        event(FeedKind::registration, R"({"domain":"channel24news.com","ts":"2019-02-01T00:00:00Z"})"), suffixes());
    ASSERT_TRUE(c);
    EXPECT_EQ(c->domain, "channel24news.com");
    EXPECT_EQ(c->stage, LifecycleStage::registered);
    EXPECT_EQ(c->first_seen, testing_support::replay_day());
}

TEST(Ingest, SocialLineReducesUrlToRegistrableDomain) {
    const auto c = parse_feed_event(
        event(FeedKind::social, R"({"ts":"2019-02-01T00:00:00Z","text":"look https://www.example.com/a?b=1 now"})"),
        suffixes());
    ASSERT_TRUE(c);
    EXPECT_EQ(c->domain, "example.com");
    EXPECT_EQ(c->stage, LifecycleStage::shared);
}

TEST(Ingest, SocialLineWithoutUrlIsSkipped) {
    IngestCounters counters;
    EXPECT_FALSE(parse_feed_event(event(FeedKind::social, R"({"ts":"2019-02-01T00:00:00Z","text":"no link"})"),
                                  suffixes(), &counters));
    EXPECT_EQ(counters.skipped_no_host, 1u);
}

TEST(Ingest, CertificateLineTakesFirstRegistrableSan) {
    const auto c = parse_feed_event(
        event(FeedKind::certificate, R"({"ts":"2019-02-01T00:00:00Z","san_list":["10.0.0.1","*.Foo.Example.co.uk"]})"),
        suffixes());
    ASSERT_TRUE(c);
    EXPECT_EQ(c->domain, "example.co.uk");
    EXPECT_EQ(c->stage, LifecycleStage::certified);
}

TEST(Ingest, MalformedLinesAreCounted) {
    IngestCounters counters;
    EXPECT_FALSE(parse_feed_event(event(FeedKind::registration, "{not json"), suffixes(), &counters));
    EXPECT_FALSE(parse_feed_event(event(FeedKind::registration, R"({"domain":"a.com"})"), suffixes(), &counters));
    EXPECT_FALSE(parse_feed_event(event(FeedKind::certificate, R"({"ts":"2019-02-01","san_list":"x"})"), suffixes(),
                                  &counters));
    EXPECT_EQ(counters.skipped_malformed, 3u);
}

TEST(Ingest, RegistrableDomainExamples) {
    EXPECT_EQ(registrable_domain("www.example.co.uk", suffixes()), "example.co.uk");
    EXPECT_EQ(registrable_domain("example.com", suffixes()), "example.com");
    EXPECT_EQ(registrable_domain("foo.bar.example.com", suffixes()), "example.com");
    EXPECT_EQ(registrable_domain("a.b.unlistedtld", suffixes()), "b.unlistedtld");
    EXPECT_THROW(registrable_domain("co.uk", suffixes()), Error);
    try {
        registrable_domain("com", suffixes());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::not_registrable);
    }
}

TEST(Ingest, RegistrableDomainIsIdempotent) {
    Rng rng(11);
    const std::vector<std::string> labels{"www", "a", "news", "co", "uk", "com", "example", "blog", "org", "xyz"};
    for (int i = 0; i < 2000; ++i) {
        std::string host;
        const auto n = 1 + rng.below(5);
        for (std::size_t k = 0; k < n; ++k) host += (k ? "." : "") + labels[rng.below(labels.size())];
        try {
            const auto once = registrable_domain(host, suffixes());
            EXPECT_EQ(registrable_domain(once, suffixes()), once) << host;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::not_registrable);
        }
    }
}

TEST(Ingest, KeywordPrefilterExamples) {
    EXPECT_TRUE(keyword_prefilter("dailyherald.com", keywords(), suffixes()));
    EXPECT_TRUE(keyword_prefilter("channel24news.xyz", keywords(), suffixes()));
    EXPECT_FALSE(keyword_prefilter("qqqqqq.com", keywords(), suffixes()));
}

TEST(Ingest, NewsSubstringAlwaysPassesPrefilter) {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        std::string name;
        for (std::size_t k = rng.below(6); k > 0; --k) name += static_cast<char>('a' + rng.below(26));
        const auto at = rng.below(name.size() + 1);
        name.insert(at, "news");
        EXPECT_TRUE(keyword_prefilter(name + ".com", keywords(), suffixes())) << name;
    }
}

TEST(Ingest, BundledKeywordListMatchesAppendixSize) {
    EXPECT_EQ(keywords().size(), 162u);
    const auto& k = keywords().keywords();
    for (const char* w : {"24", "news", "herald", "guardian", "patriot"}) {
        EXPECT_NE(std::find(k.begin(), k.end(), w), k.end()) << w;
    }
}

TEST(Ingest, ParsedDomainsAreCanonical) {
    Rng rng(3);
    const std::string alphabet = "abcXYZ09-.:/?#@ _%";
    for (int i = 0; i < 3000; ++i) {
        std::string host;
        for (std::size_t k = 1 + rng.below(20); k > 0; --k) host += alphabet[rng.below(alphabet.size())];
        for (auto kind : {FeedKind::registration, FeedKind::social}) {
            const std::string line = kind == FeedKind::registration
                                         ? R"({"ts":"2019-02-01T00:00:00Z","domain":")" + host + "\"}"
                                         : R"({"ts":"2019-02-01T00:00:00Z","text":"see https://)" + host + "\"}";
            if (auto c = parse_feed_event(event(kind, line), suffixes())) {
                EXPECT_EQ(c->domain.find_first_of("/:ABCDEFGHIJKLMNOPQRSTUVWXYZ"), std::string::npos) << c->domain;
            }
        }
    }
}

TEST(Admission, WindowExamples) {
    AdmissionFilter filter(std::chrono::hours(24));
    const auto t0 = testing_support::replay_day();
    EXPECT_TRUE(filter.admit(candidate("example.com", t0)));
    EXPECT_FALSE(filter.admit(candidate("example.com", t0 + std::chrono::hours(1))));
    EXPECT_TRUE(filter.admit(candidate("example.com", t0 + std::chrono::hours(25))));
}

TEST(Admission, StatePersists) {
    TempDir dir;
    const auto t0 = testing_support::replay_day();
    AdmissionFilter a(std::chrono::hours(24));
    a.admit(candidate("b.com", t0));
    a.admit(candidate("a.com", t0 + std::chrono::minutes(5)));
    a.save(dir / "state.tsv");
    AdmissionFilter b(std::chrono::hours(24));
    b.load(dir / "state.tsv");
    EXPECT_EQ(b.size(), 2u);
    EXPECT_FALSE(b.admit(candidate("a.com", t0 + std::chrono::hours(2))));
    EXPECT_TRUE(b.admit(candidate("c.com", t0)));
}

TEST(FeedReader, DropsBackwardsTimestampsAndKeepsUndated) {
    TempDir dir;
    {
        std::ofstream out(dir / "f.jsonl");
        out << R"({"ts":"2019-02-01T00:10:00Z","domain":"anews.com"})" << "\n\n"
            << R"({"ts":"2019-02-01T00:05:00Z","domain":"bnews.com"})" << "\r\n"
            << R"({"domain":"cnews.com"})" << "\n"
            << R"({"ts":"2019-02-01T00:20:00Z","domain":"dnews.com"})" << "\n";
    }
    FeedReader reader(dir / "f.jsonl", FeedKind::registration);
    std::vector<FeedEvent> all;
    while (!reader.done()) {
        auto b = reader.next_batch(1);
        all.insert(all.end(), b.begin(), b.end());
    }
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(reader.out_of_order(), 1u);
    EXPECT_EQ(all[1].observed_at, all[0].observed_at);  // undated record inherits
}

TEST(Ingest, FixtureReplayAdmitsFiftyDomains) {
    AdmissionFilter filter(std::chrono::hours(24 * 7));
    IngestCounters counters;
    const auto admitted = replay_all(256, filter, counters);
    EXPECT_EQ(admitted.size(), 50u);
    EXPECT_EQ(counters.admitted, 50u);
    EXPECT_EQ(counters.filtered_keyword, 3u);
    EXPECT_EQ(counters.duplicates, 2u);
    EXPECT_EQ(counters.skipped_malformed, 1u);
    EXPECT_EQ(counters.skipped_no_host, 2u);
}

TEST(Ingest, AdmittedMultisetIsIndependentOfBatchSize) {
    std::vector<std::string> reference;
    for (std::size_t batch : {1, 2, 3, 7, 16, 1000}) {
        AdmissionFilter filter(std::chrono::hours(24 * 7));
        IngestCounters counters;
        std::vector<std::string> domains;
        for (const auto& c : replay_all(batch, filter, counters)) domains.push_back(c.domain);
        std::sort(domains.begin(), domains.end());
        if (reference.empty()) reference = domains;
        EXPECT_EQ(domains, reference) << "batch " << batch;
    }
}

TEST(Ingest, RerunWithSameStateAdmitsNothing) {
    AdmissionFilter filter(std::chrono::hours(24 * 7));
    IngestCounters first, second;
    EXPECT_EQ(replay_all(64, filter, first).size(), 50u);
    EXPECT_TRUE(replay_all(64, filter, second).empty());
    EXPECT_EQ(second.duplicates, 50u + first.duplicates);
}
