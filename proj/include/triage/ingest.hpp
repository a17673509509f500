#pragma once

#include "triage/time.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace triage {

enum class FeedKind { registration, certificate, social };
enum class LifecycleStage { registered, certified, shared };

std::string_view to_string(FeedKind kind);
std::string_view to_string(LifecycleStage stage);
std::optional<FeedKind> parse_feed_kind(std::string_view text);
LifecycleStage stage_for(FeedKind kind);

struct FeedEvent {
    FeedKind kind = FeedKind::registration;
    std::string raw_line;
    Timestamp observed_at{};
};

struct CandidateDomain {
    std::string domain;
    FeedKind source = FeedKind::registration;
    Timestamp first_seen{};
    LifecycleStage stage = LifecycleStage::registered;

    bool operator==(const CandidateDomain&) const = default;
};

/// Public-suffix snapshot. Plain suffix rules only; a hostname whose TLD is
/// not listed falls back to treating the last label as its suffix.
class SuffixList {
public:
    SuffixList() = default;
    explicit SuffixList(std::vector<std::string> suffixes);

    static SuffixList load(const std::filesystem::path& path);

    /// Length in labels of the longest listed suffix of `hostname`
    /// (at least 1 via the fallback rule).
    std::size_t suffix_labels(std::string_view hostname) const;
    /// The public suffix itself, e.g. "co.uk".
    std::string_view public_suffix(std::string_view hostname) const;
    bool contains(std::string_view suffix) const { return rules_.contains(std::string(suffix)); }
    std::size_t size() const { return rules_.size(); }

private:
    std::unordered_set<std::string> rules_;
};

/// Longest listed public suffix plus one label. Throws Error(not_registrable)
/// when the hostname has no label left of its suffix.
std::string registrable_domain(std::string_view hostname, const SuffixList& suffixes);

/// Lowercases and strips a trailing dot; returns nullopt for anything that is
/// not a plausible DNS hostname (`[a-z0-9.-]`, no empty labels).
std::optional<std::string> normalize_hostname(std::string_view host);

/// Host part of an http(s) URL or bare host[:port][/path].
std::optional<std::string> host_from_url(std::string_view url);

class KeywordList {
public:
    KeywordList() = default;
    explicit KeywordList(std::vector<std::string> keywords);
    static KeywordList load(const std::filesystem::path& path);

    const std::vector<std::string>& keywords() const { return keywords_; }
    std::size_t size() const { return keywords_.size(); }

    /// True iff any keyword is a case-insensitive substring of `text`.
    bool matches_any(std::string_view text) const;

private:
    std::vector<std::string> keywords_;
};

/// Domain with its public suffix removed, e.g. "channel24news" for
/// "channel24news.co.uk".
std::string domain_without_suffix(std::string_view domain, const SuffixList& suffixes);

bool keyword_prefilter(std::string_view domain, const KeywordList& keywords, const SuffixList& suffixes);

struct IngestCounters {
    std::uint64_t events = 0;
    std::uint64_t parsed = 0;
    std::uint64_t skipped_malformed = 0;
    std::uint64_t skipped_no_host = 0;
    std::uint64_t skipped_out_of_order = 0;
    std::uint64_t filtered_keyword = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t admitted = 0;
    bool operator==(const IngestCounters&) const = default;
};

/// Parses one feed record into a candidate. Malformed records and records
/// without an extractable registrable hostname yield nullopt and bump the
/// matching counter.
std::optional<CandidateDomain> parse_feed_event(const FeedEvent& event, const SuffixList& suffixes,
                                                IngestCounters* counters = nullptr);

/// Reads a replay file in chunks of at most `batch` records. Each event's
/// observed_at is its record's `ts`; records without a readable `ts` inherit
/// the previous timestamp (parse_feed_event then rejects them as malformed).
/// Records whose `ts` goes backwards are dropped and counted.
class FeedReader {
public:
    FeedReader(const std::filesystem::path& path, FeedKind kind);

    std::vector<FeedEvent> next_batch(std::size_t batch);
    bool done() const { return done_; }
    FeedKind kind() const { return kind_; }
    std::uint64_t out_of_order() const { return out_of_order_; }

private:
    std::ifstream in_;
    FeedKind kind_;
    Timestamp last_{};
    std::uint64_t out_of_order_ = 0;
    bool done_ = false;
};

/// Reads the `ts` field of a replay record; nullopt if absent or invalid.
std::optional<Timestamp> record_timestamp(std::string_view raw_line);

/// Sliding-window deduplication. Thread-safe; admit() is the single
/// serialization point for concurrent feed adapters.
class AdmissionFilter {
public:
    explicit AdmissionFilter(std::chrono::seconds window);

    /// True iff the domain was not admitted within the window ending at
    /// candidate.first_seen; admitting records the new timestamp.
    bool admit(const CandidateDomain& candidate);

    std::chrono::seconds window() const { return window_; }
    std::size_t size() const;

    /// Persisted form: one `domain<TAB>iso-timestamp` line per entry, sorted.
    void save(const std::filesystem::path& path) const;
    void load(const std::filesystem::path& path);

private:
    std::chrono::seconds window_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, Timestamp> last_admitted_;
};

/// Parse, prefilter (registration feed only) and dedup a batch of events.
/// Returns the admitted candidates in input order.
std::vector<CandidateDomain> ingest_batch(const std::vector<FeedEvent>& events, const SuffixList& suffixes,
                                          const KeywordList& keywords, AdmissionFilter& filter,
                                          IngestCounters& counters);

}  // namespace triage
