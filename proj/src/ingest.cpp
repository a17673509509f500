#include "triage/ingest.hpp"
#include "triage/ip.hpp"

#include "triage/error.hpp"
#include "triage/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

namespace triage {

using nlohmann::json;

std::string_view to_string(FeedKind kind) {
    switch (kind) {
    case FeedKind::registration: return "registration";
    case FeedKind::certificate: return "certificate";
    case FeedKind::social: return "social";
    }
    return "registration";
}

std::string_view to_string(LifecycleStage stage) {
    switch (stage) {
    case LifecycleStage::registered: return "registered";
    case LifecycleStage::certified: return "certified";
    case LifecycleStage::shared: return "shared";
    }
    return "registered";
}

std::optional<FeedKind> parse_feed_kind(std::string_view text) {
    for (FeedKind k : {FeedKind::registration, FeedKind::certificate, FeedKind::social}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

LifecycleStage stage_for(FeedKind kind) {
    switch (kind) {
    case FeedKind::registration: return LifecycleStage::registered;
    case FeedKind::certificate: return LifecycleStage::certified;
    case FeedKind::social: return LifecycleStage::shared;
    }
    return LifecycleStage::registered;
}

// ---------------------------------------------------------------------------
// Suffixes and hostnames

SuffixList::SuffixList(std::vector<std::string> suffixes) {
    for (auto& s : suffixes) {
        std::string rule = to_lower(trim(s));
        if (!rule.empty() && rule.front() == '.') rule.erase(0, 1);
        if (!rule.empty()) rules_.insert(std::move(rule));
    }
}

SuffixList SuffixList::load(const std::filesystem::path& path) {
    return SuffixList(read_list_file(path));
}

std::size_t SuffixList::suffix_labels(std::string_view hostname) const {
    const auto labels = split(hostname, '.');
    std::size_t best = 1;
    for (std::size_t take = 1; take <= labels.size(); ++take) {
        const std::size_t offset = hostname.size() - tail_length(labels, take);
        if (rules_.contains(std::string(hostname.substr(offset)))) best = take;
    }
    return best;
}

std::string_view SuffixList::public_suffix(std::string_view hostname) const {
    const auto labels = split(hostname, '.');
    const std::size_t take = std::min(suffix_labels(hostname), labels.size());
    return hostname.substr(hostname.size() - tail_length(labels, take));
}

std::string registrable_domain(std::string_view hostname, const SuffixList& suffixes) {
    const auto labels = split(hostname, '.');
    const std::size_t suffix = suffixes.suffix_labels(hostname);
    if (labels.size() <= suffix) {
        throw Error(ErrorKind::not_registrable, "hostname '" + std::string(hostname) + "' is a public suffix");
    }
    return std::string(hostname.substr(hostname.size() - tail_length(labels, suffix + 1)));
}

std::optional<std::string> normalize_hostname(std::string_view host) {
    std::string h = to_lower(trim(host));
    if (!h.empty() && h.back() == '.') h.pop_back();
    if (h.empty() || h.size() > 253) return std::nullopt;
    for (char c : h) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
        if (!ok) return std::nullopt;
    }
    for (auto label : split(h, '.')) {
        if (label.empty() || label.size() > 63) return std::nullopt;
    }
    return h;
}

std::optional<std::string> host_from_url(std::string_view url) {
    std::string_view rest = trim(url);
    if (const auto scheme = rest.find("://"); scheme != std::string_view::npos) rest.remove_prefix(scheme + 3);
    const auto end = rest.find_first_of("/?#");
    if (end != std::string_view::npos) rest = rest.substr(0, end);
    if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest.remove_prefix(at + 1);
    if (const auto colon = rest.find(':'); colon != std::string_view::npos) rest = rest.substr(0, colon);
    return normalize_hostname(rest);
}

// ---------------------------------------------------------------------------
// Keywords

KeywordList::KeywordList(std::vector<std::string> keywords) {
    for (auto& k : keywords) {
        std::string kw = to_lower(trim(k));
        if (!kw.empty()) keywords_.push_back(std::move(kw));
    }
}

KeywordList KeywordList::load(const std::filesystem::path& path) {
    return KeywordList(read_list_file(path));
}

bool KeywordList::matches_any(std::string_view text) const {
    const std::string lowered = to_lower(text);
    return std::any_of(keywords_.begin(), keywords_.end(),
                       [&](const std::string& kw) { return lowered.find(kw) != std::string::npos; });
}

std::string domain_without_suffix(std::string_view domain, const SuffixList& suffixes) {
    const std::string_view suffix = suffixes.public_suffix(domain);
    if (suffix.size() >= domain.size()) return std::string(domain);
    return std::string(domain.substr(0, domain.size() - suffix.size() - 1));
}

bool keyword_prefilter(std::string_view domain, const KeywordList& keywords, const SuffixList& suffixes) {
    return keywords.matches_any(domain_without_suffix(to_lower(domain), suffixes));
}

// ---------------------------------------------------------------------------
// Feed records

namespace {

std::optional<std::string> registrable_from_host(std::string_view host, const SuffixList& suffixes) {
    std::string_view h = host;
    if (h.starts_with("*.")) h.remove_prefix(2);
    auto normalized = normalize_hostname(h);
    if (!normalized || normalized->find('.') == std::string::npos) return std::nullopt;
    if (IpAddress::parse(*normalized)) return std::nullopt;  // IP literals name no domain
    try {
        return registrable_domain(*normalized, suffixes);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<std::string_view> first_url(std::string_view text) {
    const std::string lowered = to_lower(text);
    std::size_t best = std::string::npos;
    for (std::string_view scheme : {"http://", "https://"}) {
        best = std::min(best, lowered.find(scheme));
    }
    if (best == std::string::npos) return std::nullopt;
    std::size_t end = best;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != '"' &&
           text[end] != '<' && text[end] != '>') {
        ++end;
    }
    return text.substr(best, end - best);
}

}  // namespace

std::optional<Timestamp> record_timestamp(std::string_view raw_line) {
    const json j = json::parse(raw_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    const auto it = j.find("ts");
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return parse_iso8601(it->get<std::string>());
}

std::optional<CandidateDomain> parse_feed_event(const FeedEvent& event, const SuffixList& suffixes,
                                                IngestCounters* counters) {
    auto bump = [&](std::uint64_t IngestCounters::*field) {
        if (counters) ++(counters->*field);
        return std::nullopt;
    };

    const json j = json::parse(event.raw_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return bump(&IngestCounters::skipped_malformed);
    const auto ts_it = j.find("ts");
    if (ts_it == j.end() || !ts_it->is_string()) return bump(&IngestCounters::skipped_malformed);
    const auto ts = parse_iso8601(ts_it->get<std::string>());
    if (!ts) return bump(&IngestCounters::skipped_malformed);

    std::optional<std::string> domain;
    switch (event.kind) {
    case FeedKind::registration: {
        const auto it = j.find("domain");
        if (it == j.end() || !it->is_string()) return bump(&IngestCounters::skipped_malformed);
        domain = registrable_from_host(it->get<std::string>(), suffixes);
        break;
    }
    case FeedKind::certificate: {
        const auto it = j.find("san_list");
        if (it == j.end() || !it->is_array()) return bump(&IngestCounters::skipped_malformed);
        for (const auto& san : *it) {
            if (!san.is_string()) continue;
            domain = registrable_from_host(san.get<std::string>(), suffixes);
            if (domain) break;
        }
        break;
    }
    case FeedKind::social: {
        const auto it = j.find("text");
        if (it == j.end() || !it->is_string()) return bump(&IngestCounters::skipped_malformed);
        const std::string text = it->get<std::string>();
        if (const auto url = first_url(text)) {
            if (const auto host = host_from_url(*url)) domain = registrable_from_host(*host, suffixes);
        }
        break;
    }
    }
    if (!domain) return bump(&IngestCounters::skipped_no_host);
    if (counters) ++counters->parsed;
    return CandidateDomain{*domain, event.kind, *ts, stage_for(event.kind)};
}

FeedReader::FeedReader(const std::filesystem::path& path, FeedKind kind) : in_(path), kind_(kind) {
    if (!in_) throw Error(ErrorKind::io, "cannot open feed file " + path.string());
}

std::vector<FeedEvent> FeedReader::next_batch(std::size_t batch) {
    std::vector<FeedEvent> out;
    std::string line;
    while (out.size() < batch && std::getline(in_, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto ts = record_timestamp(line);
        if (ts && *ts < last_) {
            ++out_of_order_;
            continue;
        }
        if (ts) last_ = *ts;
        out.push_back(FeedEvent{kind_, std::move(line), last_});
    }
    if (out.size() < batch) done_ = true;
    return out;
}

// ---------------------------------------------------------------------------
// Admission

AdmissionFilter::AdmissionFilter(std::chrono::seconds window) : window_(window) {
    if (window.count() <= 0) throw Error(ErrorKind::invalid_argument, "dedup window must be positive");
}

bool AdmissionFilter::admit(const CandidateDomain& candidate) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = last_admitted_.try_emplace(candidate.domain, candidate.first_seen);
    if (inserted) return true;
    if (candidate.first_seen - it->second >= window_) {
        it->second = candidate.first_seen;
        return true;
    }
    return false;
}

std::size_t AdmissionFilter::size() const {
    std::lock_guard lock(mu_);
    return last_admitted_.size();
}

void AdmissionFilter::save(const std::filesystem::path& path) const {
    std::map<std::string, Timestamp> sorted;
    {
        std::lock_guard lock(mu_);
        sorted.insert(last_admitted_.begin(), last_admitted_.end());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write dedup state " + path.string());
    for (const auto& [domain, ts] : sorted) out << domain << '\t' << format_iso8601(ts) << '\n';
}

void AdmissionFilter::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::lock_guard lock(mu_);
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        if (const auto ts = parse_iso8601(line.substr(tab + 1))) last_admitted_[line.substr(0, tab)] = *ts;
    }
}

std::vector<CandidateDomain> ingest_batch(const std::vector<FeedEvent>& events, const SuffixList& suffixes,
                                          const KeywordList& keywords, AdmissionFilter& filter,
                                          IngestCounters& counters) {
    std::vector<CandidateDomain> admitted;
    for (const auto& event : events) {
        ++counters.events;
        auto candidate = parse_feed_event(event, suffixes, &counters);
        if (!candidate) continue;
        if (candidate->source == FeedKind::registration &&
            !keyword_prefilter(candidate->domain, keywords, suffixes)) {
            ++counters.filtered_keyword;
            continue;
        }
        if (!filter.admit(*candidate)) {
            ++counters.duplicates;
            continue;
        }
        ++counters.admitted;
        admitted.push_back(std::move(*candidate));
    }
    return admitted;
}

}  // namespace triage
