#include "triage/service.hpp"

#include "triage/enrich.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"
#include "triage/serialize.hpp"
#include "triage/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

namespace triage {

using nlohmann::json;

// ---- config ------------------------------------------------------------

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const json& value) {
    std::filesystem::path p = value.get<std::string>();
    return p.is_absolute() ? p : base / p;
}

/// Reads a non-negative integer; json's own conversion wraps negatives.
template <class T>
T unsigned_value(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw Error(ErrorKind::validation, std::string(key) + " must be a non-negative integer");
    return v.get<T>();
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorKind::validation, "unknown config key '" + key + "' in " + std::string(where));
        }
    }
}

}  // namespace

Config Config::from_json(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw Error(ErrorKind::validation, "config must be an object");
    check_keys(j,
               {"feeds", "fixtures", "live", "data_dir", "asn_table", "geo_table", "whois_aliases", "archive", "dataset",
                "model", "moderation", "dedup_state", "bind_host", "bind_port", "workers", "dedup_window_hours",
                "freshness_window_hours", "probe", "batch_size"},
               "config");
    Config c;
    c.archive = base / c.archive;
    c.dataset = base / c.dataset;
    c.model = base / c.model;
    c.moderation = base / c.moderation;
    c.dedup_state = base / c.dedup_state;
    try {
        if (j.contains("feeds")) {
            const auto& f = j.at("feeds");
            check_keys(f, {"registration", "certificate", "social"}, "feeds");
            if (f.contains("registration")) c.feeds.registration = resolve(base, f.at("registration"));
            if (f.contains("certificate")) c.feeds.certificate = resolve(base, f.at("certificate"));
            if (f.contains("social")) c.feeds.social = resolve(base, f.at("social"));
        }
        if (j.contains("fixtures")) c.fixtures = resolve(base, j.at("fixtures"));
        if (j.contains("live")) {
            const auto& l = j.at("live");
            check_keys(l, {"resolver", "whois_server", "user_agent"}, "live");
            c.live.resolver = l.value("resolver", c.live.resolver);
            c.live.whois_server = l.value("whois_server", c.live.whois_server);
            c.live.user_agent = l.value("user_agent", c.live.user_agent);
        }
        if (j.contains("data_dir")) c.resources.data_dir = resolve(base, j.at("data_dir"));
        if (j.contains("asn_table")) c.resources.asn_table = resolve(base, j.at("asn_table"));
        if (j.contains("geo_table")) c.resources.geo_table = resolve(base, j.at("geo_table"));
        if (j.contains("whois_aliases")) c.resources.whois_aliases = resolve(base, j.at("whois_aliases"));
        if (j.contains("archive")) c.archive = resolve(base, j.at("archive"));
        if (j.contains("dataset")) c.dataset = resolve(base, j.at("dataset"));
        if (j.contains("model")) c.model = resolve(base, j.at("model"));
        if (j.contains("moderation")) c.moderation = resolve(base, j.at("moderation"));
        if (j.contains("dedup_state")) c.dedup_state = resolve(base, j.at("dedup_state"));
        c.bind_host = j.value("bind_host", c.bind_host);
        c.bind_port = j.value("bind_port", c.bind_port);
        c.workers = unsigned_value(j, "workers", c.workers);
        c.batch_size = unsigned_value(j, "batch_size", c.batch_size);
        if (j.contains("dedup_window_hours")) c.dedup_window = std::chrono::hours(j.at("dedup_window_hours").get<std::int64_t>());
        if (j.contains("freshness_window_hours")) {
            c.freshness_window = std::chrono::hours(j.at("freshness_window_hours").get<std::int64_t>());
        }
        if (j.contains("probe")) {
            const auto& p = j.at("probe");
            check_keys(p, {"timeout_ms", "max_redirects", "body_cap"}, "probe");
            if (p.contains("timeout_ms")) c.limits.timeout = std::chrono::milliseconds(p.at("timeout_ms").get<std::int64_t>());
            c.limits.max_redirects = unsigned_value(p, "max_redirects", c.limits.max_redirects);
            c.limits.body_cap = unsigned_value(p, "body_cap", c.limits.body_cap);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, std::string("bad config value: ") + e.what());
    }
    if (c.workers == 0) throw Error(ErrorKind::validation, "workers must be >= 1");
    if (c.batch_size == 0) throw Error(ErrorKind::validation, "batch_size must be >= 1");
    if (c.dedup_window.count() <= 0) throw Error(ErrorKind::validation, "dedup_window_hours must be > 0");
    if (c.freshness_window.count() < 0) throw Error(ErrorKind::validation, "freshness_window_hours must be >= 0");
    if (c.limits.timeout.count() <= 0) throw Error(ErrorKind::validation, "probe.timeout_ms must be > 0");
    if (c.bind_port < 0 || c.bind_port > 65535) throw Error(ErrorKind::validation, "bind_port out of range");
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::validation, path.string() + " is not valid JSON");
    return from_json(j, std::filesystem::absolute(path).parent_path());
}

// ---- moderation --------------------------------------------------------

std::string_view to_string(ModerationState s) { return s == ModerationState::labeled ? "labeled" : "pending"; }

std::optional<ModerationState> parse_moderation_state(std::string_view text) {
    if (text == "pending") return ModerationState::pending;
    if (text == "labeled") return ModerationState::labeled;
    return std::nullopt;
}

namespace {

json verdict_json(const Verdict& v) {
    return {{"label", std::string(to_string(v.label))}, {"note", v.note}, {"decided_at", format_iso8601(v.decided_at)}};
}

Verdict verdict_from_json(const json& j) {
    Verdict v;
    auto label = parse_label(j.at("label").get<std::string>());
    auto ts = parse_iso8601(j.at("decided_at").get<std::string>());
    if (!label || !ts) throw Error(ErrorKind::validation, "bad verdict record");
    v.label = *label;
    v.note = j.at("note").get<std::string>();
    v.decided_at = *ts;
    return v;
}

ModerationItem item_from_json(const json& j) {
    ModerationItem item;
    item.id = j.at("id").get<std::uint64_t>();
    item.domain = j.at("domain").get<std::string>();
    item.prediction = prediction_from_json(j.at("prediction"));
    item.evidence_ref = j.at("evidence_ref").get<std::uint64_t>();
    auto ts = parse_iso8601(j.at("created_at").get<std::string>());
    if (!ts) throw Error(ErrorKind::validation, "bad created_at");
    item.created_at = *ts;
    return item;
}

}  // namespace

json to_json(const ModerationItem& item) {
    return {{"id", item.id},
            {"domain", item.domain},
            {"state", std::string(to_string(item.state))},
            {"prediction", to_json(item.prediction)},
            {"evidence_ref", item.evidence_ref},
            {"created_at", format_iso8601(item.created_at)},
            {"verdict", item.verdict ? verdict_json(*item.verdict) : json(nullptr)}};
}

ModerationQueue::ModerationQueue(std::filesystem::path log) : log_(std::move(log)) {
    std::ifstream in(log_);
    std::string line;
    std::size_t lineno = 0;
    while (in && std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            const auto event = j.at("event").get<std::string>();
            if (event == "enqueue") {
                auto item = item_from_json(j.at("item"));
                next_id_ = std::max(next_id_, item.id + 1);
                items_[item.id] = std::move(item);
            } else if (event == "verdict") {
                auto it = items_.find(j.at("id").get<std::uint64_t>());
                if (it == items_.end()) throw Error(ErrorKind::validation, "verdict for unknown item");
                it->second.verdict = verdict_from_json(j.at("verdict"));
                it->second.state = ModerationState::labeled;
            } else {
                throw Error(ErrorKind::validation, "unknown event " + event);
            }
        } catch (const std::exception& e) {
            throw Error(ErrorKind::validation, log_.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (log_.has_parent_path()) std::filesystem::create_directories(log_.parent_path());
    std::ofstream touch(log_, std::ios::app);
    if (!touch) throw Error(ErrorKind::io, "cannot open moderation log " + log_.string());
}

void ModerationQueue::append_line(const json& j) {
    std::ofstream out(log_, std::ios::app | std::ios::binary);
    out << j.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed on " + log_.string());
}

ModerationItem ModerationQueue::enqueue(const Prediction& prediction, std::uint64_t evidence_ref, Timestamp now) {
    std::lock_guard lock(mu_);
    for (const auto& [_, item] : items_) {
        if (item.domain == prediction.domain && item.state == ModerationState::pending) return item;
    }
    ModerationItem item;
    item.id = next_id_;
    item.domain = prediction.domain;
    item.prediction = prediction;
    item.evidence_ref = evidence_ref;
    item.created_at = now;
    json rec = to_json(item);
    rec.erase("state");
    rec.erase("verdict");
    append_line({{"event", "enqueue"}, {"item", rec}});
    ++next_id_;
    items_[item.id] = item;
    return item;
}

ModerationItem ModerationQueue::submit_verdict(std::uint64_t id, Label label, std::string note, Timestamp now) {
    std::lock_guard lock(mu_);
    auto it = items_.find(id);
    if (it == items_.end()) throw Error(ErrorKind::not_found, "no moderation item " + std::to_string(id));
    if (it->second.state == ModerationState::labeled) {
        throw Error(ErrorKind::conflict, "item " + std::to_string(id) + " already has a verdict");
    }
    Verdict v{label, std::move(note), now};
    append_line({{"event", "verdict"}, {"id", id}, {"verdict", verdict_json(v)}});
    it->second.verdict = std::move(v);
    it->second.state = ModerationState::labeled;
    return it->second;
}

std::optional<ModerationItem> ModerationQueue::get(std::uint64_t id) const {
    std::lock_guard lock(mu_);
    auto it = items_.find(id);
    if (it == items_.end()) return std::nullopt;
    return it->second;
}

std::vector<ModerationItem> ModerationQueue::list(std::optional<ModerationState> state) const {
    std::lock_guard lock(mu_);
    std::vector<ModerationItem> out;
    for (const auto& [_, item] : items_) {
        if (!state || item.state == *state) out.push_back(item);
    }
    return out;
}

std::vector<std::string> ModerationQueue::feed(bool include_machine) const {
    std::lock_guard lock(mu_);
    std::set<std::string> domains;
    for (const auto& [_, item] : items_) {
        if (item.verdict && item.verdict->label == Label::disinformation) domains.insert(item.domain);
        if (include_machine && item.state == ModerationState::pending) domains.insert(item.domain);
    }
    return {domains.begin(), domains.end()};
}

std::size_t ModerationQueue::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

// ---- pipeline ----------------------------------------------------------

json to_json(const PipelineSummary& s) {
    json predicted = json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) predicted[std::string(to_string(kClassOrder[c]))] = s.predicted[c];
    return {{"ingest",
             {{"events", s.ingest.events},
              {"parsed", s.ingest.parsed},
              {"skipped_malformed", s.ingest.skipped_malformed},
              {"skipped_no_host", s.ingest.skipped_no_host},
              {"skipped_out_of_order", s.ingest.skipped_out_of_order},
              {"filtered_keyword", s.ingest.filtered_keyword},
              {"duplicates", s.ingest.duplicates},
              {"admitted", s.ingest.admitted}}},
            {"probed", s.probed},
            {"archived", s.archived},
            {"predicted", predicted},
            {"enqueued", s.enqueued}};
}

Pipeline::Pipeline(Config config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    try {
        resources_ = Resources::load(config_.resources);
    } catch (const Error& e) {
        throw Error(ErrorKind::startup, std::string("cannot load resources: ") + e.what());
    }
    if (!std::filesystem::exists(config_.model)) {
        throw Error(ErrorKind::startup, "model file " + config_.model.string() + " not found");
    }
    try {
        model_ = model_load(config_.model);
        model_version_ = content_version(read_file(config_.model));
    } catch (const Error& e) {
        throw Error(ErrorKind::startup, std::string("cannot load model: ") + e.what());
    }
    if (!transport_) {
        transport_ = config_.fixtures ? std::make_unique<FixtureTransport>(*config_.fixtures)
                                      : make_live_transport(config_.live);
    }
    const auto scan = archive_scan(config_.archive);
    for (const auto& [offset, entry] : scan.entries) {
        latest_[entry.domain] = IndexEntry{offset, entry.probed_at};
        if (entry.prediction) ++archived_predictions_[index_of(entry.prediction->predicted_class)];
        ++archived_total_;
    }
    archive_ = std::make_unique<ArchiveWriter>(config_.archive);
    queue_ = std::make_unique<ModerationQueue>(config_.moderation);
}

Pipeline::~Pipeline() = default;

ArchiveEntry Pipeline::build_entry(const ProbeRecord& record, Timestamp now) const {
    CmsInfo cms;
    if (record.http.available && record.http.body) cms = fingerprint_cms(*record.http.body, record.http.headers);
    ArchiveEntry e;
    e.domain = record.domain;
    e.probed_at = record.probed_at;
    e.record = record;
    e.features = extract(record, cms, resources_.context(), now);
    e.prediction = predict_domain(model_, model_version_, record.domain, e.features);
    e.pipeline_version = std::string(pipeline_version());
    return e;
}

ProcessedDomain Pipeline::commit(ArchiveEntry entry, Timestamp now) {
    ProcessedDomain out;
    out.offset = archive_->append(entry);
    {
        std::unique_lock lock(index_mu_);
        auto& slot = latest_[entry.domain];
        slot = IndexEntry{out.offset, entry.probed_at};
        ++archived_predictions_[index_of(entry.prediction->predicted_class)];
        ++archived_total_;
    }
    if (entry.prediction->predicted_class == Label::disinformation) {
        out.item = queue_->enqueue(*entry.prediction, out.offset, now);
    }
    out.entry = std::move(entry);
    return out;
}

ProcessedDomain Pipeline::process(const std::string& domain, Timestamp now) {
    const auto record = probe_domain(domain, *transport_, config_.limits, now);
    return commit(build_entry(record, now), now);
}

PipelineSummary Pipeline::run_replay() {
    PipelineSummary summary;

    struct Source {
        std::filesystem::path path;
        FeedKind kind;
    };
    std::vector<Source> sources;
    if (config_.feeds.registration) sources.push_back({*config_.feeds.registration, FeedKind::registration});
    if (config_.feeds.certificate) sources.push_back({*config_.feeds.certificate, FeedKind::certificate});
    if (config_.feeds.social) sources.push_back({*config_.feeds.social, FeedKind::social});

    // Merge all feeds by timestamp; ties keep feed order, then file order.
    std::vector<FeedEvent> events;
    for (const auto& src : sources) {
        if (!std::filesystem::exists(src.path)) throw Error(ErrorKind::io, "feed file " + src.path.string() + " not found");
        FeedReader reader(src.path, src.kind);
        while (!reader.done()) {
            auto batch = reader.next_batch(config_.batch_size);
            events.insert(events.end(), std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()));
        }
        summary.ingest.skipped_out_of_order += reader.out_of_order();
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const FeedEvent& a, const FeedEvent& b) { return a.observed_at < b.observed_at; });

    AdmissionFilter filter(config_.dedup_window);
    if (std::filesystem::exists(config_.dedup_state)) filter.load(config_.dedup_state);

    std::vector<CandidateDomain> admitted;
    for (std::size_t i = 0; i < events.size(); i += config_.batch_size) {
        const std::vector<FeedEvent> chunk(events.begin() + static_cast<std::ptrdiff_t>(i),
                                           events.begin() + static_cast<std::ptrdiff_t>(std::min(events.size(), i + config_.batch_size)));
        auto got = ingest_batch(chunk, resources_.suffixes, resources_.news_keywords, filter, summary.ingest);
        admitted.insert(admitted.end(), got.begin(), got.end());
    }

    // Probe concurrently; commit in admission order so the archive is deterministic.
    std::vector<ProbeRecord> records(admitted.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < admitted.size(); i = next++) {
            records[i] = probe_domain(admitted[i].domain, *transport_, config_.limits, admitted[i].first_seen);
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t workers = std::min(config_.workers, std::max<std::size_t>(admitted.size(), 1));
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    summary.probed = records.size();

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto now = admitted[i].first_seen;
        auto done = commit(build_entry(records[i], now), now);
        ++summary.archived;
        ++summary.predicted[index_of(done.entry.prediction->predicted_class)];
        if (done.item) ++summary.enqueued;
    }

    filter.save(config_.dedup_state);
    return summary;
}

Prediction Pipeline::classify_domain(std::string_view raw, Timestamp now) {
    auto host = normalize_hostname(trim(raw));
    if (!host) throw Error(ErrorKind::validation, "'" + std::string(raw) + "' is not a valid domain name");
    std::string domain;
    try {
        domain = registrable_domain(*host, resources_.suffixes);
    } catch (const Error& e) {
        throw Error(ErrorKind::validation, e.what());
    }
    std::optional<IndexEntry> cached;
    {
        std::shared_lock lock(index_mu_);
        if (auto it = latest_.find(domain); it != latest_.end()) cached = it->second;
    }
    if (cached && now - cached->probed_at < config_.freshness_window && now >= cached->probed_at) {
        const auto entry = archive_read_at(config_.archive, cached->offset);
        return predict_domain(model_, model_version_, domain, entry.features);
    }
    return *process(domain, now).entry.prediction;
}

ModerationItem Pipeline::submit_verdict(std::uint64_t id, Label label, std::string note, Timestamp now) {
    auto item = queue_->submit_verdict(id, label, std::move(note), now);
    const auto entry = archive_read_at(config_.archive, item.evidence_ref);
    std::lock_guard lock(dataset_mu_);
    dataset_append(config_.dataset, LabeledExample{item.domain, entry.features, label, LabelSource::moderator, now});
    return item;
}

std::optional<ArchiveEntry> Pipeline::latest_record(std::string_view domain) const {
    std::optional<IndexEntry> slot;
    {
        std::shared_lock lock(index_mu_);
        if (auto it = latest_.find(std::string(domain)); it != latest_.end()) slot = it->second;
    }
    if (!slot) return std::nullopt;
    return archive_read_at(config_.archive, slot->offset);
}

json Pipeline::stats() const {
    json predicted = json::object();
    std::uint64_t total = 0;
    {
        std::shared_lock lock(index_mu_);
        for (std::size_t c = 0; c < kClassCount; ++c) {
            predicted[std::string(to_string(kClassOrder[c]))] = archived_predictions_[c];
        }
        total = archived_total_;
    }
    const auto importance = source_importance(model_);
    std::vector<std::size_t> order(kSourceCount);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return importance[a] > importance[b]; });
    json imp = json::array();
    for (auto s : order) {
        const auto& col = source_columns()[s];
        imp.push_back({{"feature", std::string(col.key)},
                       {"name", std::string(col.display_name)},
                       {"category", std::string(to_string(col.category))},
                       {"importance", importance[s]}});
    }
    return {{"model_version", model_version_},
            {"feature_set", std::string(to_string(model_.feature_set))},
            {"archive", {{"entries", total}, {"predicted", predicted}}},
            {"queue",
             {{"pending", queue_->list(ModerationState::pending).size()},
              {"labeled", queue_->list(ModerationState::labeled).size()}}},
            {"feature_importance", imp}};
}

// ---- HTTP --------------------------------------------------------------

namespace {

int http_status(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::invalid_argument:
    case ErrorKind::not_registrable: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    default: return 500;
    }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorKind kind, const std::string& message) {
    send_json(res, {{"error", std::string(to_string(kind))}, {"message", message}}, http_status(kind));
}

template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_error(res, e.kind(), e.what());
        } catch (const json::exception& e) {
            send_error(res, ErrorKind::validation, e.what());
        } catch (const std::exception& e) {
            send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
        }
    };
}

json parse_body(const httplib::Request& req) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::validation, "request body must be a JSON object");
    return j;
}

std::uint64_t parse_id(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto id = std::stoull(text, &used);
        if (used == text.size()) return id;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::not_found, "no moderation item " + text);
}

}  // namespace

void register_routes(httplib::Server& server, Pipeline& pipeline) {
    server.Post("/api/classify", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    if (!body.contains("domain") || !body.at("domain").is_string()) {
                        throw Error(ErrorKind::validation, "body needs a string 'domain'");
                    }
                    send_json(res, to_json(pipeline.classify_domain(body.at("domain").get<std::string>(), now_utc())));
                }));

    server.Get("/api/queue", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   std::optional<ModerationState> state;
                   if (req.has_param("state")) {
                       state = parse_moderation_state(req.get_param_value("state"));
                       if (!state) throw Error(ErrorKind::validation, "state must be pending or labeled");
                   }
                   json items = json::array();
                   for (const auto& item : pipeline.queue().list(state)) items.push_back(to_json(item));
                   send_json(res, {{"items", items}});
               }));

    server.Get(R"(/api/queue/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   const auto id = parse_id(req.matches[1]);
                   auto item = pipeline.queue().get(id);
                   if (!item) throw Error(ErrorKind::not_found, "no moderation item " + std::to_string(id));
                   send_json(res, to_json(*item));
               }));

    server.Post(R"(/api/queue/([^/]+)/verdict)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    const auto id = parse_id(req.matches[1]);
                    const auto body = parse_body(req);
                    if (!body.contains("label") || !body.at("label").is_string()) {
                        throw Error(ErrorKind::validation, "body needs a string 'label'");
                    }
                    const auto label = parse_label(body.at("label").get<std::string>());
                    if (!label) throw Error(ErrorKind::validation, "label must be disinformation, news or other");
                    std::string note;
                    if (body.contains("note")) {
                        if (!body.at("note").is_string()) throw Error(ErrorKind::validation, "'note' must be a string");
                        note = body.at("note").get<std::string>();
                    }
                    send_json(res, to_json(pipeline.submit_verdict(id, *label, std::move(note), now_utc())));
                }));

    server.Get("/feed.txt", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   bool machine = false;
                   if (req.has_param("include")) {
                       const auto v = req.get_param_value("include");
                       if (v != "machine") throw Error(ErrorKind::validation, "include must be 'machine'");
                       machine = true;
                   }
                   std::string body;
                   for (const auto& d : pipeline.queue().feed(machine)) body += d + '\n';
                   res.set_content(body, "text/plain; charset=utf-8");
               }));

    server.Get("/api/stats", guarded([&](const httplib::Request&, httplib::Response& res) {
                   send_json(res, pipeline.stats());
               }));

    server.Get(R"(/api/records/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   const std::string domain = to_lower(std::string(req.matches[1]));
                   auto entry = pipeline.latest_record(domain);
                   if (!entry) throw Error(ErrorKind::not_found, "no archived record for " + domain);
                   send_json(res, to_json(*entry));
               }));
}

void serve(Pipeline& pipeline) {
    httplib::Server server;
    const auto workers = pipeline.config().workers;
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    register_routes(server, pipeline);
    if (!server.listen(pipeline.config().bind_host, pipeline.config().bind_port)) {
        throw Error(ErrorKind::startup, "cannot bind " + pipeline.config().bind_host + ":" +
                                            std::to_string(pipeline.config().bind_port));
    }
}

}  // namespace triage
