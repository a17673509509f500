#pragma once

#include "triage/ingest.hpp"
#include "triage/model.hpp"
#include "triage/probe.hpp"
#include "triage/resources.hpp"
#include "triage/store.hpp"

#include <nlohmann/json_fwd.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace httplib {
class Server;
}

namespace triage {

/// Shared by the CLI and the service. Relative paths resolve against the
/// directory holding the config file.
struct Config {
    struct Feeds {
        std::optional<std::filesystem::path> registration;
        std::optional<std::filesystem::path> certificate;
        std::optional<std::filesystem::path> social;
    } feeds;

    /// Fixture directory for replay probing; unset means live probing.
    std::optional<std::filesystem::path> fixtures;
    LiveTransportOptions live;

    ResourcePaths resources;

    std::filesystem::path archive = "archive.jsonl";
    std::filesystem::path dataset = "dataset.csv";
    std::filesystem::path model = "model.json";
    std::filesystem::path moderation = "moderation.jsonl";
    std::filesystem::path dedup_state = "dedup_state.tsv";

    std::string bind_host = "127.0.0.1";
    int bind_port = 8080;
    std::size_t workers = 8;
    std::chrono::seconds dedup_window = std::chrono::hours(24 * 7);
    std::chrono::seconds freshness_window = std::chrono::hours(24);
    ProbeLimits limits;
    std::size_t batch_size = 256;

    /// Throws Error(io) if unreadable, Error(validation) on bad values.
    static Config load(const std::filesystem::path& path);
    static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

// ---- moderation --------------------------------------------------------

enum class ModerationState { pending, labeled };

std::string_view to_string(ModerationState s);
std::optional<ModerationState> parse_moderation_state(std::string_view text);

struct Verdict {
    Label label = Label::other;
    std::string note;
    Timestamp decided_at{};

    bool operator==(const Verdict&) const = default;
};

struct ModerationItem {
    std::uint64_t id = 0;
    std::string domain;
    Prediction prediction;
    std::uint64_t evidence_ref = 0;  // archive byte offset
    Timestamp created_at{};
    ModerationState state = ModerationState::pending;
    std::optional<Verdict> verdict;

    bool operator==(const ModerationItem&) const = default;
};

nlohmann::json to_json(const ModerationItem& item);

/// Moderation queue persisted as an event log (moderation.jsonl): one
/// `enqueue` or `verdict` record per line, replayed on open. All operations
/// are serialized internally.
class ModerationQueue {
public:
    /// Opens or creates the log. Throws Error(io).
    explicit ModerationQueue(std::filesystem::path log);

    /// Adds a pending item unless one is already pending for the domain, in
    /// which case that item is returned.
    ModerationItem enqueue(const Prediction& prediction, std::uint64_t evidence_ref, Timestamp now);

    /// pending -> labeled exactly once. Throws Error(not_found) for an unknown
    /// id and Error(conflict) if the item already has a verdict.
    ModerationItem submit_verdict(std::uint64_t id, Label label, std::string note, Timestamp now);

    std::optional<ModerationItem> get(std::uint64_t id) const;
    /// Items in id order, optionally filtered by state.
    std::vector<ModerationItem> list(std::optional<ModerationState> state = std::nullopt) const;

    /// Sorted distinct domains: labeled disinformation, plus pending items
    /// when `include_machine`.
    std::vector<std::string> feed(bool include_machine) const;

    std::size_t size() const;

private:
    void append_line(const nlohmann::json& j);

    std::filesystem::path log_;
    mutable std::mutex mu_;
    std::map<std::uint64_t, ModerationItem> items_;
    std::uint64_t next_id_ = 1;
};

// ---- pipeline ----------------------------------------------------------

struct PipelineSummary {
    IngestCounters ingest;
    std::uint64_t probed = 0;
    std::uint64_t archived = 0;
    std::array<std::uint64_t, kClassCount> predicted{};
    std::uint64_t enqueued = 0;

    bool operator==(const PipelineSummary&) const = default;
};

nlohmann::json to_json(const PipelineSummary& s);

struct ProcessedDomain {
    ArchiveEntry entry;
    std::uint64_t offset = 0;
    std::optional<ModerationItem> item;
};

/// The four stages (ingest, feature extraction, classification, moderation)
/// over shared stores. Safe for concurrent use by request handlers.
class Pipeline {
public:
    /// Loads resources, model and stores. Throws Error(startup) when the model
    /// or a table cannot be loaded.
    explicit Pipeline(Config config, std::unique_ptr<Transport> transport = nullptr);
    ~Pipeline();

    /// Replays the configured feed files (merged by timestamp, registration
    /// then certificate then social on ties) and processes every admitted
    /// candidate. Dedup state is loaded from and saved to config.dedup_state.
    PipelineSummary run_replay();

    /// Probe, enrich, extract, archive and classify one domain; enqueue it
    /// when the prediction is disinformation.
    ProcessedDomain process(const std::string& domain, Timestamp now);

    /// Validates the domain (Error(validation)), then reuses the latest
    /// archive entry if it is younger than the freshness window, otherwise
    /// processes it afresh.
    Prediction classify_domain(std::string_view domain, Timestamp now);

    /// Records the verdict and appends the moderator label to the dataset.
    ModerationItem submit_verdict(std::uint64_t id, Label label, std::string note, Timestamp now);

    /// Latest archive entry for a domain.
    std::optional<ArchiveEntry> latest_record(std::string_view domain) const;

    nlohmann::json stats() const;

    ModerationQueue& queue() { return *queue_; }
    const Model& model() const { return model_; }
    const std::string& model_version() const { return model_version_; }
    const Config& config() const { return config_; }
    const Resources& resources() const { return resources_; }

private:
    ArchiveEntry build_entry(const ProbeRecord& record, Timestamp now) const;
    ProcessedDomain commit(ArchiveEntry entry, Timestamp now);

    Config config_;
    Resources resources_;
    Model model_;
    std::string model_version_;
    std::unique_ptr<Transport> transport_;
    std::unique_ptr<ArchiveWriter> archive_;
    std::unique_ptr<ModerationQueue> queue_;

    mutable std::shared_mutex index_mu_;
    struct IndexEntry {
        std::uint64_t offset;
        Timestamp probed_at;
    };
    std::unordered_map<std::string, IndexEntry> latest_;
    std::array<std::uint64_t, kClassCount> archived_predictions_{};
    std::uint64_t archived_total_ = 0;
    std::mutex dataset_mu_;
};

/// Registers the HTTP API routes on `server`:
///   POST /api/classify            {"domain": ...}
///   GET  /api/queue?state=        pending | labeled (default: all)
///   GET  /api/queue/{id}
///   POST /api/queue/{id}/verdict  {"label": ..., "note": ...}
///   GET  /feed.txt[?include=machine]
///   GET  /api/stats
///   GET  /api/records/{domain}
/// Errors are JSON {"error": kind, "message": ...} with 400 (validation),
/// 404 (not found), 409 (conflict) or 500.
void register_routes(httplib::Server& server, Pipeline& pipeline);

/// Blocks serving the API on config.bind_host:bind_port.
void serve(Pipeline& pipeline);

}  // namespace triage
