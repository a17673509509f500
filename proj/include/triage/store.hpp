#pragma once

#include "triage/features.hpp"
#include "triage/model.hpp"
#include "triage/probe.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

// ---- archive -----------------------------------------------------------

struct ArchiveEntry {
    std::string domain;
    Timestamp probed_at{};
    ProbeRecord record;
    FeatureVector features;
    std::optional<Prediction> prediction;
    std::string pipeline_version;

    bool operator==(const ArchiveEntry&) const = default;
};

nlohmann::json to_json(const ArchiveEntry& e);
ArchiveEntry archive_entry_from_json(const nlohmann::json& j);

/// Append-only JSON-lines archive. One writer per file; append() is
/// serialized internally and writes each entry as a single flushed line.
class ArchiveWriter {
public:
    /// Opens (creating parents) for append. Throws Error(io).
    explicit ArchiveWriter(const std::filesystem::path& path);
    ~ArchiveWriter();
    ArchiveWriter(const ArchiveWriter&) = delete;
    ArchiveWriter& operator=(const ArchiveWriter&) = delete;

    /// Returns the byte offset of the entry's line (its evidence reference).
    std::uint64_t append(const ArchiveEntry& entry);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::mutex mu_;
};

struct ArchiveScan {
    std::vector<std::pair<std::uint64_t, ArchiveEntry>> entries;  // (offset, entry) in write order
    std::size_t corrupt = 0;
};

/// Entries in write order. Lines that fail to parse are skipped and counted;
/// a final line without its newline (an append in progress) is ignored.
/// A missing file scans as empty.
ArchiveScan archive_scan(const std::filesystem::path& path);

/// Entry whose line starts at `offset`. Throws Error(not_found).
ArchiveEntry archive_read_at(const std::filesystem::path& path, std::uint64_t offset);

// ---- labeled dataset ---------------------------------------------------

enum class LabelSource { seed_corpus, moderator };

std::string_view to_string(LabelSource s);
std::optional<LabelSource> parse_label_source(std::string_view text);

struct LabeledExample {
    std::string domain;
    FeatureVector features;
    Label label = Label::other;
    LabelSource source = LabelSource::seed_corpus;
    Timestamp labeled_at{};

    bool operator==(const LabeledExample&) const = default;
};

/// Fixed header: domain, label, label_source, labeled_at, the 33 catalog
/// features, then the three availability indicators.
std::vector<std::string> dataset_header();

void dataset_save(const std::filesystem::path& path, std::span<const LabeledExample> examples);
/// Appends one row, writing the header first if the file is new or empty.
void dataset_append(const std::filesystem::path& path, const LabeledExample& example);

/// Rows in file order; a later row for a domain supersedes earlier ones
/// (the example keeps the position of the domain's first row). Throws
/// Error(io) if unreadable and Error(validation) on a bad header or cell.
std::vector<LabeledExample> dataset_load(const std::filesystem::path& path);

/// Downsamples every class to the minority-class size. Per class (in class
/// order) the member indices are shuffled with one Rng(seed) and the first
/// m kept; output preserves input order. Throws Error(empty_class).
std::vector<LabeledExample> dataset_balance(std::span<const LabeledExample> examples, std::uint64_t seed);

/// RFC 4180 parsing and quoting.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_field(std::string_view value);

// ---- model file --------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const Model& model);
/// Throws Error(incompatible_model) on a version mismatch or any
/// structural problem.
Model model_from_json(const nlohmann::json& j);

/// Canonical writer: identical models produce identical bytes.
std::string model_serialize(const Model& model);
Model model_deserialize(std::string_view text);

void model_save(const Model& model, const std::filesystem::path& path);
/// Throws Error(io) when unreadable and Error(incompatible_model) when the
/// content is truncated, malformed or of another format version.
Model model_load(const std::filesystem::path& path);

/// First 12 hex digits of the SHA-256 of `bytes`.
std::string content_version(std::string_view bytes);

}  // namespace triage
